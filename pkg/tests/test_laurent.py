from fractions import Fraction

import pytest
from sympy import Poly

from app.core.exceptions import InvalidInputError
from app.services.laurent import (
    ONE,
    X,
    ZERO,
    LaurentPoly,
    cyclotomic_orders,
    laurent_adjugate,
    laurent_det,
    lp_canonical,
    lp_divides,
    lp_doteq_equal,
    lp_eval_circle,
    lp_exact_divide,
    lp_gcd,
    lp_resultant,
    lp_symmetric_reduce,
)

P = LaurentPoly.parse


def test_parse_and_print():
    p = P("2*t^2-5*t+2")
    assert p == LaurentPoly(0, (2, -5, 2))
    assert str(p) == "2*t^2-5*t+2"
    assert P("t^-1-2") == LaurentPoly(-1, (1, -2))
    assert str(P("t^-1-2")) == "-2+t^-1"
    assert P("2 * t ** 3") == LaurentPoly.monomial(2, 3)


@pytest.mark.parametrize("text", ["", "2**", "t^", "3t+", "x+1"])
def test_parse_rejects_garbage(text):
    with pytest.raises(InvalidInputError):
        P(text)


def test_canonical_storage():
    assert LaurentPoly(3, (0, 0, 1, 0)) == LaurentPoly.monomial(1, 5)
    assert LaurentPoly(7, (0, 0)) == ZERO
    assert ZERO.low_exp == 0 and ZERO.coeffs == ()


def test_ring_operations():
    assert P("t-2") * P("2*t-1") == P("2*t^2-5*t+2")
    assert P("t") * P("t^-1") == ONE
    assert P("t+1") - P("t") == ONE
    assert P("t^-1-2") * 3 == P("3*t^-1-6")
    assert P("t^-1") ** -2 == P("t^2")
    with pytest.raises(InvalidInputError):
        P("t+1") ** -1


def test_conj_and_shift():
    p = P("t^2-3*t+1")
    assert p.conj() == P("t^-2-3*t^-1+1")
    assert p.shift(-1) == P("t-3+t^-1")
    assert p.conj().conj() == p


def test_doteq_and_canonical():
    p = P("2*t^2-5*t+2")
    assert lp_doteq_equal(-p.shift(4), p)
    assert not lp_doteq_equal(P("t-2"), P("2*t-1"))
    assert lp_canonical(P("-t^-3+2*t^-4")) == P("-2+t")


def test_resultant_and_gcd():
    assert lp_resultant(P("t-2"), P("2*t-1")) == 3
    assert lp_gcd(P("t^2-4"), P("t^3-2*t^2")) == P("t-2")
    with pytest.raises(InvalidInputError, match="resultant undefined for zero polynomial"):
        lp_resultant(ZERO, P("t"))


def _random_factor(rng) -> LaurentPoly:
    coeffs = [rng.choice([-2, -1, 1, 2])] + [rng.randint(-3, 3) for _ in range(rng.randint(0, 2))]
    return LaurentPoly(rng.randint(-2, 2), tuple(coeffs) + (rng.choice([-3, -1, 1, 3]),))


def test_resultant_vanishes_iff_shared_factor(rng):
    shared_cases = 0
    for _ in range(80):
        p, q = _random_factor(rng) * _random_factor(rng), _random_factor(rng)
        if rng.random() < 0.5:
            common = _random_factor(rng)
            p, q = p * common, q * common
            shared_cases += 1
            assert lp_resultant(p, q) == 0
            assert lp_divides(common, lp_gcd(p, q))
        assert (lp_resultant(p, q) == 0) == (lp_gcd(p, q).width > 0)
    assert shared_cases > 20


def test_exact_division():
    delta = P("2*t^2-5*t+2")
    assert lp_exact_divide(delta.shift(-3), P("t-2")) == P("2*t-1").shift(-3)
    assert lp_divides(P("2*t-1"), delta)
    assert not lp_divides(P("t-1"), delta)
    with pytest.raises(InvalidInputError):
        lp_exact_divide(P("t^2+1"), P("2*t"))


def test_evaluate():
    assert P("t^-1-2").evaluate(Fraction(1, 2)) == 0
    assert P("2*t^2-5*t+2").evaluate(2) == 0
    assert P("t^2+t+1").evaluate_mod(2, 3) == 1


def test_eval_circle_encloses_roots():
    trefoil = P("t^2-t+1")
    at_root = lp_eval_circle(trefoil, Fraction(1, 6), 64)
    assert at_root.may_vanish
    at_half = lp_eval_circle(trefoil, Fraction(1, 2), 64)
    assert at_half.re.contains(3) and at_half.im.contains(0)
    assert at_half.re.width <= Fraction(1, 2 ** 64)
    assert not lp_eval_circle(P("2*t^2-5*t+2"), Fraction(1, 3), 32).may_vanish


def test_symmetric_reduce():
    assert lp_symmetric_reduce(P("t^2-t+1")) == Poly([1, -1], X)
    assert lp_symmetric_reduce(P("2*t^2-5*t+2").shift(-1)) == Poly([2, -5], X)
    # (t + t^-1)^2 = t^2 + 2 + t^-2
    assert lp_symmetric_reduce(P("t^4+3*t^2+1")) == Poly([1, 0, 1], X)
    with pytest.raises(InvalidInputError, match="not palindromic up to units"):
        lp_symmetric_reduce(P("t-2"))


def test_cyclotomic_orders():
    assert cyclotomic_orders(P("t^2-t+1")) == {6}
    assert cyclotomic_orders(P("2*t^2-5*t+2")) == frozenset()
    assert cyclotomic_orders(P("t^2-t+1") * P("t^2+1")) == {4, 6}
    assert cyclotomic_orders(ONE) == frozenset()


def test_determinant_and_adjugate():
    rows = [[P("t-1"), ONE], [P("-t"), P("t-1")]]
    assert laurent_det(rows) == P("t^2-t+1")
    assert laurent_det([[P("t"), ONE], [ONE, P("t^-1")]]) == ZERO
    assert laurent_det([]) == ONE
    adj = laurent_adjugate(rows)
    assert adj == [[P("t-1"), -ONE], [P("t"), P("t-1")]]
    # A * adj(A) = det(A) * I
    for i in range(2):
        for j in range(2):
            entry = rows[i][0] * adj[0][j] + rows[i][1] * adj[1][j]
            assert entry == (P("t^2-t+1") if i == j else ZERO)
