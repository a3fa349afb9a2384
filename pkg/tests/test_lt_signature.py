from fractions import Fraction

import pytest
from conftest import float_signature, random_knot_braid, random_seifert

from app.core.exceptions import InvalidInputError
from app.core.intervals import RationalInterval
from app.schemas.signature import Rho0Export, SignatureFunctionExport
from app.services.alex_module import alexander_polynomial
from app.services.knot_io import BraidWord, braid_to_seifert, gamma_braid, kn_seifert
from app.services.laurent import cyclotomic_orders
from app.services.lt_signature import (
    Rho0Result,
    Rho0Sign,
    jump_intervals,
    rho0,
    signature_at,
    signature_function,
)


def test_trefoil_pointwise(trefoil):
    assert signature_at(trefoil, Fraction(1, 2)) == 2
    assert signature_at(trefoil, Fraction(1, 12)) == 0
    assert signature_at(trefoil, Fraction(11, 12)) == 0
    with pytest.raises(InvalidInputError, match="at a jump point"):
        signature_at(trefoil, Fraction(1, 6))
    for s in (0, 1, Fraction(3, 2)):
        with pytest.raises(InvalidInputError):
            signature_at(trefoil, s)


def test_trefoil_function(trefoil):
    f = signature_function(trefoil)
    assert f.arc_values == (0, 2, 0)
    assert len(f.jumps) == 2 and len(f.half_jumps) == 1
    assert f.jumps[0].contains(Fraction(1, 6)) and f.jumps[1].contains(Fraction(5, 6))
    assert f.value_at(Fraction(1, 6)) == 1
    assert f.value_at(Fraction(5, 6)) == 1
    assert f.value_at(Fraction(1, 2)) == 2
    assert f.value_at(Fraction(1, 12)) == 0
    assert f.value_at(0) == 0


def test_trefoil_export(trefoil):
    export = SignatureFunctionExport.from_function(signature_function(trefoil))
    assert export.delta == "t^2-t+1"
    assert [arc.value for arc in export.arcs] == [0, 2, 0]
    assert export.arcs[0].s_interval[0] == "0" and export.arcs[-1].s_interval[1] == "1"


def test_trefoil_rho0(trefoil):
    result = rho0(trefoil)
    assert result.sign is Rho0Sign.POSITIVE and result.is_signed
    assert result.enclosure.contains(Fraction(4, 3))
    export = Rho0Export.from_result(result)
    assert export.sign is Rho0Sign.POSITIVE
    assert export.approx == pytest.approx(4 / 3, abs=1e-3)


def test_parallel_evaluation_matches(trefoil):
    v = trefoil.direct_sum(kn_seifert(2))
    assert signature_function(v, workers=4).arc_values == signature_function(v).arc_values


def test_unknot(unknot):
    f = signature_function(unknot)
    assert f.jumps == () and f.arc_values == (0,)
    result = rho0(unknot)
    assert result.sign is Rho0Sign.ZERO and result.enclosure == RationalInterval.point(0)
    assert signature_at(unknot, Fraction(1, 3)) == 0


@pytest.mark.parametrize("n", [-3, 0, 1, 3, 5])
def test_kn_has_no_jumps(n):
    f = signature_function(kn_seifert(n))
    assert f.jumps == ()
    assert f.arc_values == (0,)
    assert rho0(kn_seifert(n)).sign is Rho0Sign.ZERO


def test_cancelling_sum_is_zero(trefoil):
    mirror = braid_to_seifert(BraidWord(2, (1, 1, 1)))
    assert signature_at(mirror, Fraction(1, 2)) == -2
    assert rho0(mirror).sign is Rho0Sign.NEGATIVE
    both = trefoil.direct_sum(mirror)
    assert signature_function(both).arc_values == (0, 0, 0)
    assert rho0(both).sign is Rho0Sign.ZERO


def test_additivity(trefoil):
    double = trefoil.direct_sum(trefoil)
    assert rho0(double).enclosure.contains(Fraction(8, 3))
    assert signature_at(double, Fraction(1, 2)) == 4


def test_jump_intervals_are_disjoint():
    # Nó figura oito: Delta ≐ t^2 - 3t + 1 não tem raízes no círculo.
    figure_eight = braid_to_seifert(BraidWord(3, (1, -2, 1, -2)))
    assert jump_intervals(alexander_polynomial(figure_eight), Fraction(1, 64)) == []
    v = braid_to_seifert(gamma_braid(3))
    half = jump_intervals(alexander_polynomial(v), Fraction(1, 64))
    assert all(0 < r.lo and r.hi < Fraction(1, 2) for r in half)
    assert all(a.hi < b.lo for a, b in zip(half, half[1:]))


def test_rho0_result_consistency():
    with pytest.raises(ValueError):
        Rho0Result(RationalInterval(Fraction(1), Fraction(2)), Rho0Sign.NEGATIVE)
    undetermined = Rho0Result(RationalInterval(Fraction(-1), Fraction(1)), Rho0Sign.UNDETERMINED)
    assert not undetermined.is_signed


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_gamma_braids_have_positive_rho0(k):
    v = braid_to_seifert(gamma_braid(k))
    assert all(value >= 0 for value in signature_function(v).arc_values)
    assert signature_at(v, Fraction(1, 2)) > 0
    result = rho0(v)
    assert result.sign is Rho0Sign.POSITIVE and result.enclosure.lo > 0


@pytest.mark.slow
def test_matches_floating_point_oracle(rng):
    compared = 0
    for _ in range(50):
        v = random_seifert(rng, rng.randint(1, 3))
        orders = cyclotomic_orders(alexander_polynomial(v))
        for _ in range(200):
            s = Fraction(rng.randint(1, 9999), 10000)
            if s.denominator in orders:
                continue
            expected, smallest = float_signature(v, float(s))
            if smallest < 1e-8:
                continue
            assert signature_at(v, s) == expected, (v.to_json(), s)
            compared += 1
    assert compared > 5000


@pytest.mark.slow
@pytest.mark.parametrize("genus", [1, 2, 3])
def test_signature_function_properties(rng, genus):
    for _ in range(8):
        v = random_seifert(rng, genus)
        f = signature_function(v)
        assert len(f.arc_values) == len(f.jumps) + 1
        assert f.arc_values == tuple(reversed(f.arc_values))
        assert all(value % 2 == 0 and abs(value) <= v.size for value in f.arc_values)
        assert f.arc_values[0] == 0
        # Perto de s = 0 (e, por simetria, de s = 1) a assinatura se anula.
        near_zero = f.jumps[0].lo / 2 if f.jumps else Fraction(1, 1000)
        assert signature_at(v, near_zero) == 0
        assert signature_at(v, 1 - near_zero) == 0
        for index, value in enumerate(f.arc_values[1:-1], start=1):
            s = (f.jumps[index - 1].hi + f.jumps[index].lo) / 2
            assert f.value_at(s) == value


@pytest.mark.slow
def test_negative_braids_have_nonnegative_signature(rng):
    for _ in range(20):
        word = random_knot_braid(rng, rng.randint(2, 4), rng.randint(3, 10), negative=True)
        v = braid_to_seifert(word)
        assert all(value >= 0 for value in signature_function(v).arc_values), word
        # Delta(-1) é ímpar para nós: s = 1/2 nunca é salto.
        value = signature_at(v, Fraction(1, 2))
        # A superfície canônica de uma trança negativa tem gênero mínimo: V não vazia => nó não trivial.
        if v.size:
            assert value > 0, word
        else:
            assert value == 0
        assert value == float_signature(v, 0.5)[0]
