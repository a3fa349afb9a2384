import json

import pytest
from conftest import random_knot_braid

from app.core.exceptions import InvalidInputError
from app.services.alex_module import alexander_polynomial
from app.services.knot_io import (
    BraidWord,
    Metabolizer,
    alexander_via_burau,
    braid_closure_components,
    braid_to_seifert,
    gamma_braid,
    genus1_metabolizers,
    kn_family_name,
    kn_parameter,
    kn_seifert,
    parse_seifert_json,
    validate_seifert,
)
from app.services.laurent import LaurentPoly, lp_doteq_equal


@pytest.mark.parametrize(
    "rows, message",
    [
        ([[1, 2, 3], [4, 5, 6]], "not square"),
        ([[1]], "odd size"),
        ([[1, 0], [0, 1]], "det(V - V^T) = 0, expected 1"),
        ([[0, 2], [0, 0]], "det(V - V^T) = 4, expected 1"),
    ],
)
def test_validate_seifert_rejects(rows, message):
    with pytest.raises(InvalidInputError, match="not a Seifert matrix") as error:
        validate_seifert(rows)
    assert message in error.value.detail


def test_parse_seifert_json():
    v = parse_seifert_json("[[3, 2], [1, 0]]")
    assert v == kn_seifert(3)
    assert json.loads(v.to_json()) == [[3, 2], [1, 0]]
    assert parse_seifert_json("[]").size == 0
    for bad in ("[[1, 2], [3]]", "[[1.5, 0], [0, 1]]", "{\"a\": 1}", "[[1, 0], [0"):
        with pytest.raises(InvalidInputError):
            parse_seifert_json(bad)


def test_kn_family():
    assert kn_seifert(-4).to_json() == "[[-4, 2], [1, 0]]"
    assert kn_family_name(0) == "K_0 (9_46)"
    assert kn_family_name(-2) == "K_-2"
    assert kn_parameter(kn_seifert(7)) == 7
    assert kn_parameter(validate_seifert([[1, 0], [-1, 1]])) is None
    assert kn_seifert(2).genus == 1


def test_direct_sum():
    v = kn_seifert(1).direct_sum(kn_seifert(2))
    assert v.size == 4 and v.genus == 2
    assert v[2, 2] == 2 and v[0, 2] == 0


def test_braid_parsing():
    assert BraidWord.parse("-1 -1 -1") == BraidWord(2, (-1, -1, -1))
    assert BraidWord.parse("1,-2,1,-2").strands == 3
    assert BraidWord.parse("1", strands=4).strands == 4
    assert str(BraidWord(3, (1, -2))) == "1 -2"
    with pytest.raises(InvalidInputError):
        BraidWord.parse("1 a")
    with pytest.raises(InvalidInputError):
        BraidWord(2, (2,))
    with pytest.raises(InvalidInputError):
        BraidWord(3, (0,))


def test_gamma_braids():
    assert gamma_braid(0) == BraidWord(1, ())
    assert gamma_braid(1) == BraidWord(2, (-1, -1, -1))
    assert gamma_braid(2).letters == (-2, -1, -1, -2, -2, -1)
    for k in range(1, 5):
        word = gamma_braid(k)
        assert len(word.letters) == 3 * k
        assert braid_closure_components(word) == 1
        assert braid_to_seifert(word).size == 2 * k
    with pytest.raises(InvalidInputError):
        gamma_braid(-1)


def test_closure_components():
    assert braid_closure_components(BraidWord(2, (1, 1))) == 2
    assert braid_closure_components(BraidWord(3, (1,))) == 2
    assert braid_closure_components(BraidWord(3, (1, 2))) == 1
    with pytest.raises(InvalidInputError, match="closure is a link, not a knot"):
        braid_to_seifert(BraidWord(2, (1, 1)))


def test_trefoil_and_figure_eight_seifert(trefoil):
    assert trefoil.matrix.to_lists() == [[1, 0], [-1, 1]]
    assert alexander_polynomial(trefoil) == LaurentPoly.parse("t^2-t+1")
    figure_eight = braid_to_seifert(BraidWord(3, (1, -2, 1, -2)))
    assert figure_eight.matrix.to_lists() == [[-1, 1], [0, 1]]
    assert lp_doteq_equal(alexander_polynomial(figure_eight), LaurentPoly.parse("t^2-3*t+1"))


def test_burau_matches_known_polynomials():
    assert alexander_via_burau(gamma_braid(1)) == LaurentPoly.parse("t^2-t+1")
    assert alexander_via_burau(BraidWord(3, (1, -2, 1, -2))) == LaurentPoly.parse("t^2-3*t+1")
    assert alexander_via_burau(gamma_braid(0)) == LaurentPoly.parse("1")
    assert alexander_via_burau(BraidWord(3, (1, 2))) == LaurentPoly.parse("1")


def test_burau_agrees_with_seifert_route(rng):
    checked = 0
    while checked < 50:
        strands = rng.randint(2, 4)
        word = random_knot_braid(rng, strands, rng.randint(strands - 1, 10))
        burau = alexander_via_burau(word)
        seifert = alexander_polynomial(braid_to_seifert(word))
        assert lp_doteq_equal(burau, seifert), str(word)
        checked += 1


def test_alexander_invariants(rng):
    for _ in range(30):
        word = random_knot_braid(rng, rng.randint(2, 4), rng.randint(3, 10))
        delta = alexander_polynomial(braid_to_seifert(word))
        assert delta.evaluate(1) == 1
        assert delta.coeffs == tuple(reversed(delta.coeffs))
        assert delta.evaluate(-1) % 2 == 1


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[3, 2], [1, 0]], [(0, 1), (1, -1)]),
        ([[0, 2], [1, 0]], [(0, 1), (1, 0)]),
        ([[1, 2], [1, 0]], [(0, 1), (3, -1)]),
        ([[1, 0], [-1, 1]], []),
        ([[0, 1], [0, 0]], [(0, 1), (1, 0)]),
    ],
)
def test_genus1_metabolizers(rows, expected):
    v = validate_seifert(rows)
    found = genus1_metabolizers(v)
    assert found == [Metabolizer(vec) for vec in expected]
    for m in found:
        x, y = m.vector
        assert v[0, 0] * x * x + (v[0, 1] + v[1, 0]) * x * y + v[1, 1] * y * y == 0


def test_metabolizers_need_genus_one():
    with pytest.raises(InvalidInputError):
        genus1_metabolizers(kn_seifert(1).direct_sum(kn_seifert(2)))
