import json
from fractions import Fraction

import pytest

from app.core.exceptions import InvalidInputError
from app.schemas.report import ReportFormat, VerdictStatus
from app.services.alex_module import ModuleKind
from app.services.knot_io import BraidWord, gamma_braid, kn_seifert
from app.services.ribbon_classifier import (
    DELTA_OBSTRUCTION,
    DISC_WITNESS,
    UNKNOT,
    UNKNOWN,
    Derivative,
    DerivativeKind,
    DerivativeSpec,
    builtin_derivatives,
    classify_kn,
    classify_knot,
    parse_report,
    report_render,
    sweep_family,
)


def _count(report) -> list[int]:
    return [report.disc_count.min, report.disc_count.max]


@pytest.mark.slow
@pytest.mark.parametrize("k, expected", [(0, [2, 2]), (-1, [2, 2]), (-3, [1, 1]), (-2, [1, 1]), (1, [1, 1]), (2, [1, 1]), (3, [1, 1])])
def test_split_family_counts(k, expected):
    report = classify_knot(kn_seifert(3 * k), builtin_derivatives(3 * k))
    assert report.module_kind is ModuleKind.SPLIT
    assert _count(report) == expected
    p1, p2 = report.verdicts
    assert p1.status is VerdictStatus.DISC_EXISTS
    if expected == [1, 1]:
        assert p2.status is VerdictStatus.OBSTRUCTED
        assert Fraction(p2.rho0.enclosure[0]) > 0


@pytest.mark.parametrize("n", [-1, -2])
def test_both_derivatives_unknotted(n):
    report = classify_knot(kn_seifert(n), DerivativeSpec({"P1": UNKNOT, "P2": UNKNOT}))
    assert report.module_kind is ModuleKind.CYCLIC
    assert _count(report) == [2, 2]
    assert all(v.witness == DISC_WITNESS for v in report.verdicts)


def test_missing_derivative_is_unknown():
    report = classify_knot(kn_seifert(1), DerivativeSpec({"P1": UNKNOT}))
    assert _count(report) == [1, 2]
    assert report.verdicts[1].status is VerdictStatus.UNKNOWN
    assert report.verdicts[1].reason == "no derivative data"
    assert _count(classify_knot(kn_seifert(1))) == [0, 2]


def test_alexander_trivial_braid_derivative_gives_disc():
    # sigma_1 sigma_2 em 3 fios fecha no nó trivial.
    derivs = DerivativeSpec({"P1": Derivative(DerivativeKind.BRAID, BraidWord(3, (1, 2))), "P2": UNKNOWN})
    report = classify_knot(kn_seifert(4), derivs)
    assert report.verdicts[0].status is VerdictStatus.DISC_EXISTS
    assert report.verdicts[0].derivative == "braid:1 2"


def test_more_data_never_loosens_bounds():
    base = classify_knot(kn_seifert(0))
    richer = classify_knot(kn_seifert(0), DerivativeSpec({"P1": UNKNOT}))
    richest = classify_knot(kn_seifert(0), DerivativeSpec({"P1": UNKNOT, "P2": UNKNOT}))
    assert base.disc_count.min <= richer.disc_count.min <= richest.disc_count.min
    assert base.disc_count.max >= richer.disc_count.max >= richest.disc_count.max


def test_trefoil_has_no_discs(trefoil):
    report = classify_knot(trefoil, knot="trefoil")
    assert report.verdicts == [] and report.module_kind is None
    assert _count(report) == [0, 0]
    assert report.reason == DELTA_OBSTRUCTION
    text = report_render(report, ReportFormat.TEXT).decode("utf-8")
    assert text.startswith("trefoil\n")
    assert "not G-homotopy ribbon: Alexander polynomial obstruction" in text


def test_kn_json_report():
    report = classify_kn(0)
    data = json.loads(report_render(report, "json"))
    assert data["disc_count"] == {"min": 2, "max": 2}
    assert data["module_kind"] == "SplitT2T1"
    assert data["knot"] == "K_0 (9_46)"
    assert [v["lagrangian"] for v in data["verdicts"]] == ["P1", "P2"]
    assert data["verdicts"][0]["metabolizer"] == [0, 1]
    assert parse_report(report_render(report)) == report


def test_text_report_lists_both_lagrangians():
    text = report_render(classify_kn(1), ReportFormat.TEXT).decode("utf-8")
    assert "P1" in text and "P2" in text
    assert "discos G-homotopy ribbon: entre 1 e 2" in text


def test_derivative_parsing():
    assert Derivative.parse("unknot") == UNKNOT
    assert Derivative.parse(" Unknown ") == UNKNOWN
    braid = Derivative.parse('braid:"-1 -1 -1"')
    assert braid.braid == gamma_braid(1)
    assert str(braid) == "braid:-1 -1 -1"
    for bad in ("knot", "unknot:1", "braid:1 x"):
        with pytest.raises(InvalidInputError):
            Derivative.parse(bad)
    with pytest.raises(InvalidInputError, match="closure is a link, not a knot"):
        Derivative.parse("braid:1 1")
    with pytest.raises(InvalidInputError):
        Derivative(DerivativeKind.UNKNOT, gamma_braid(1))


def test_derivative_spec_parsing():
    spec = DerivativeSpec.parse(["P1=unknot", "p2=braid:-1 -1 -1"])
    assert spec.get("P1") == UNKNOT
    assert spec.get("P2").braid == gamma_braid(1)
    assert DerivativeSpec.parse(["P1=unknot"]).get("P2") == UNKNOWN
    with pytest.raises(InvalidInputError, match="P1 given twice"):
        DerivativeSpec.parse(["P1=unknot", "P1=unknown"])
    with pytest.raises(InvalidInputError, match="unknown labels"):
        DerivativeSpec.parse(["P3=unknot"])
    with pytest.raises(InvalidInputError):
        DerivativeSpec.parse(["unknot"])


def test_builtin_derivatives():
    assert builtin_derivatives(-1).get("P2") == UNKNOT
    assert builtin_derivatives(4).get("P2") == UNKNOWN
    assert builtin_derivatives(6).get("P2").braid == gamma_braid(2)
    assert builtin_derivatives(-9).get("P2").braid == gamma_braid(2)
    assert builtin_derivatives(-3).get("P2") == UNKNOT


def test_genus_two_is_rejected():
    v = kn_seifert(1).direct_sum(kn_seifert(2))
    with pytest.raises(InvalidInputError, match="genus-1"):
        classify_knot(v)


def test_sweep():
    reports = sweep_family(-3, 0)
    assert [r.knot for r in reports] == ["K_-3", "K_-2", "K_-1", "K_0 (9_46)"]
    assert all(_count(r) == [2, 2] for r in reports)
    with pytest.raises(InvalidInputError):
        sweep_family(2, 1)
