import json

import pytest

from app.main import main

TREFOIL = "[[1, 0], [-1, 1]]"


def test_alex_on_matrix(capsys):
    assert main(["alex", TREFOIL]) == 0
    assert "t^2-t+1" in capsys.readouterr().out


def test_alex_on_braid_reports_both_routes(capsys):
    assert main(["alex", "--json", "braid:-1 -1 -1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["delta"] == data["delta_burau"] == "t^2-t+1"
    assert data["seifert_matrix"] == [[1, 0], [-1, 1]]


def test_knot_from_file(tmp_path, capsys):
    path = tmp_path / "k3.json"
    path.write_text("[[3, 2], [1, 0]]", encoding="utf-8")
    assert main(["module-type", "--json", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "SplitT2T1"


def test_invalid_matrix_exits_with_one(capsys):
    assert main(["alex", "[[1, 0], [0, 1]]"]) == 1
    assert "not a Seifert matrix" in capsys.readouterr().err


def test_ext(capsys):
    assert main(["ext", "t-2", "2*t-1"]) == 0
    assert capsys.readouterr().out.strip() == "Z/3"
    assert main(["ext", "--json", "t+1", "t-1"]) == 0
    assert json.loads(capsys.readouterr().out) == {"ext1": "Z/2", "order": 2}


def test_signature_commands(capsys, tmp_path):
    assert main(["signature", "braid:-1 -1 -1", "--at", "1/2"]) == 0
    assert "σ(1/2) = 2" in capsys.readouterr().out
    assert main(["signature", "braid:-1 -1 -1", "--at", "1/6"]) == 1
    assert "at a jump point" in capsys.readouterr().err
    plot = tmp_path / "plot.json"
    assert main(["signature", TREFOIL, "--plot-json", str(plot)]) == 0
    assert [arc["value"] for arc in json.loads(plot.read_text(encoding="utf-8"))["arcs"]] == [0, 2, 0]


@pytest.mark.parametrize("at", ["xyz", "1/0", ""])
def test_signature_rejects_non_rational_at(capsys, at):
    assert main(["signature", TREFOIL, "--at", at]) == 1
    assert "--at" in capsys.readouterr().err


def test_plot_json_unwritable_path_exits_with_one(capsys, tmp_path):
    plot = tmp_path / "sem_pasta" / "plot.json"
    assert main(["signature", TREFOIL, "--plot-json", str(plot)]) == 1
    assert "--plot-json" in capsys.readouterr().err
    assert not plot.exists()


def test_knot_file_not_utf8_exits_with_one(capsys, tmp_path):
    path = tmp_path / "binario.json"
    path.write_bytes(b"\xff\xfe\x00[[1, 0]]")
    assert main(["alex", str(path)]) == 1
    assert "UTF-8" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["rho0", "--precision-bits", "abc", TREFOIL],
        ["kn", "x"],
        ["sweep", "1", "b"],
        ["alex", "--strands", "dois", "braid:-1 -1 -1"],
        ["nao-existe"],
        [],
    ],
)
def test_usage_errors_exit_with_one(capsys, argv):
    assert main(argv) == 1
    assert "erro: " in capsys.readouterr().err


def test_rho0(capsys):
    assert main(["rho0", "--json", TREFOIL]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["sign"] == "Positive"
    assert data["approx"] == pytest.approx(4 / 3, abs=1e-3)


def test_precision_bounds(capsys):
    assert main(["rho0", "--precision-bits", "0", TREFOIL]) == 1
    assert "--precision-bits" in capsys.readouterr().err


def test_lagrangians_and_blanchfield(capsys):
    assert main(["lagrangians", "--json", "[[1, 2], [1, 0]]"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["kind"] == "CyclicT2T1" and data["ext1"] == "Z/3"
    assert [lag["label"] for lag in data["lagrangians"]] == ["P1", "P2"]
    assert all(lag["isotropic"] for lag in data["lagrangians"])
    assert main(["blanchfield", "--json", "[[1, 2], [1, 0]]"]) == 0
    form = json.loads(capsys.readouterr().out)
    assert form["convention"] == -1 and len(form["entries"]) == 2


def test_classify_with_derivatives(capsys):
    argv = ["classify", "--json", "[[-1, 2], [1, 0]]", "--derivative", "P1=unknot", "--derivative", "P2=unknot"]
    assert main(argv) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["knot"] == "K_-1" and data["disc_count"] == {"min": 2, "max": 2}
    assert main(["classify", TREFOIL, "--builtin"]) == 1
    assert main(["classify", TREFOIL, "--derivative", "P1=unknot", "--derivative", "P1=unknot"]) == 1


def test_kn(capsys):
    assert main(["kn", "-4"]) == 0
    assert capsys.readouterr().out == "K_-4: [[-4, 2], [1, 0]]\n"


@pytest.mark.slow
def test_kn_classify_text(capsys):
    assert main(["kn", "3", "--classify"]) == 0
    out = capsys.readouterr().out
    assert "Obstructed" in out and "discos G-homotopy ribbon: 1" in out


def test_version_exits():
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0
