import json
import subprocess
import sys

import pytest

from rotorscape.chassis import load_chassis
from rotorscape.cli import main


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("ROTORSCAPE_OUT_DIR", str(tmp_path))
    return tmp_path


def test_chassis_writes_vertices(out, capsys):
    assert main(["chassis", "--id", "CRPol8"]) == 0
    c = load_chassis(out / "CRPol8.json")
    assert c.n == 8 and c.family == "regular_polygon"


def test_chassis_list(capsys):
    assert main(["chassis", "--list"]) == 0
    ids = capsys.readouterr().out.split()
    assert "CDod20" in ids and "CRPol6" in ids


def test_chassis_unknown(out, capsys):
    assert main(["chassis", "--id", "NOPE"]) == 2
    assert "NOPE" in capsys.readouterr().err


def test_predict(out, capsys):
    assert main(["predict", "9"]) == 0
    text = capsys.readouterr().out
    assert text.count("branch ") == 4
    assert main(["predict", "100"]) == 0
    assert capsys.readouterr().out.count("branch ") == 95
    assert main(["predict", "5"]) == 1
    assert "empty" in capsys.readouterr().err


def test_optimize_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["optimize", "--chassis", "CRPol6", "--samples", "12", "--seed", "3",
                     "--out-dir", str(d)]) == 0
    assert (a / "CRPol6.solutions.json").read_bytes() == (b / "CRPol6.solutions.json").read_bytes()
    doc = json.loads((a / "CRPol6.solutions.json").read_text())
    assert doc["rng_seed"] == 3 and doc["samples_requested"] == 12


def test_optimize_analyze_polygon(out, capsys):
    assert main(["optimize", "--chassis", "CRPol7", "--samples", "60", "--seed", "0"]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out / "CRPol7.solutions.json")]) == 0
    text = capsys.readouterr().out
    assert "Type IV-B, K=2" in text
    doc = json.loads((out / "CRPol7.analysis.json").read_text())
    assert doc["classification"] == "IV-B"
    for stem in ("ellipses.json", "branches.json", "scatter.csv", "disc.csv"):
        assert (out / f"CRPol7.{stem}").exists()


def test_analyze_type_one(out, capsys):
    assert main(["optimize", "--chassis", "CTriPr6", "--samples", "30", "--seed", "0"]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out / "CTriPr6.solutions.json")]) == 0
    assert "Type I" in capsys.readouterr().out


def test_analyze_missing_file(out):
    with pytest.raises(FileNotFoundError):
        main(["analyze", str(out / "nope.json")])


def test_trajectory(out, capsys):
    assert main(["trajectory", "--chassis", "CRPol7", "--branch", "2", "--steps", "16",
                 "--controls"]) == 0
    rows = (out / "CRPol7_branch2.trajectory.csv").read_text().splitlines()
    assert len(rows) > 16
    assert main(["trajectory", "--chassis", "CRPol7", "--branch", "9"]) != 0


def test_sensitivity(out, capsys):
    assert main(["sensitivity", "--chassis", "CRPol6", "--points", "9"]) == 0
    rows = (out / "CRPol6.sensitivity.csv").read_text().splitlines()
    assert len(rows) == 10


def test_figures(out, capsys):
    assert main(["optimize", "--chassis", "CRPol6", "--samples", "20", "--figures"]) == 0
    assert main(["analyze", str(out / "CRPol6.solutions.json"), "--figures"]) == 0
    assert main(["sensitivity", "--chassis", "CRPol6", "--points", "5", "--figures"]) == 0
    pngs = sorted(p.name for p in out.glob("*.png"))
    assert len(pngs) >= 3
    assert all((out / p).stat().st_size > 1000 for p in pngs)


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "rotorscape", "predict", "7", "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "q=3" in res.stdout
