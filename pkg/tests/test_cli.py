import json
import subprocess
import sys
from pathlib import Path

import pytest

from toricquot.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def report(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, err
    return json.loads(out)


def test_analyze_teardrop(capsys):
    r = report(["analyze", "--spec", str(SPECS / "teardrop.json")], capsys)["result"]
    assert r["split"]["is_split"] is False
    assert r["non_orbifold_patterns"] == [[0, 1]]
    assert r["singular_set"] == {"bound": 0, "dim_B": 0, "satisfied": True, "sharp": True}
    assert r["witness"]["value"] > 0
    assert "reduction" not in r


def test_analyze_maximal_torus(capsys):
    r = report(["analyze", "--spec", str(SPECS / "maximal_torus.json")], capsys)["result"]
    assert r["split"]["is_split"] is True
    assert r["singular_set"]["dim_B"] is None
    assert r["reduction"]["gamma_order"] == 4
    assert r["reduction"]["subspace_axes"] == [0, 2]


def test_report_is_deterministic(capsys, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    for out in (out1, out2):
        assert main(["analyze", "--spec", str(SPECS / "teardrop.json"), "--out", str(out)]) == 0
    r1, r2 = json.loads(out1.read_text()), json.loads(out2.read_text())
    r1.pop("metadata"), r2.pop("metadata")
    assert r1 == r2
    assert r1["tool_version"]
    assert len(r1["input_sha256"]) == 64


def test_malformed_and_unknown_keys(tmp_path, capsys):
    assert run(["analyze", "--spec", write(tmp_path, "bad.json", "{\"k\": 1")], capsys)[0] == 2
    doc = {"k": 1, "n": 1, "W": [[1]], "extra": 0}
    assert run(["analyze", "--spec", write(tmp_path, "x.json", doc)], capsys)[0] == 2
    doc = {"k": 2, "n": 1, "W": [[1]]}
    assert run(["analyze", "--spec", write(tmp_path, "y.json", doc)], capsys)[0] == 2
    assert run(["analyze", "--spec", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_scan_seed_is_mandatory(tmp_path, capsys):
    doc = {"k": 1, "n": 2, "W": [[1, 2]], "scan": {"direction": [1, 1, 1, 1], "radii": [1]}}
    assert run(["curvature", "--spec", write(tmp_path, "s.json", doc)], capsys)[0] == 2


def test_too_many_planes_exit_code(tmp_path, capsys):
    doc = {"k": 1, "n": 4, "W": [[1, 1, 1, 1]]}
    assert run(["strata", "--spec", write(tmp_path, "s.json", doc), "--max-planes", "3"], capsys)[0] == 3


def test_reduce_non_split_exit_code(capsys):
    assert run(["reduce", "--spec", str(SPECS / "teardrop.json")], capsys)[0] == 5


def test_reduce_with_pairs(capsys):
    r = report(["reduce", "--spec", str(SPECS / "circle_with_line.json")], capsys)["result"]
    assert r["isometry_check"]["max_deviation"] < 1e-6
    assert r["summary"]["gamma_order"] == 2


def _csv_rows(text):
    return [line.split(",") for line in text.strip().splitlines()]


def test_curvature_teardrop(capsys):
    code, out, _ = run(["curvature", "--spec", str(SPECS / "teardrop.json")], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert rows[0] == ["radius", "plane_index", "sec", "sec_times_r2"]
    assert rows[-1][0] == "# fitted_exponent"
    assert float(rows[-1][1]) == pytest.approx(-2, abs=0.01)


def test_curvature_split_undefined(capsys):
    code, out, _ = run(["curvature", "--spec", str(SPECS / "maximal_torus.json")], capsys)
    rows = _csv_rows(out)
    assert code == 0
    assert max(abs(float(r[2])) for r in rows[1:-1]) < 1e-6
    assert rows[-1][1] == "undefined"


def test_curvature_non_principal_error_row(tmp_path, capsys):
    doc = {"k": 2, "n": 2, "W": [[1, 0], [0, 1]], "scan": {"direction": [1, 0, 0, 0], "radii": [1], "seed": 0}}
    code, out, _ = run(["curvature", "--spec", write(tmp_path, "s.json", doc)], capsys)
    assert code == 4
    assert _csv_rows(out)[-1][:2] == ["error", "SingularGram"]


def test_reflect_dihedral(capsys):
    r = report(["reflect", "--spec", str(SPECS / "dihedral8.json")], capsys)["result"]
    assert r["chamber_count"] == 8
    assert r["reflection_count"] == 4


def test_reflect_needs_seed(tmp_path, capsys):
    doc = {"dim": 2, "generators": [[[1, 0], [0, -1]]]}
    assert run(["reflect", "--spec", write(tmp_path, "g.json", doc)], capsys)[0] == 2


def test_conjugacy_not_conjugate(capsys):
    r = report(["conjugacy", "--spec", str(SPECS / "z2_reflection.json"),
                "--spec", str(SPECS / "z2_rotation.json")], capsys)["result"]
    assert r["status"] == "not_conjugate"


def test_conjugacy_inconclusive_exit_zero(capsys):
    r = report(["conjugacy", "--spec", str(SPECS / "dihedral8.json"), "--spec", str(SPECS / "dihedral8.json"),
                "--budget", "0"], capsys)["result"]
    assert r["status"] == "inconclusive"


def test_distance_trivial_group(tmp_path, capsys):
    doc = {"dim": 2, "generators": []}
    r = report(["distance", "--spec", write(tmp_path, "g.json", doc), "--x", "0,0", "--y", "3,4"], capsys)
    assert r["result"]["value"] == pytest.approx(5)


def test_distance_torus(capsys):
    r = report(["distance", "--spec", str(SPECS / "teardrop.json"), "--x", "[1, 0, 0, 0]", "--y", "0,1,0,0"], capsys)
    assert r["result"]["value"] == pytest.approx(0, abs=1e-6)


def test_distance_bad_point(capsys):
    assert run(["distance", "--spec", str(SPECS / "teardrop.json"), "--x", "1,2", "--y", "0,1,0,0"], capsys)[0] == 2


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "toricquot.cli", "reflect", "--spec", str(SPECS / "dihedral8.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["result"]["chamber_count"] == 8
