import csv
import json
import subprocess
import sys

import pytest

from sspectral import cli


@pytest.fixture
def op_file(tmp_path):
    path = tmp_path / "op.json"
    path.write_text(json.dumps({"n": 2, "d": 2, "entries": [["2+e1", 0], [0, "-2+e1"]]}))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum(capsys, op_file):
    code, out, _ = run(capsys, "spectrum", op_file)
    assert code == 0
    doc = json.loads(out)
    assert sorted((s["center"], round(s["radius"], 9)) for s in doc["spheres"]) == [(-2.0, 1.0), (2.0, 1.0)]


def test_resolvent(capsys, op_file):
    code, out, _ = run(capsys, "resolvent", op_file, "--s", "5*e2")
    doc = json.loads(out)
    assert code == 0
    assert doc["identities"]["resolvent_equation"] < 1e-10


def test_resolvent_on_spectrum(capsys, tmp_path):
    path = tmp_path / "rot.json"
    path.write_text(json.dumps({"n": 2, "d": 1, "entries": [["e1"]]}))
    code, _, err = run(capsys, "resolvent", str(path), "--s", "e2")
    assert code == 2
    assert json.loads(err)["error"] == "SInSpectrum"


def test_certify_with_profile(capsys, op_file, tmp_path):
    prof = tmp_path / "profile.csv"
    code, out, _ = run(capsys, "certify", op_file, "--phi", "0.9", "--profile", str(prof))
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["estimates"]["passed"]
    rows = list(csv.reader(prof.open()))
    assert rows[0] == ["abs_s", "angle", "scaled_norm"] and len(rows) > 100


def test_calc(capsys, tmp_path):
    path = tmp_path / "two.json"
    path.write_text(json.dumps({"n": 1, "d": 1, "entries": [[2]]}))
    code, out, _ = run(capsys, "calc", str(path), "--f", "rat:[0,1]/[1,0,2,0,1]")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["entries"][0][0]["coeffs"][0] == pytest.approx(0.08, abs=1e-12)
    assert doc["contour"]["tol"] > 0


def test_hinf_right(capsys, op_file):
    code, out, _ = run(capsys, "hinf", op_file, "--f", "poly:[0,e2,1]:right", "--side", "right", "--m", "auto")
    doc = json.loads(out)
    assert code == 0
    assert doc["provenance"]["m"] == 3 and doc["provenance"]["side"] == "right"
    assert doc["single_valued"]
    assert doc["discrepancy"]["e_quadrature"] < 1e-9


def test_hinf_left(capsys, op_file):
    code, out, _ = run(capsys, "hinf", op_file, "--f", "poly:[0,1]", "--side", "left", "--J", "e1+e2")
    doc = json.loads(out)
    assert code == 0
    entry = doc["operator"]["entries"][0][0]["coeffs"]
    assert entry[:2] == [pytest.approx(2.0, abs=1e-7), pytest.approx(1.0, abs=1e-7)]


def test_verify(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"generator": {"kind": "DiagonalModel"}, "n": 1, "d": 2, "seed": 4,
                               "suites": ["algebra", "omega"], "options": {"algebra_samples": 100}}))
    out_path, csv_path = tmp_path / "report.json", tmp_path / "profile.csv"
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--out", str(out_path), "--csv", str(csv_path))
    assert code == 0
    assert json.loads(out)["fail"] == 0
    assert json.loads(out_path.read_text())["summary"]["fail"] == 0
    assert next(csv.reader(csv_path.open())) == ["operator", "abs_s", "angle", "scaled_norm"]


def test_verify_bad_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"generator": {"kind": "Elsewhere"}, "d": 2}))
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and json.loads(err)["error"] == "ConfigError"


def test_demo_dirac(capsys):
    code, out, _ = run(capsys, "demo", "dirac", "--points", "8")
    doc = json.loads(out)
    assert code == 0
    assert doc["dim"] == 16
    assert "passed" in doc["certificate"]


def test_module_entry_point(op_file):
    proc = subprocess.run([sys.executable, "-m", "sspectral", "spectrum", op_file],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "spheres" in json.loads(proc.stdout)
