import json
import subprocess
import sys

import pytest

from charvar.cli import main
from charvar.knots import build_pretzel_rep, validate_rep


def _c(v):
    return complex(*v)


def _run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "-o", str(out)])
    return code, out


def test_verify_passes(tmp_path, capsys):
    code, out = _run(tmp_path, "verify", "--suites", "lemma41", "eqs12", "--scale", "0.2", "--seed", "3")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["seed"] == 3 and doc["command"] == "verify"
    assert [r["suite"] for r in doc["records"]] == ["lemma41", "eqs12"]
    assert all(r["passed"] for r in doc["records"])
    err = capsys.readouterr().err
    assert err.count("PASS") == 2


def test_verify_failure_exit_code(tmp_path):
    code, out = _run(tmp_path, "verify", "--suites", "lemma23", "--scale", "0.1", "--tol", "lemma23=1e-30")
    assert code == 1
    assert not json.loads(out.read_text())["records"][0]["passed"]


def test_unknown_suite_is_usage_error(capsys):
    assert main(["verify", "--suites", "bogus"]) == 2
    assert "bogus" in capsys.readouterr().err


def test_bad_arguments_are_usage_errors():
    assert main(["sample"]) == 2
    assert main(["dehn", "--knot", "P334", "--slope", "2/4"]) == 2
    assert main(["tangle", "--spec", "[3"]) == 2
    assert main(["sample", "--chart", "Q1", "--count", "0"]) == 2


def test_sample_records_revalidate(tmp_path):
    code, out = _run(tmp_path, "sample", "--chart", "P334", "--count", "5", "--seed", "4")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["variables"] == ["t", "t13", "t123", "t134"]
    assert len(doc["records"]) == 5
    for r in doc["records"]:
        p = r["params"]
        rep = build_pretzel_rep(*(_c(p[k]) for k in doc["variables"]))
        assert validate_rep(rep.diagram, rep) < 1e-9


def test_output_is_deterministic(tmp_path):
    _, a = _run(tmp_path, "sample", "--chart", "Q2", "--count", "4", "--seed", "5", name="a.json")
    _, b = _run(tmp_path, "sample", "--chart", "Q2", "--count", "4", "--seed", "5", name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CHARVAR_SEED", "17")
    _, out = _run(tmp_path, "sample", "--chart", "Q1", "--count", "1")
    assert json.loads(out.read_text())["seed"] == 17
    _, out = _run(tmp_path, "sample", "--chart", "Q1", "--count", "1", "--seed", "2")
    assert json.loads(out.read_text())["seed"] == 2


def test_csv_output(tmp_path):
    code, out = _run(tmp_path, "sample", "--chart", "Q1", "--count", "3", "--format", "csv", name="s.csv")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# tool=charvar")
    body = [line for line in lines if not line.startswith("#")]
    assert "params.t_re" in body[0].split(",")
    assert len(body) == 4


def test_dehn_table(tmp_path):
    code, out = _run(tmp_path, "dehn", "--knot", "P334", "--slope", "0/1")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["rows"] == 13
    assert all(r["residual"] < 1e-8 for r in doc["records"])


def test_dehn_empty_table(tmp_path, capsys):
    code, out = _run(tmp_path, "dehn", "--knot", "P334", "--slope", "1/0")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["records"] == [] and doc["reason"]
    assert "empty table" in capsys.readouterr().err


def test_tangle_roots(tmp_path):
    code, out = _run(tmp_path, "tangle", "--spec", "[3]", "--t", "2.5")
    assert code == 0
    rows = json.loads(out.read_text())["records"]
    assert len(rows) == 1
    assert abs(_c(rows[0]["s"]) - 1) < 1e-8


def test_tangle_piecewise_spec(tmp_path):
    code, out = _run(tmp_path, "tangle", "--spec", "([3]*[1/2])+[1/2]", "--t", "2.5")
    assert code == 0
    rows = json.loads(out.read_text())["records"]
    assert len(rows) == 5
    assert all(r["defect"] < 1e-8 for r in rows)


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "charvar.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "verify" in res.stdout


@pytest.mark.parametrize("spec", ["", "[", "[1/0]", "[3]+", "([2]"])
def test_malformed_specs(spec):
    assert main(["tangle", "--spec", spec]) == 2
