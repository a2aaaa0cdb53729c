import csv
import io
import json
import subprocess
import sys

import pytest

from rhls.cli import RunSpec, main, parse_number, parse_overrides, run
from fractions import Fraction


def invoke(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_parse_number():
    assert parse_number("3") == 3 and isinstance(parse_number("3"), int)
    assert parse_number("2/3") == Fraction(2, 3)
    assert parse_number("0.6667") == 0.6667


def test_indices_report(capsys):
    code, out = invoke(capsys, "indices", "--n", "2", "--alpha", "3", "--beta", "0", "--p", "0.6667")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert list(rep) == ["task", "params", "values", "error_estimates", "tolerance", "pass",
                         "wall_time_ms"]
    assert rep["values"]["q"] == pytest.approx(-4, rel=1e-3)
    assert rep["wall_time_ms"] is None


def test_conformal_indices_exact(capsys):
    code, out = invoke(capsys, "indices", "--alpha", "4", "--beta", "1/2")
    rep = json.loads(out)
    assert code == 0
    assert rep["params"]["beta"] == "1/2"
    assert rep["values"]["k"] == pytest.approx(7 / 3)


def test_inadmissible_exit(capsys):
    code, out = invoke(capsys, "indices", "--n", "2", "--alpha", "3", "--beta", "2", "--p", "0.6")
    assert code == 3
    assert json.loads(out)["condition"] == "beta upper bound"


def test_inadmissible_before_numerics(capsys, monkeypatch):
    import rhls.cli as cli
    monkeypatch.setitem(cli.TASKS, "sharp-constant", lambda spec: pytest.fail("numerics ran"))
    code, _ = invoke(capsys, "sharp-constant", "--alpha", "3", "--beta", "1")
    assert code == 3


def test_usage_errors(capsys):
    assert main(["no-such-task"]) == 2
    assert main(["indices", "--alpha", "abc"]) == 2
    assert main(["indices", "--config", "bogus_key=1"]) == 2


def test_config_overrides(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# comment\nnodes_per_panel = 12\n")
    out = parse_overrides([str(path), "rel_tol=1e-9"])
    assert out == {"nodes_per_panel": "12", "rel_tol": "1e-9"}
    spec = RunSpec("indices", overrides=out)
    assert spec.quadrature().nodes_per_panel == 12


def test_kernel_check_deterministic(capsys, tmp_path):
    out_path = tmp_path / "rep.json"
    code1, a = invoke(capsys, "kernel-check", "--samples", "200", "--seed", "3", "--out", str(out_path))
    code2, b = invoke(capsys, "kernel-check", "--samples", "200", "--seed", "3")
    assert code1 == code2 == 0
    assert a == b == out_path.read_text()


def test_failed_verification_exit(capsys):
    # a pass is impossible at a zero tolerance for a quadrature-based check
    code, out = invoke(capsys, "sharp-constant", "--tol", "0")
    assert code == 1 and not json.loads(out)["pass"]


def test_not_converged_exit(capsys):
    code, out = invoke(capsys, "sharp-constant", "--config", "max_refinements=1", "--config",
                       "rel_tol=1e-15", "--config", "abs_tol=1e-300")
    assert code == 4
    assert json.loads(out)["error"] == "NotConverged"


def test_timing_flag():
    rep, _ = run(RunSpec("indices", timing=True))
    assert isinstance(rep.wall_time_ms, int)


def test_sweep(capsys):
    code, out = invoke(capsys, "sweep", "--alphas", "3", "--betas", "0,0.6", "--no-pair")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2
    assert rows[0]["error"] == "" and float(rows[0]["gap"]) < 1e-3
    assert rows[1]["error"] == "inadmissible: beta upper bound"
    assert rows[1]["c_star_ball"] == ""
    code, again = invoke(capsys, "sweep", "--alphas", "3", "--betas", "0,0.6", "--no-pair")
    assert again == out


def test_sweep_grid_shape(monkeypatch, capsys):
    import rhls.sharpconst as sc
    monkeypatch.setattr(sc, "c_star_ball", lambda *a, **k: 1.0)
    monkeypatch.setattr(sc, "c_star_direct", lambda *a, **k: 1.0)
    import rhls.extremals as ex
    monkeypatch.setattr(ex, "el_residual", lambda *a, **k: 0.0)
    code, out = invoke(capsys, "sweep", "--n", "2", "--alphas", "2.5,3,4", "--betas", "0,0.1",
                       "--no-pair")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["alpha"], r["beta"]) for r in rows] == [
        ("2.5", "0"), ("2.5", "0.1"), ("3", "0"), ("3", "0.1"), ("4", "0"), ("4", "0.1")]


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "rhls.cli", "indices"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["values"]["q"] == -4
