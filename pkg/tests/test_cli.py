import csv
import io
import json
import subprocess
import sys

import pytest

from amsfluid import __version__
from amsfluid.cli import main

REF = ["--n", "20", "--lambda", "0.0122448", "--gamma", "0.37987897"]


def run(argv, capsys, environ=None):
    code = main(argv, environ=environ or {})
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_params(capsys):
    code, out, _ = run(["params"] + REF, capsys)
    assert code == 0
    assert out.startswith(f"# amsfluid {__version__} command=params schema=1")
    vals = {r["name"]: float(r["value"]) for r in rows(out)}
    assert vals["c_floor"] == 7
    assert vals["Y0(1)"] == pytest.approx(0.253612, abs=1e-6)


def test_exact_csv_has_17_digits(capsys):
    code, out, _ = run(["exact"] + REF + ["--k", "12", "--x", "1"], capsys)
    assert code == 0
    r = rows(out)[0]
    assert float(r["f_exact"]) == pytest.approx(8.5778e-19, rel=1e-4)
    assert r["f_exact"] == format(float(r["f_exact"]), ".17g")


def test_exact_json_grid(capsys):
    code, out, _ = run(["exact"] + REF + ["--k", "0:3", "--x", "0.5,1", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and len(doc["rows"]) == 8


def test_asymptotic_compare(capsys):
    code, out, _ = run(["asymptotic"] + REF + ["--k", "17", "--x", "1", "--compare-exact"], capsys)
    r = rows(out)[0]
    assert code == 0 and r["region"] == "II"
    assert abs(float(r["relative_gap"])) < 5


def test_asymptotic_all_regions(capsys):
    code, out, _ = run(["asymptotic"] + REF + ["--z", "0.85", "--y", "0.05", "--all-regions"], capsys)
    rs = rows(out)
    assert code == 0 and [r["region"] for r in rs] == ["R1", "R2", "R3", "I", "II", "III", "IV", "V", "VI", "VII", "VIII"]
    assert "OUT_OF_REGION" in rs[2]["flags"]


def test_numeric_failure_exit_1(capsys):
    code, _, err = run(["asymptotic"] + REF + ["--k", "17", "--x", "1", "--region", "R3"], capsys)
    assert code == 1 and "OUT_OF_REGION" in err


def test_usage_errors_exit_2(capsys):
    assert run(["exact"] + REF + ["--k", "1", "--x", "1", "--bogus"], capsys)[0] == 2
    assert run(["nosuch"], capsys)[0] == 2
    assert run(["exact", "--k", "1", "--x", "1"], capsys)[0] == 2
    assert run(["exact"] + REF + ["--k", "1"], capsys)[0] == 2
    assert run(["params"] + REF + ["--c", "7.5"], capsys)[0] == 2


def test_invalid_parameters_exit_2(capsys):
    code, _, err = run(["params", "--n", "20", "--lambda", "0.01", "--c", "7"], capsys)
    assert code == 2 and "INTEGER_C" in err
    code, _, err = run(["params", "--n", "20", "--lambda", "1.0", "--c", "7.5"], capsys)
    assert code == 2 and "UNSTABLE" in err


def test_env_and_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "model.cfg"
    cfg.write_text("# reference model\nn = 20\nlambda = 0.0122448\ngamma = 0.5\n")
    env = {"AMSFLUID_GAMMA": "0.37987897"}
    _, out, _ = run(["params", "--config", str(cfg)], capsys, environ=env)
    vals = {r["name"]: float(r["value"]) for r in rows(out)}
    assert vals["gamma"] == pytest.approx(0.37987897)
    _, out, _ = run(["params", "--config", str(cfg), "--gamma", "0.61"], capsys, environ=env)
    vals = {r["name"]: float(r["value"]) for r in rows(out)}
    assert vals["gamma"] == pytest.approx(0.61)
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign here\n")
    assert run(["params", "--config", str(bad)], capsys)[0] == 2


def test_curves_and_classify(capsys):
    code, out, _ = run(["curves"] + REF + ["--z", "0.4811"], capsys)
    assert code == 0 and float(rows(out)[0]["ystar"]) == pytest.approx(0.05, abs=1e-4)
    code, out, _ = run(["classify"] + REF + ["--y", "0.05", "--z", "0.2,0.6,1.0"], capsys)
    assert [r["region"] for r in rows(out)] == ["R3", "II", "V"]


def test_kernel_dump(capsys):
    code, out, _ = run(["kernel-dump"] + REF + ["--function", "mu", "--function", "Delta", "--theta", "0,1"], capsys)
    rs = rows(out)
    assert code == 0 and float(rs[0]["mu"]) == pytest.approx(0.0, abs=1e-14)
    assert run(["kernel-dump"] + REF + ["--function", "nope"], capsys)[0] == 2


def test_conditional(capsys):
    code, out, _ = run(["conditional"] + REF + ["--given", "sources=15"], capsys)
    assert code == 0 and '"GAUSSIAN"' in out.splitlines()[1]
    code, out, _ = run(["conditional"] + REF + ["--given", "buffer=0.05", "--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["law"]["kind"] == "DISCRETE_BESSEL_MIXTURE"
    assert sum(r["probability"] for r in doc["rows"]) == pytest.approx(1.0, abs=1e-8)
    assert run(["conditional"] + REF + ["--given", "x=3"], capsys)[0] == 2


def test_simulate_small(capsys):
    code, out, _ = run(["simulate", "--n", "6", "--lambda", "0.5", "--c", "2.5", "--horizon", "2e4",
                        "--reps", "4", "--x-grid", "1,2", "--compare-exact", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and 0 <= doc["report"]["coverage"] <= 1 and len(doc["rows"]) == 14


def test_tables_to_directory(tmp_path, capsys):
    code, _, _ = run(["tables"] + REF + ["--out", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "table1.csv" in names and "table2.csv" in names and "fig_log_density_x0001.csv" in names
    t1 = rows((tmp_path / "table1.csv").read_text())
    assert len(t1) == 10


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "amsfluid", "params"] + REF, capture_output=True, text=True)
    assert res.returncode == 0 and "gamma" in res.stdout
