"""End-to-end command-line tests: exit codes, artifacts, reproducibility."""

import json
import math
import subprocess

import numpy as np
import pytest

from spsregion import FirConfig, NoiseModel, PacBoundInputs, gen_fir, size_bound
from spsregion.cli import _load_config, main
from spsregion.problem import RegressionData, save_csv


def _write_fir_csv(tmp_path, n=80, seed=12):
    fir = gen_fir(FirConfig(n=n, seed=seed, noise=NoiseModel.laplace(1.0)))
    path = tmp_path / "data.csv"
    save_csv(fir.data, path)
    return path


# ----------------------------------------------------------------- region

def test_region_end_to_end(tmp_path):
    data = _write_fir_csv(tmp_path)
    out = tmp_path / "out"
    code = main(["region", str(data), "--p", "0.9", "--lambda", "10",
                 "--seed", "5", "--out", str(out)])
    assert code == 0
    rec = json.loads((out / "region.json").read_text())
    assert rec["meta"]["version"]
    assert rec["meta"]["seed"] == 5
    assert len(rec["meta"]["config_sha256"]) == 16
    assert rec["sps"] == {"m": 10, "q": 1, "n": 80, "seed": 5}
    assert rec["status"] == "ok"
    assert isinstance(rec["ellipsoid"]["radius_sq"], float)
    lines = (out / "region_boundary.csv").read_text().strip().split("\n")
    assert lines[0] == "theta1,theta2,lambda,series"
    assert len(lines) == 361
    assert (out / "region.png").stat().st_size > 0


def test_region_reruns_are_byte_identical(tmp_path):
    data = _write_fir_csv(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["region", str(data), "--seed", "7",
                     "--out", str(out)]) == 0
    for name in ("region.json", "region_boundary.csv", "region.png"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_region_csv_echo(tmp_path, capsys):
    data = _write_fir_csv(tmp_path)
    code = main(["region", str(data), "--seed", "5",
                 "--out", str(tmp_path / "o"), "--format", "csv"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert stdout.startswith("theta1,theta2,lambda,series\n")


def test_region_unbounded_exit_code(tmp_path):
    path = tmp_path / "one.csv"
    save_csv(RegressionData([[2.0]], [3.0]), path)
    out = tmp_path / "o"
    code = main(["region", str(path), "--p", "0.5", "--lambda", "10",
                 "--seed", "1", "--out", str(out)])
    assert code == 2
    rec = json.loads((out / "region.json").read_text())
    assert rec["status"] == "unbounded"
    assert rec["ellipsoid"]["radius_sq"] == "inf"
    assert not (out / "region.png").exists()


def test_region_bad_cell_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("phi1,phi2,y\n1.0,2.0,3.0\noops,2.0,3.0\n")
    code = main(["region", str(path), "--out", str(tmp_path / "o")])
    assert code == 1
    err = capsys.readouterr().err
    assert "line 3" in err and "oops" in err


def test_region_coarse_confidence_level(tmp_path):
    data = _write_fir_csv(tmp_path, n=120)
    out = tmp_path / "o"
    code = main(["region", str(data), "--p", "0.37", "--seed", "5",
                 "--out", str(out)])
    assert code == 0
    rec = json.loads((out / "region.json").read_text())
    assert rec["sps"]["m"] == 100 and rec["sps"]["q"] == 63


def test_region_irrational_confidence_level(tmp_path, capsys):
    data = _write_fir_csv(tmp_path)
    code = main(["region", str(data), "--p", "0.123456789",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "0.123456789" in capsys.readouterr().err


def test_region_missing_file(tmp_path, capsys):
    code = main(["region", str(tmp_path / "absent.csv"),
                 "--out", str(tmp_path / "o")])
    assert code == 1


# ------------------------------------------------------------------ bound

def test_bound_report_fields(tmp_path, capsys):
    code = main(["bound", "--n", "500", "--d", "2", "--delta", "0.5",
                 "--sigma", "1.1547", "--lambda", "10", "--ell", "2.83",
                 "--kappa", "5.0", "--lambda-min-r-tilde", "900",
                 "--out", str(tmp_path)])
    assert code == 0
    rec = json.loads((tmp_path / "bound.json").read_text())
    for key in ("min_sample_size", "size_bound", "perturbation_norm_bound",
                "gram_ratio_bound", "noise_quadratic_bound"):
        assert key in rec
    assert rec["size_bound"] > 0.0
    stdout = capsys.readouterr().out
    assert json.loads(stdout)["size_bound"] == rec["size_bound"]


def test_bound_small_sample_exit(tmp_path, capsys):
    code = main(["bound", "--n", "50", "--d", "2", "--delta", "0.5",
                 "--sigma", "1.0", "--ell", "1.0", "--kappa", "3.0"])
    assert code == 1
    assert "minimum sample size: 60" in capsys.readouterr().err


def test_bound_matches_library(capsys):
    code = main(["bound", "--n", "500", "--d", "2", "--delta", "0.5",
                 "--sigma", "1.0", "--ell", "2.0", "--kappa", "3.0"])
    assert code == 0
    rec = json.loads(capsys.readouterr().out)
    expected = size_bound(PacBoundInputs(
        n=500, d=2, delta=0.5, m=10, q=1, sigma=1.0, lam=0.0, ell=2.0,
        kappa=3.0))
    assert rec["size_bound"] == pytest.approx(expected, rel=1e-12)


# --------------------------------------------------------------- coverage

def test_coverage_command(tmp_path, capsys):
    config = tmp_path / "cov.json"
    config.write_text(json.dumps(
        {"region": "indicator", "n": 50, "trials": 40, "p": 0.9, "seed": 3}))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["coverage", "--config", str(config), "--out", str(out),
                     "--threads", "2"]) == 0
        capsys.readouterr()
    rec = json.loads((out_a / "coverage.json").read_text())
    assert rec["trials"] == 40
    assert 0.0 <= rec["coverage"] <= 1.0
    assert rec["meta"]["seed"] == 3
    assert len(rec["ci99"]) == 2
    for name in ("coverage.json", "coverage.png"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_coverage_seed_override(tmp_path, capsys):
    config = tmp_path / "cov.json"
    config.write_text(json.dumps(
        {"region": "indicator", "n": 50, "trials": 40, "p": 0.9, "seed": 3}))
    out = tmp_path / "o"
    assert main(["coverage", "--config", str(config), "--out", str(out),
                 "--seed", "9"]) == 0
    capsys.readouterr()
    rec = json.loads((out / "coverage.json").read_text())
    assert rec["meta"]["seed"] == 9 and rec["config"]["seed"] == 9


# ------------------------------------------------------------------ table

def test_table_command(tmp_path, capsys):
    config = tmp_path / "tab.json"
    config.write_text(json.dumps({"n_grid": [60], "s": 2, "seed": 11}))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["table", "--config", str(config), "--out", str(out),
                     "--threads", "2"]) == 0
        capsys.readouterr()
    csv_text = (out_a / "table.csv").read_text()
    assert csv_text.startswith("n,emp_sps_eoa,emp_rr_sps_eoa,th_sps_eoa,"
                               "th_rr_sps_eoa,emp_asymptotic\n")
    rec = json.loads((out_a / "table.json").read_text())
    assert rec["rows"][0]["n"] == 60
    for name in ("table.csv", "table.json", "table.png"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


# ------------------------------------------------------------------ sweep

def test_sweep_command_with_bundled_config(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["sweep", "--config", "fig1.json", "--out", str(out),
                 "--seed", "1234"])
    assert code == 0
    capsys.readouterr()
    rec = json.loads((out / "sweep.json").read_text())
    assert [e["lambda"] for e in rec["entries"]] == [25.0, 75.0]
    lines = (out / "sweep_polylines.csv").read_text().strip().split("\n")
    assert lines[0] == "theta1,theta2,lambda,series"
    series = [line.rsplit(",", 1)[1] for line in lines[1:]]
    assert series.count("0") == 360 and series.count("1") == 360
    assert (out / "sweep.png").stat().st_size > 0


def test_bundled_configs_resolve():
    table = _load_config("table4.json")
    assert table["n_grid"] == [250, 500, 1000, 1500, 2000]
    assert table["lambda"] == 10.0 and table["s"] == 100
    fig = _load_config("fig1.json")
    assert fig["n"] == 250 and fig["lambdas"] == [25.0, 75.0]
    with pytest.raises(Exception):
        _load_config("missing.json")


# ------------------------------------------------------------- entry point

def test_console_script_version():
    proc = subprocess.run(["spsregion", "--version"], capture_output=True,
                          text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip()


def test_console_script_region(tmp_path):
    data = _write_fir_csv(tmp_path)
    out = tmp_path / "o"
    proc = subprocess.run(
        ["spsregion", "region", str(data), "--seed", "5", "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (out / "region.json").exists()
