"""Waveform grammar, INI round-trip, and the CLI contract."""

import os
import subprocess
import sys

import numpy as np
import pytest

from frontspeed.config import (
    ProblemConfig,
    allee_extrema,
    build_coefficients,
    build_grid,
    build_reaction,
    parse_config,
    parse_waveform,
    to_ini,
)
from frontspeed.errors import ConfigError

CLI = [sys.executable, "-m", "frontspeed.cli"]


def run_cli(*args, cwd=None):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, cwd=cwd)


def test_waveform_constant():
    w = parse_waveform("1.5")
    assert w.kind == "constant"
    assert w.extrema() == (1.5, 1.5)
    assert np.allclose(w.sample(np.linspace(0, 1, 5), 1.0), 1.5)


def test_waveform_sin2():
    w = parse_waveform("5 + 2*sin^2(2*pi*x/L)")
    assert w.kind == "sin2"
    assert w.extrema() == (5.0, 7.0)
    x = np.linspace(0.0, 1.0, 401)
    vals = w.sample(x, 1.0)
    assert vals.min() == pytest.approx(5.0, abs=1e-6)
    assert vals.max() == pytest.approx(7.0, abs=1e-6)
    # 'sin2' spelling also accepted
    assert parse_waveform("5 + 2*sin2(2*pi*x/L)") == w


def test_waveform_shifted_sine():
    w = parse_waveform("1 + 0.5*sin(2*pi*x/L + 0.25)")
    assert w.kind == "sin"
    assert w.extrema() == (0.5, 1.5)
    assert w.sample(np.array([0.0]), 1.0)[0] == pytest.approx(1.0 + 0.5 * np.sin(0.25))


def test_waveform_rejects_garbage():
    for bad in ("sin(x)", "1 + 2*cos(2*pi*x/L)", "", "two"):
        with pytest.raises(ConfigError):
            parse_waveform(bad)


def test_waveform_roundtrip():
    for spec in ("1.5", "5 + 2*sin^2(2*pi*x/L)", "1 + 0.5*sin(2*pi*x/L + 0.25)"):
        w = parse_waveform(spec)
        assert parse_waveform(w.to_spec()) == w


def test_config_roundtrip():
    ini = """
[problem]
advection_q = 1.0
a = 5 + 2*sin^2(2*pi*x/L)
n_cells = 128

[simulation]
t_end = 40
sides = left

[selection]
epsilon_ladder = 0.01, 0.1, 0.3

[recursion]
c_lo = 2.0
c_hi = 3.5
"""
    config = parse_config(ini)
    assert config.problem.advection_q == 1.0
    assert config.selection.epsilon_ladder == [0.01, 0.1, 0.3]
    assert config.simulation.sides == ["left"]
    assert parse_config(to_ini(config)) == config


def test_config_rejects_unknown_section():
    with pytest.raises(ConfigError):
        parse_config("[mystery]\nx = 1\n")


def test_config_rejects_nonpositive_allee():
    with pytest.raises(ConfigError):
        parse_config("[problem]\na = -1.0\n")
    with pytest.raises(ConfigError):
        parse_config("[problem]\na = 1 + 2*sin(2*pi*x/L)\n")  # dips to -1


def test_allee_extrema_exact():
    config = parse_config("[problem]\na = 5 + 2*sin^2(2*pi*x/L)\n")
    assert allee_extrema(config) == (5.0, 7.0)


def test_eta_override_consistency_gate():
    config = parse_config("[problem]\neta = 2.0\n")
    grid = build_grid(config)
    reaction = build_reaction(config, grid)
    # linear analysis accepts the override
    coeffs = build_coefficients(config, grid, reaction)
    assert np.allclose(coeffs.eta, 2.0)
    # nonlinear commands reject it (reaction has eta = 1)
    with pytest.raises(ConfigError):
        build_coefficients(config, grid, reaction, require_reaction_consistent=True)


@pytest.fixture()
def fast_ini(tmp_path):
    path = tmp_path / "prob.ini"
    path.write_text(
        """
[problem]
advection_q = 0.0
a = 8.0

[simulation]
domain_periods = 240
n_points = 3000
t_end = 20
sides = left

[output]
out_dir = .
"""
    )
    return path


def test_cli_dispersion_writes_outputs(fast_ini, tmp_path):
    out = tmp_path / "out"
    result = run_cli("--config", str(fast_ini), "--out-dir", str(out), "dispersion")
    assert result.returncode == 0, result.stderr
    c0_line = next(line for line in result.stdout.splitlines() if line.startswith("c0 ="))
    assert float(c0_line.split("=")[1]) == pytest.approx(2.0, abs=1e-9)
    assert (out / "dispersion_sweep.csv").exists()
    assert (out / "dispersion_report.txt").exists()
    header = (out / "dispersion_sweep.csv").read_text().splitlines()[0]
    assert header == "lambda,k,k_over_lambda"


def test_cli_outputs_deterministic(fast_ini, tmp_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    for out in (out1, out2):
        result = run_cli("--config", str(fast_ini), "--out-dir", str(out), "select")
        assert result.returncode == 0, result.stderr
    for name in ("selection_report.txt", "selection_grid_linear.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cli_simulate(fast_ini, tmp_path):
    out = tmp_path / "sim"
    result = run_cli("--config", str(fast_ini), "--out-dir", str(out), "simulate")
    assert result.returncode == 0, result.stderr
    assert (out / "front_left.txt").exists()
    text = (out / "front_left.txt").read_text()
    assert "classification = pushed" in text


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[problem]\neta = -0.5\n")
    assert run_cli("--config", str(bad), "dispersion").returncode == 2

    broken = tmp_path / "broken.ini"
    broken.write_text("no sections here")
    assert run_cli("--config", str(broken), "dispersion").returncode == 1

    missing = tmp_path / "nope.ini"
    assert run_cli("--config", str(missing), "dispersion").returncode == 1

    # domain too small for the front: simulation failure
    small = tmp_path / "small.ini"
    small.write_text(
        "[problem]\na = 8.0\n\n[simulation]\ndomain_periods = 60\nn_points = 1200\n"
        "t_end = 20\nsides = left\n"
    )
    assert run_cli("--config", str(small), "simulate").returncode == 3


def test_cli_requires_config_for_analysis():
    result = run_cli("dispersion")
    assert result.returncode == 1
    assert "requires --config" in result.stderr


def test_cli_snapshots(tmp_path):
    ini = tmp_path / "snap.ini"
    ini.write_text(
        "[problem]\na = 1.0\n\n[simulation]\ndomain_periods = 120\nn_points = 1500\n"
        "t_end = 10\nsides = left\nsnapshot_stride = 500\n"
    )
    out = tmp_path / "out"
    result = run_cli("--config", str(ini), "--out-dir", str(out), "simulate")
    assert result.returncode == 0, result.stderr
    snap = (out / "snapshots.csv").read_text().splitlines()
    assert snap[0] == "t,x,u"
    assert len(snap) > 1500


def test_cli_reproduce_exit_code_on_failures(monkeypatch, tmp_path):
    # exit 4 when the benchmark matrix reports failed assertions
    import frontspeed.cli as cli
    from frontspeed.schemas import ReproducePayload, ReproduceRow

    row = ReproduceRow(
        a="8", q=0.0, c0=2.0, verdict="nonlinear", bound_lower=2.5, bound_upper=2.5,
        simulated_speed=2.1, decay_classification="pushed", expected_speed=2.5,
        failures=["a=8 q=0: simulated speed 2.1 outside 2.5 +- 2%"],
    )
    canned = ReproducePayload(
        rows=[row], failures=row.failures, table_text="table\n", summary_csv="a,q\n8,0\n"
    )
    monkeypatch.setattr(cli, "run_reproduction", lambda threads: canned)
    code = cli.main(["--out-dir", str(tmp_path), "reproduce-paper"])
    assert code == 4
    assert (tmp_path / "reproduction_summary.csv").exists()
    report = (tmp_path / "reproduction_report.txt").read_text()
    assert "failed assertions" in report


def test_cli_reproduce_exit_zero_on_clean(monkeypatch, tmp_path):
    import frontspeed.cli as cli
    from frontspeed.schemas import ReproducePayload

    canned = ReproducePayload(rows=[], failures=[], table_text="table\n", summary_csv="a,q\n")
    monkeypatch.setattr(cli, "run_reproduction", lambda threads: canned)
    assert cli.main(["--out-dir", str(tmp_path), "reproduce-paper"]) == 0
