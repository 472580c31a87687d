"""End-to-end tests of the command-line interface.

Commands run in-process through ``cli.main`` so output and exit codes can
be asserted cheaply; one subprocess test covers the real argv plumbing.
Pulse files are produced once per module by the CLI itself, at its own
defaults (N = 128), so these tests exercise the shipped configuration
rather than the finer test fixtures used elsewhere.
"""

from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from shpulse import cli
from shpulse.cli import RunConfig, UsageError, build_config
from shpulse.conjugate import trust_horizon
from shpulse.lagrangian import sandwich_train_contains
from shpulse.pulse import load

EXPECTED_HEADER = "x,detA,P12,P13,P14,P23,P24,P34,omega_drift"


# ---------------------------------------------------------------------------
# pulse files produced by the CLI itself (module scope: solved once)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def _solve(workdir, name, *flags):
    out = workdir / name
    rc = cli.main(["pulse", *flags, "--out", str(out)])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def phi0_file(workdir):
    return _solve(workdir, "phi0.json", "--nu", "1.6", "--mu", "0.05",
                  "--phi", "0")


@pytest.fixture(scope="module")
def phipi_file(workdir):
    return _solve(workdir, "phipi.json", "--nu", "1.6", "--mu", "0.05",
                  "--phi", repr(np.pi))


@pytest.fixture(scope="module")
def snaking_file(workdir):
    return _solve(workdir, "snaking.json", "--nu", "1.6", "--mu", "0.20",
                  "--phi", "0", "--scale", "3")


def _plucker_rows(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    P = np.array([[float(r[k]) for k in
                   ("P12", "P13", "P14", "P23", "P24", "P34")] for r in rows])
    return x, P


def _train_entries(x, P):
    """Interpolated points where the trajectory crosses ``P14 = 0``."""
    p14 = P[:, 2]
    entries = []
    for i in range(len(x) - 1):
        if p14[i] * p14[i + 1] < 0:
            t = p14[i] / (p14[i] - p14[i + 1])
            entries.append((x[i] + t * (x[i + 1] - x[i]),
                            P[i] + t * (P[i + 1] - P[i])))
    return entries


# ---------------------------------------------------------------------------
# pulse command
# ---------------------------------------------------------------------------


def test_pulse_solves_and_reports(phi0_file, capsys):
    pulse = load(phi0_file)
    assert pulse.residual_norm < 1e-12
    assert pulse.N == 128 and pulse.L_f == 100.0
    rc = cli.main(["pulse", "--nu", "1.6", "--mu", "0.05", "--phi", "0",
                   "--out", str(phi0_file)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "residual sup-norm" in out
    assert "coefficient tail" in out


def test_pulse_snaking_converges(snaking_file):
    pulse = load(snaking_file)
    assert pulse.residual_norm < 1e-12
    # the large-amplitude branch, not the small seed the solver started from
    from shpulse.pulse import evaluate
    assert evaluate(pulse, 0.0) == pytest.approx(1.0983, abs=1e-3)


def test_pulse_missing_flag_is_usage_error(capsys):
    rc = cli.main(["pulse", "--nu", "1.6", "--mu", "0.05"])
    assert rc == 2
    assert "phi" in capsys.readouterr().err


def test_pulse_newton_failure_exits_one(tmp_path, capsys):
    # overblown seeds contract by 2/3 per step, so this cannot reach the
    # tolerance inside the iteration budget
    out = tmp_path / "bad.json"
    rc = cli.main(["pulse", "--nu", "1.6", "--mu", "0.05", "--phi", "0",
                   "--scale", "1e12", "--N", "16", "--out", str(out)])
    assert rc == 1
    assert "no convergence" in capsys.readouterr().err
    assert not out.exists()


# ---------------------------------------------------------------------------
# spectrum command
# ---------------------------------------------------------------------------


def test_spectrum_unstable_phi0(phi0_file, capsys):
    assert cli.main(["spectrum", str(phi0_file)]) == 0
    out = capsys.readouterr().out
    assert "0.1209" in out


def test_spectrum_unstable_phipi(phipi_file, capsys):
    assert cli.main(["spectrum", str(phipi_file)]) == 0
    out = capsys.readouterr().out
    assert "0.0058" in out and "0.1179" in out


def test_spectrum_stable_prints_none(snaking_file, capsys):
    assert cli.main(["spectrum", str(snaking_file)]) == 0
    assert "none" in capsys.readouterr().out


def test_spectrum_missing_file_exits_one(capsys):
    assert cli.main(["spectrum", "no-such-pulse.json"]) == 1
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# conjugate command
# ---------------------------------------------------------------------------


def test_conjugate_phi0_one_point(phi0_file, capsys):
    assert cli.main(["conjugate", str(phi0_file)]) == 0
    out = capsys.readouterr().out
    assert "MATCH" in out
    table = [ln for ln in out.splitlines() if ln.strip().startswith("1.2")]
    assert len(table) == 1
    x_star = float(table[0].split()[0])
    assert x_star == pytest.approx(1.24, abs=5e-2)


def test_conjugate_phipi_two_points(phipi_file, capsys):
    assert cli.main(["conjugate", str(phipi_file)]) == 0
    out = capsys.readouterr().out
    assert "2 unstable eigenvalue(s) vs 2 conjugate point(s) -> MATCH" in out


def test_conjugate_stable_zero_points(snaking_file, capsys):
    assert cli.main(["conjugate", str(snaking_file)]) == 0
    out = capsys.readouterr().out
    assert "0 unstable eigenvalue(s) vs 0 conjugate point(s) -> MATCH" in out


def test_conjugate_export_matches_header(phi0_file, workdir, capsys):
    out = workdir / "phi0_traj.csv"
    assert cli.main(["conjugate", str(phi0_file), "--out", str(out)]) == 0
    capsys.readouterr()
    with open(out, encoding="utf-8") as fh:
        assert fh.readline().strip() == EXPECTED_HEADER


def test_conjugate_report_is_deterministic(phi0_file, capsys):
    assert cli.main(["conjugate", str(phi0_file)]) == 0
    first = capsys.readouterr().out
    assert cli.main(["conjugate", str(phi0_file)]) == 0
    second = capsys.readouterr().out
    assert first == second


# ---------------------------------------------------------------------------
# plucker command
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def plucker_csvs(workdir, phi0_file, phipi_file, snaking_file):
    paths = {}
    for name, src in (("phi0", phi0_file), ("phipi", phipi_file),
                      ("snaking", snaking_file)):
        out = workdir / f"{name}_plucker.csv"
        assert cli.main(["plucker", str(src), "--out", str(out)]) == 0
        paths[name] = out
    return paths


def test_plucker_rows_unit_norm(plucker_csvs):
    for path in plucker_csvs.values():
        _, P = _plucker_rows(path)
        assert np.max(np.abs(np.linalg.norm(P, axis=1) - 1.0)) < 1e-12


def test_plucker_stable_pulse_avoids_singular_point(plucker_csvs):
    _, P = _plucker_rows(plucker_csvs["snaking"])
    e23 = np.zeros(6)
    e23[3] = 1.0
    dist = np.minimum(np.linalg.norm(P - e23, axis=1),
                      np.linalg.norm(P + e23, axis=1))
    assert float(dist.min()) > 0.1


def test_plucker_train_entries_match_conjugate_counts(plucker_csvs):
    for name, expected in (("phi0", 1), ("phipi", 2)):
        x, P = _plucker_rows(plucker_csvs[name])
        entries = _train_entries(x, P)
        assert len(entries) == expected
        for _, pt in entries:
            assert sandwich_train_contains((pt[0], pt[1], 0.0), atol=1e-2)


def test_plucker_stable_sign_changes_only_past_horizon(plucker_csvs,
                                                       snaking_file):
    # at the CLI's own resolution the transported plane detaches from the
    # true one far inside the window; everything before the horizon is clean
    x, P = _plucker_rows(plucker_csvs["snaking"])
    horizon = trust_horizon(load(snaking_file))
    for x_star, _ in _train_entries(x, P):
        assert x_star > horizon


def test_plucker_stdout_when_no_out(phi0_file, capsys):
    assert cli.main(["plucker", str(phi0_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].strip() == EXPECTED_HEADER
    assert len(lines) == 2402


# ---------------------------------------------------------------------------
# verify command
# ---------------------------------------------------------------------------


def test_verify_quick_passes(capsys):
    assert cli.main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


# ---------------------------------------------------------------------------
# configuration handling
# ---------------------------------------------------------------------------


def test_config_defaults_match_published_settings():
    cfg = RunConfig()
    assert cfg.L_f == 100.0
    assert cfg.L_cp == 60.0
    assert cfg.N == 128
    assert cfg.simplicity_threshold == 1e-3


def test_config_validation():
    with pytest.raises(ValueError, match="positive"):
        RunConfig(simplicity_threshold=0.0)
    with pytest.raises(ValueError, match="positive"):
        RunConfig(degeneracy_tol=-1e-6)
    with pytest.raises(ValueError, match="exceeds"):
        RunConfig(L_cp=120.0, L_f=100.0)


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nu": 1.6, "mu": 0.05, "phi": 0.0, "N": 64}))
    out = tmp_path / "from_config.json"
    rc = cli.main(["pulse", "--config", str(cfg), "--N", "96",
                   "--out", str(out)])
    assert rc == 0
    capsys.readouterr()
    pulse = load(out)
    assert pulse.N == 96  # flag wins over the file
    assert pulse.params.nu == 1.6 and pulse.params.mu == 0.05


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"window": 60}))
    with pytest.raises(UsageError, match="unknown config key"):
        build_config(str(cfg), {})


def test_config_invalid_values_exit_two(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"L_cp": 200.0}))
    rc = cli.main(["conjugate", "whatever.json", "--config", str(cfg)])
    assert rc == 2
    assert "usage error" in capsys.readouterr().err


def test_lcp_flag_shrinks_window(phi0_file, capsys):
    assert cli.main(["plucker", str(phi0_file), "--Lcp", "20"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].split(",")[0] == "-20.0"
    assert len(lines) == 802


# ---------------------------------------------------------------------------
# process-level behaviour
# ---------------------------------------------------------------------------


def test_subprocess_spectrum_roundtrip(phi0_file):
    proc = subprocess.run(
        [sys.executable, "-m", "shpulse.cli", "spectrum", str(phi0_file)],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "0.1209" in proc.stdout


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
