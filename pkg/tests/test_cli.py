"""
Tests for the qfisher command-line interface.
"""

import csv
import io
import json
import os
import shutil
import tempfile

import pytest
from click.testing import CliRunner

from qfisher import __version__
from qfisher.cli import cli
from qfisher.config import ENV_DEFAULT_GRID


@pytest.fixture
def runner():
    """Click test runner."""
    return CliRunner()


@pytest.fixture
def output_dir():
    """Temporary directory for --out files."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


def invoke_json(runner, args, expected_exit=0, **kwargs):
    """Run a command and parse its JSON report from standard output."""
    result = runner.invoke(cli, args, **kwargs)
    assert result.exit_code == expected_exit, result.output
    return json.loads(result.stdout)


def invoke_csv(runner, args, expected_exit=0):
    """Run a command with --format csv and parse the rows."""
    result = runner.invoke(cli, args + ["--format", "csv"])
    assert result.exit_code == expected_exit, result.output
    return list(csv.DictReader(io.StringIO(result.stdout, newline="")))


def test_version(runner):
    """Test --version."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_no_subcommand_prints_help(runner):
    """Test the bare group."""
    result = runner.invoke(cli, [])
    assert result.exit_code == 0
    assert "kl-scan" in result.stdout


def test_fisher_unit_gaussian(runner):
    """Test both Fisher routes on gaussian(1)."""
    data = invoke_json(runner, ["fisher", "--state", "gaussian:1", "--grid=-8:8:1025"])
    assert data["command"] == "fisher"
    assert data["parameters"]["grid"] == "-8:8:1025"
    result = data["result"]
    assert result["location"]["value"] == pytest.approx(1.0, abs=1e-6)
    assert result["location"]["method"] == "log_derivative"
    assert result["amplitude"]["value"] == pytest.approx(1.0, abs=1e-6)
    assert result["momentum_identity"]["relative_gap"] < 1e-6


def test_fisher_scale_law(runner):
    """Test gaussian:2 on its natural grid."""
    data = invoke_json(runner, ["fisher", "--state", "gaussian:2"])
    assert data["parameters"]["grid"] == "-24:24:2049"
    assert data["result"]["location"]["value"] == pytest.approx(0.25, abs=1e-6)
    assert data["result"]["amplitude"]["value"] == pytest.approx(0.25, abs=1e-6)


def test_fisher_csv_rows(runner):
    """Test the key/value CSV view."""
    rows = invoke_csv(runner, ["fisher", "--grid=-8:8:1025"])
    values = {row["quantity"]: float(row["value"]) for row in rows}
    assert values["fisher_log_derivative"] == pytest.approx(1.0, abs=1e-6)
    assert values["identity_lhs"] == pytest.approx(values["identity_rhs"], rel=1e-6)


def test_even_grid_is_a_usage_error(runner):
    """Test exit code 2 and a message naming the grid."""
    result = runner.invoke(cli, ["fisher", "--grid=-8:8:1024"])
    assert result.exit_code == 2
    assert "grid" in result.stderr
    assert result.stdout == ""


def test_grid_from_environment(runner):
    """Test the QFISHER_DEFAULT_GRID fallback."""
    data = invoke_json(runner, ["fisher"], env={ENV_DEFAULT_GRID: "-8:8:1025"})
    assert data["parameters"]["grid"] == "-8:8:1025"


def test_state_too_wide_for_grid(runner):
    """Test that an unadmissible state is a usage error."""
    result = runner.invoke(cli, ["fisher", "--state", "gaussian:3", "--grid=-8:8:1025"])
    assert result.exit_code == 2


@pytest.mark.parametrize("args", [["--state", "lorentzian"], ["--hbar", "0"], ["--seed", "-3"]])
def test_invalid_options_exit_2(runner, args):
    """Test configuration errors."""
    assert runner.invoke(cli, ["fisher"] + args).exit_code == 2


def test_kl_scan_gaussian(runner):
    """Test that Gaussian residuals vanish over the default shifts."""
    rows = invoke_csv(runner, ["kl-scan", "--state", "gaussian:1"])
    assert list(rows[0]) == ["delta", "kl", "quadratic", "residual"]
    assert len(rows) == 10
    assert all(abs(float(row["residual"])) < 1e-8 for row in rows)


def test_kl_scan_json_has_curvature(runner):
    """Test the structured kl-scan result."""
    data = invoke_json(runner, ["kl-scan", "--grid=-8:8:1025"])
    result = data["result"]
    assert result["curvature"] == pytest.approx(result["fisher_information"] / 2.0, rel=0.01)
    assert len(result["shifts"]) == len(result["residuals"]) == 10


def test_kl_scan_explicit_deltas(runner):
    """Test --deltas and the window's shrinking remainder."""
    rows = invoke_csv(
        runner,
        ["kl-scan", "--state", "cosine_window:4", "--grid=-4:4:1025", "--deltas", "0.0625,0.125,0.25"],
    )
    ratios = [abs(float(r["residual"])) / float(r["delta"]) ** 2 for r in rows]
    assert ratios[0] <= 0.25 * ratios[2]
    assert ratios[0] < ratios[1] < ratios[2]


def test_kl_scan_few_deltas_has_no_curvature(runner):
    """Test that the fit is skipped for short scans."""
    data = invoke_json(runner, ["kl-scan", "--grid=-8:8:1025", "--deltas", "0.125,0.25"])
    assert data["result"]["curvature"] is None


def test_kl_scan_off_lattice_delta(runner):
    """Test exit 2 for a shift between samples."""
    result = runner.invoke(cli, ["kl-scan", "--grid=-8:8:1025", "--deltas", "0.01"])
    assert result.exit_code == 2


def test_kl_scan_malformed_deltas(runner):
    """Test exit 2 for non-numeric shifts."""
    assert runner.invoke(cli, ["kl-scan", "--deltas", "a,b"]).exit_code == 2


def test_uncertainty_gaussian(runner):
    """Test saturation for gaussian:1."""
    data = invoke_json(runner, ["uncertainty", "--state", "gaussian:1"])
    result = data["result"]
    assert result["product"] == pytest.approx(0.5, abs=1e-6)
    assert result["saturates_bound"] is True
    assert result["heisenberg_satisfied"] is True
    assert result["score_linearity"]["residual_fraction"] < 1e-8


def test_uncertainty_double_gaussian(runner):
    """Test a non-Gaussian state."""
    data = invoke_json(runner, ["uncertainty", "--state", "double_gaussian:4:0.5"])
    assert data["result"]["product"] > 0.5
    assert data["result"]["saturates_bound"] is False


def test_uncertainty_hbar_scaling(runner):
    """Test --hbar 2."""
    rows = invoke_csv(runner, ["uncertainty", "--hbar", "2"])
    values = {row["quantity"]: row["value"] for row in rows}
    assert float(values["product"]) == pytest.approx(1.0, abs=1e-6)
    assert float(values["bound"]) == 1.0
    assert values["saturates_bound"] == "true"


@pytest.mark.parametrize("hbar", ["4", "10"])
def test_uncertainty_gaussian_large_hbar(runner, hbar):
    """Test that the minimum-uncertainty packet passes at large hbar."""
    data = invoke_json(runner, ["uncertainty", "--state", "gaussian:1", "--hbar", hbar])
    assert data["result"]["heisenberg_satisfied"] is True
    assert data["result"]["saturates_bound"] is True


def test_gaussian_min_csv(runner):
    """Test the default probe: minimum at amplitude 0."""
    rows = invoke_csv(runner, ["gaussian-min"])
    assert [float(r["amplitude"]) for r in rows] == [-0.2, -0.1, 0.0, 0.1, 0.2]
    products = [float(r["product"]) for r in rows]
    assert min(products) == products[2]
    assert products[2] == pytest.approx(0.5, abs=1e-6)


def test_gaussian_min_single_amplitude(runner):
    """Test --amplitudes 0 with hbar 2."""
    data = invoke_json(runner, ["gaussian-min", "--amplitudes", "0", "--hbar", "2"])
    assert data["result"]["minimum_at_zero"] is True
    assert data["result"]["points"][0]["product"] == pytest.approx(1.0, abs=1e-6)


def test_gaussian_min_wide_packet_reports_errors_per_amplitude(runner):
    """Test that sign-flipping amplitudes become error rows instead of aborting."""
    rows = invoke_csv(runner, ["gaussian-min", "--state", "gaussian:3"])
    assert list(rows[0]) == ["amplitude", "product", "error"]
    assert [r["product"] == "" for r in rows] == [True, True, False, False, False]
    assert all(r["error"] for r in rows[:2])
    assert float(rows[2]["product"]) == pytest.approx(0.5, abs=1e-6)


def test_gaussian_min_json_error_points(runner):
    """Test the JSON view of an inadmissible amplitude."""
    data = invoke_json(runner, ["gaussian-min", "--amplitudes=-0.4,0,0.1"])
    first = data["result"]["points"][0]
    assert first["product"] is None
    assert "positive" in first["error"]
    assert data["result"]["minimum_at_zero"] is True


def test_gaussian_min_requires_gaussian(runner):
    """Test that other states are rejected."""
    assert runner.invoke(cli, ["gaussian-min", "--state", "sech:1"]).exit_code == 2


def test_gaussian_min_requires_zero(runner):
    """Test that the reference amplitude is mandatory."""
    assert runner.invoke(cli, ["gaussian-min", "--amplitudes", "0.1,0.2"]).exit_code == 2


def test_cr_sim_report(runner):
    """Test the estimator report fields."""
    args = ["cr-sim", "--estimator", "mean", "--n", "50", "--trials", "1000", "--seed", "42"]
    data = invoke_json(runner, args)
    result = data["result"]
    assert result["estimator"] == "sample_mean"
    assert result["n_samples"] == 50
    assert result["n_trials"] == 1000
    assert result["seed"] == 42
    assert result["bound_satisfied"] is True
    assert "estimates" not in result
    assert data["parameters"]["estimator"] == "sample_mean"


def test_cr_sim_bound_violation_exits_1(runner):
    """Test that a shrunk mean judged against the unbiased bound fails."""
    args = ["cr-sim", "--estimator", "shrunk:0.5", "--n", "50", "--trials", "1000", "--assume-unbiased"]
    data = invoke_json(runner, args, expected_exit=1)
    assert data["result"]["bound_satisfied"] is False


@pytest.mark.parametrize(
    "args",
    [["--trials", "10"], ["--estimator", "mode"], ["--n", "0"], ["--theta", "0.3"]],
)
def test_cr_sim_usage_errors(runner, args):
    """Test invalid Monte Carlo requests."""
    assert runner.invoke(cli, ["cr-sim", "--trials", "1000"] + args).exit_code == 2


def test_cr_sim_trials_csv(runner, output_dir):
    """Test the per-trial dump."""
    path = os.path.join(output_dir, "trials.csv")
    args = ["cr-sim", "--n", "5", "--trials", "1000", "--trials-csv", path]
    invoke_json(runner, args)
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1000
    assert list(rows[0]) == ["trial", "estimate"]
    assert rows[-1]["trial"] == "999"


def test_out_file(runner, output_dir):
    """Test --out: report on disk, nothing on standard output."""
    path = os.path.join(output_dir, "fisher.json")
    result = runner.invoke(cli, ["fisher", "--out", path])
    assert result.exit_code == 0
    assert result.stdout == ""
    with open(path, "r", encoding="utf-8") as f:
        assert json.load(f)["command"] == "fisher"


def test_identical_runs_give_identical_files(runner, output_dir):
    """Test determinism apart from the timestamp."""
    reports = []
    for name in ("a.json", "b.json"):
        path = os.path.join(output_dir, name)
        args = ["cr-sim", "--estimator", "median", "--n", "11", "--trials", "1000", "--seed", "9"]
        assert runner.invoke(cli, args + ["--out", path]).exit_code == 0
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        data.pop("generated_at")
        reports.append(data)
    assert reports[0] == reports[1]


@pytest.mark.slow
def test_self_check(runner):
    """Test that the invariant suite passes."""
    data = invoke_json(runner, ["--self-check"])
    checks = data["result"]["checks"]
    assert len(checks) == 9
    assert all(check["passed"] for check in checks), checks
