"""
Tests for sampling, estimators and Monte Carlo Cramer-Rao experiments.
"""

import math

import numpy as np
import pytest

from qfisher.core.base import EstimatorError, InputValidationError, ShiftError
from qfisher.core.cramer_rao import (
    LocationFamily,
    apply_estimator,
    bias_slope,
    draw_samples,
    parse_estimator,
    run_experiment,
    trial_generator,
)
from qfisher.core.grid import make_grid
from qfisher.core.quantum_state import corpus, density_of
from qfisher.models import EstimatorKind, EstimatorSpec


@pytest.fixture(scope="module")
def family():
    """Unit Gaussian location family on [-16, 16] x 2049 (spacing 1/64)."""
    grid = make_grid(-16.0, 16.0, 2049)
    return LocationFamily(density_of(corpus("gaussian", grid, [1.0])))


@pytest.fixture
def mean_spec():
    """The sample mean."""
    return parse_estimator("mean")


def test_family_members_are_translates(family):
    """Test that p_theta is the base density moved by theta."""
    moved = family.density_at(1.0).p
    assert moved[1024 + 64] == family.base.p[1024]
    assert family.at(1.0).theta == 1.0


def test_family_rejects_off_lattice_theta(family):
    """Test that the true parameter must sit on the lattice."""
    with pytest.raises(ShiftError):
        family.at(0.3)


def test_samples_centre_on_theta(family):
    """Test that 1e5 draws average to theta within 0.02."""
    for theta in (0.0, 1.0):
        samples = draw_samples(family.at(theta), 100_000, seed=42)
        assert abs(samples.mean() - theta) < 0.02
        assert samples.var() == pytest.approx(1.0, rel=0.02)


def test_samples_are_deterministic(family):
    """Test that one seed gives one sequence."""
    first = draw_samples(family, 50, seed=3)
    second = draw_samples(family, 50, seed=3)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, draw_samples(family, 50, seed=4))


def test_single_draw_within_grid(family):
    """Test n = 1."""
    samples = draw_samples(family, 1, seed=0)
    assert samples.shape == (1,)
    assert family.grid.x_min <= samples[0] <= family.grid.x_max


def test_draw_requires_positive_n(family):
    """Test that n = 0 is rejected."""
    with pytest.raises(InputValidationError):
        draw_samples(family, 0, seed=0)


def test_trial_streams_follow_spawn_rule():
    """Test that trial i uses the i-th child of SeedSequence(seed)."""
    child = np.random.SeedSequence(7).spawn(3)[2]
    expected = np.random.default_rng(child).random(5)
    assert np.array_equal(trial_generator(7, 2).random(5), expected)


def test_draw_matches_first_trial(family):
    """Test that draw_samples uses the stream of trial 0 for the same seed."""
    samples = draw_samples(family, 50, seed=3)
    spec = parse_estimator("mean")
    report = run_experiment(spec, family, n=50, trials=1000, seed=3, keep_estimates=True)
    assert report.estimates[0] == pytest.approx(float(np.mean(samples)), rel=1e-12, abs=1e-15)


def test_apply_estimator_examples():
    """Test the three estimators on small samples."""
    assert apply_estimator(parse_estimator("mean"), [1.0, 2.0, 3.0]) == 2.0
    assert apply_estimator(parse_estimator("median"), [5.0, 1.0, 9.0]) == 5.0
    assert apply_estimator(parse_estimator("median"), [4.0, 1.0, 2.0, 9.0]) == 3.0
    assert apply_estimator(parse_estimator("shrunk:0.5"), [4.0, 4.0]) == 2.0


def test_apply_estimator_rejects_empty_sample():
    """Test that an empty sample is rejected."""
    with pytest.raises(EstimatorError):
        apply_estimator(parse_estimator("mean"), [])


@pytest.mark.parametrize(
    "text, kind, c",
    [
        ("mean", EstimatorKind.SAMPLE_MEAN, 1.0),
        ("sample_median", EstimatorKind.SAMPLE_MEDIAN, 1.0),
        ("shrunk:0.8", EstimatorKind.SHRUNK_MEAN, 0.8),
        ("SHRUNK_MEAN:0.25", EstimatorKind.SHRUNK_MEAN, 0.25),
    ],
)
def test_parse_estimator(text, kind, c):
    """Test estimator names accepted on the command line."""
    assert parse_estimator(text) == EstimatorSpec(kind=kind, c=c)


@pytest.mark.parametrize("text", ["mode", "shrunk:0", "shrunk:1.5", "shrunk:abc", "median:2"])
def test_parse_estimator_rejects(text):
    """Test malformed estimator names."""
    with pytest.raises(EstimatorError):
        parse_estimator(text)


def test_estimator_labels():
    """Test report labels."""
    assert parse_estimator("mean").label == "sample_mean"
    assert parse_estimator("shrunk:0.5").label == "shrunk_mean(0.5)"


@pytest.mark.parametrize(
    "text, expected, tol",
    [("mean", 1.0, 0.01), ("shrunk:0.8", 0.8, 0.01), ("median", 1.0, 0.02)],
)
def test_bias_slope(family, text, expected, tol):
    """Test d<T>/dtheta for equivariant and shrunk estimators."""
    slope = bias_slope(parse_estimator(text), family, n=21, trials=500, seed=1)
    assert slope == pytest.approx(expected, abs=tol)


def test_experiment_validates_request(family, mean_spec):
    """Test trial count, sample size and seed validation."""
    with pytest.raises(EstimatorError):
        run_experiment(mean_spec, family, n=10, trials=999, seed=0)
    with pytest.raises(EstimatorError):
        run_experiment(mean_spec, family, n=0, trials=1000, seed=0)
    with pytest.raises(EstimatorError):
        run_experiment(mean_spec, family, n=10, trials=1000, seed=-1)


def test_experiment_is_reproducible(family):
    """Test that identical arguments give identical reports."""
    spec = parse_estimator("median")
    first = run_experiment(spec, family, n=11, trials=1000, seed=5)
    second = run_experiment(spec, family, n=11, trials=1000, seed=5)
    assert first == second
    assert first.model_dump() == second.model_dump()


def test_experiment_keeps_estimates_on_request(family, mean_spec):
    """Test the optional per-trial dump."""
    report = run_experiment(mean_spec, family, n=5, trials=1000, seed=2, keep_estimates=True)
    assert len(report.estimates) == 1000
    assert "estimates" not in report.model_dump()
    assert report.empirical_variance == pytest.approx(np.var(report.estimates, ddof=1))
    assert run_experiment(mean_spec, family, n=5, trials=1000, seed=2).estimates is None


def test_assumed_slope_matches_measured_slope(family, mean_spec):
    """Test that forcing d<T>/dtheta = 1 agrees with measuring it for the mean."""
    measured = run_experiment(mean_spec, family, n=10, trials=1000, seed=3)
    assumed = run_experiment(mean_spec, family, n=10, trials=1000, seed=3, assume_unbiased=True)
    assert assumed.bias_slope == 1.0
    assert assumed.cr_bound == pytest.approx(1.0 / (10 * assumed.fisher_information), rel=1e-12)
    assert measured.cr_bound == pytest.approx(assumed.cr_bound, rel=1e-6)
    assert measured.empirical_variance == assumed.empirical_variance


def test_single_observation_bound(family, mean_spec):
    """Test Var(T) >= 1 / I for n = 1."""
    report = run_experiment(mean_spec, family, n=1, trials=2000, seed=11)
    assert report.bound_satisfied
    assert report.cr_bound == pytest.approx(1.0, rel=1e-5)


def test_mean_variance_scales_as_one_over_n(family, mean_spec):
    """Test that doubling n halves Var(mean)."""
    small = run_experiment(mean_spec, family, n=10, trials=4000, seed=8)
    large = run_experiment(mean_spec, family, n=20, trials=4000, seed=8)
    assert small.empirical_variance / large.empirical_variance == pytest.approx(2.0, rel=0.1)


def test_experiment_at_nonzero_theta(family, mean_spec):
    """Test that the experiment is run at the family's true parameter."""
    report = run_experiment(mean_spec, family.at(2.0), n=10, trials=1000, seed=0)
    assert report.theta == 2.0
    assert report.empirical_mean == pytest.approx(2.0, abs=0.05)


@pytest.fixture(scope="module")
def standard_family():
    """Unit Gaussian on its natural grid [-12, 12] x 2049."""
    return LocationFamily(density_of(corpus("gaussian", make_grid(-12.0, 12.0, 2049), [1.0])))


@pytest.mark.slow
def test_sample_mean_attains_bound(standard_family):
    """Test that the sample mean is efficient."""
    report = run_experiment(parse_estimator("mean"), standard_family, n=100, trials=10_000, seed=0)
    assert report.empirical_variance == pytest.approx(0.01, rel=0.05)
    assert 0.97 <= report.empirical_variance / report.cr_bound <= 1.05
    assert report.bound_satisfied


@pytest.mark.slow
def test_sample_median_exceeds_bound(standard_family):
    """Test Var(median) near pi / (2 n I), strictly above the bound."""
    report = run_experiment(parse_estimator("median"), standard_family, n=101, trials=10_000, seed=0)
    expected = math.pi / (2.0 * 101 * report.fisher_information)
    assert report.empirical_variance == pytest.approx(expected, rel=0.10)
    assert report.empirical_variance - report.cr_bound >= 3.0 * report.variance_std_error
    assert report.bound_satisfied


@pytest.mark.slow
def test_shrunk_mean_respects_biased_bound(standard_family):
    """Test the bound with the bias slope for c = 0.5."""
    report = run_experiment(parse_estimator("shrunk:0.5"), standard_family, n=100, trials=10_000, seed=0)
    assert report.bias_slope == pytest.approx(0.5, abs=1e-6)
    assert report.cr_bound == pytest.approx(0.0025, rel=1e-4)
    assert report.empirical_variance == pytest.approx(0.0025, rel=0.10)
    assert report.bound_satisfied
