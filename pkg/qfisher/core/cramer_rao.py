"""
Monte Carlo estimator experiments for location families.

Each trial draws ``n`` observations from ``p_theta(x) = p(x - theta)`` by
inverse-CDF sampling on the grid, applies an estimator, and the spread of the
estimates over trials is compared with the Cramer-Rao bound
``(d<T>/dtheta)^2 / (n * I)``.

Seeding rule: trial ``i`` of an experiment with root seed ``s`` draws from

    numpy.random.default_rng(numpy.random.SeedSequence(entropy=s, spawn_key=(i,)))

which is the ``i``-th child of ``SeedSequence(s).spawn(...)``. Every trial's
stream is therefore fixed by ``(s, i)`` alone, independent of execution order.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from ..models import EstimatorKind, EstimatorReport, EstimatorSpec
from .base import EstimatorError, InputValidationError
from .fisher import fisher_location
from .grid import Grid1D, lattice_steps
from .quantum_state import DensityGrid, shift_density

logger = logging.getLogger(__name__)

MIN_TRIALS = 1000
N_BATCHES = 10
BOUND_SIGMAS = 3.0


@dataclass(frozen=True, eq=False)
class LocationFamily:
    """
    The family ``p_theta(x) = base(x - theta)`` restricted to lattice ``theta``.

    ``theta`` is the family member an experiment treats as the true parameter.
    """

    base: DensityGrid
    theta: float = 0.0

    def __post_init__(self) -> None:
        self.density_at(self.theta)

    @property
    def grid(self) -> Grid1D:
        return self.base.grid

    @property
    def density(self) -> DensityGrid:
        return self.density_at(self.theta)

    def density_at(self, theta: float) -> DensityGrid:
        return shift_density(self.base, theta)

    def at(self, theta: float) -> "LocationFamily":
        return LocationFamily(self.base, theta)


def trial_generator(seed: int, trial_index: int) -> np.random.Generator:
    """Random generator for one trial, following the module's seeding rule."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial_index,)))


def _inverse_cdf_table(p: DensityGrid) -> np.ndarray:
    cdf = cumulative_simpson(p.p, dx=p.grid.spacing, initial=0.0)
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, None))
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return cdf


def _invert(p: DensityGrid, u: np.ndarray) -> np.ndarray:
    """Map uniforms on [0, 1) to positions by linear interpolation of the CDF."""
    cdf = _inverse_cdf_table(p)
    x = p.grid.points
    # cdf[j - 1] <= u < cdf[j], so every bracket has positive width
    j = np.clip(np.searchsorted(cdf, u, side="right"), 1, cdf.shape[0] - 1)
    lo, hi = cdf[j - 1], cdf[j]
    return x[j - 1] + (u - lo) / (hi - lo) * (x[j] - x[j - 1])


def draw_samples(family: LocationFamily, n: int, seed: int) -> np.ndarray:
    """
    Draw ``n`` i.i.d. observations from ``p_theta`` at ``family.theta``.

    The uniforms come from ``trial_generator(seed, 0)``, so the draw equals
    trial 0 of an experiment with the same root seed.
    """
    if n < 1:
        raise InputValidationError(f"n must be at least 1, got {n}")
    u = trial_generator(seed, 0).random(n)
    return _invert(family.density, u)


def apply_estimator(spec: EstimatorSpec, samples: Sequence[float]) -> float:
    """
    Evaluate an estimator on one sample.

    Raises:
        EstimatorError: If ``samples`` is empty.
    """
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise EstimatorError("Cannot apply an estimator to an empty sample")
    return float(_estimate_rows(spec, values.reshape(1, -1))[0])


def _estimate_rows(spec: EstimatorSpec, block: np.ndarray) -> np.ndarray:
    if spec.kind is EstimatorKind.SAMPLE_MEDIAN:
        return np.median(block, axis=1)
    estimates = np.mean(block, axis=1)
    if spec.kind is EstimatorKind.SHRUNK_MEAN:
        estimates = spec.c * estimates
    return estimates


def parse_estimator(text: str) -> EstimatorSpec:
    """
    Parse ``mean``, ``median`` or ``shrunk:C`` (long names also accepted).

    Raises:
        EstimatorError: For an unknown name or a malformed shrinkage factor.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name in ("mean", "sample_mean") and not arg:
        return EstimatorSpec(kind=EstimatorKind.SAMPLE_MEAN)
    if name in ("median", "sample_median") and not arg:
        return EstimatorSpec(kind=EstimatorKind.SAMPLE_MEDIAN)
    if name in ("shrunk", "shrunk_mean"):
        try:
            c = float(arg) if arg else 1.0
        except ValueError:
            raise EstimatorError(f"Shrinkage factor must be a number, got {arg!r}")
        if not (math.isfinite(c) and 0.0 < c <= 1.0):
            raise EstimatorError(f"Shrinkage factor must lie in (0, 1], got {c!r}")
        return EstimatorSpec(kind=EstimatorKind.SHRUNK_MEAN, c=c)
    raise EstimatorError(f"Unknown estimator {text!r}; use mean, median or shrunk:C")


def _uniform_block(seed: int, trials: int, n: int) -> np.ndarray:
    block = np.empty((trials, n))
    for i in range(trials):
        block[i] = trial_generator(seed, i).random(n)
    return block


def _mean_estimate(spec: EstimatorSpec, family: LocationFamily, theta: float, uniforms: np.ndarray) -> float:
    samples = _invert(family.density_at(theta), uniforms)
    return float(np.mean(_estimate_rows(spec, samples)))


def _slope_from_block(spec: EstimatorSpec, family: LocationFamily, uniforms: np.ndarray) -> float:
    # common random numbers on both sides of theta
    h = family.grid.spacing
    upper = _mean_estimate(spec, family, family.theta + h, uniforms)
    lower = _mean_estimate(spec, family, family.theta - h, uniforms)
    return (upper - lower) / (2.0 * h)


def _check_request(n: int, trials: int, minimum_trials: int, seed: int) -> None:
    if seed < 0:
        raise EstimatorError(f"seed must be nonnegative, got {seed}")
    if n < 1:
        raise EstimatorError(f"n must be at least 1, got {n}")
    if trials < minimum_trials:
        raise EstimatorError(f"trials must be at least {minimum_trials}, got {trials}")


def bias_slope(spec: EstimatorSpec, family: LocationFamily, n: int, trials: int, seed: int) -> float:
    """
    Central-difference estimate of ``d<T>/dtheta`` at ``family.theta``.

    Mean estimates at ``theta +- h`` (one grid spacing) reuse the same trial
    streams, so most of the Monte Carlo noise cancels in the difference.
    """
    _check_request(n, trials, 1, seed)
    lattice_steps(family.grid, family.theta)
    return _slope_from_block(spec, family, _uniform_block(seed, trials, n))


def _batch_variance_error(estimates: np.ndarray) -> float:
    batch_variances = np.array([np.var(b, ddof=1) for b in np.array_split(estimates, N_BATCHES)])
    return float(np.std(batch_variances, ddof=1) / math.sqrt(N_BATCHES))


def run_experiment(
    spec: EstimatorSpec,
    family: LocationFamily,
    n: int,
    trials: int,
    seed: int,
    assume_unbiased: bool = False,
    keep_estimates: bool = False,
) -> EstimatorReport:
    """
    Run a Cramer-Rao experiment.

    Args:
        spec: Estimator to evaluate.
        family: Location family; ``family.theta`` is the true parameter.
        n: Observations per trial.
        trials: Number of trials, at least 1000.
        seed: Root seed (see the module docstring for the seeding rule).
        assume_unbiased: Use a bias slope of exactly 1 instead of measuring it.
        keep_estimates: Attach the per-trial estimates to the report.

    Returns:
        EstimatorReport: Identical for identical arguments.

    Raises:
        EstimatorError: If ``n < 1`` or ``trials < 1000``.
    """
    _check_request(n, trials, MIN_TRIALS, seed)
    information = fisher_location(family.base).value
    uniforms = _uniform_block(seed, trials, n)

    estimates = _estimate_rows(spec, _invert(family.density, uniforms))
    variance = float(np.var(estimates, ddof=1))
    std_error = _batch_variance_error(estimates)
    slope = 1.0 if assume_unbiased else _slope_from_block(spec, family, uniforms)
    bound = slope ** 2 / (n * information)

    report = EstimatorReport(
        estimator=spec.label,
        n_samples=n,
        n_trials=trials,
        theta=family.theta,
        empirical_mean=float(np.mean(estimates)),
        empirical_variance=variance,
        variance_std_error=std_error,
        bias_slope=slope,
        fisher_information=information,
        cr_bound=bound,
        bound_satisfied=variance >= bound - BOUND_SIGMAS * std_error,
        seed=seed,
        estimates=estimates.tolist() if keep_estimates else None,
    )
    logger.info(
        f"{spec.label}: n={n}, trials={trials}, Var(T)={variance:.6g} "
        f"+- {std_error:.2g}, bound={bound:.6g}, satisfied={report.bound_satisfied}"
    )
    return report
