"""
Invariant suite run by ``qfisher --self-check``.

Each check builds its own states and grids and returns a CheckResult; an
exception inside a check is reported as a failure of that check only.
"""

import logging
import math
from typing import Callable, List

from .core.base import QFisherError
from .core.cramer_rao import LocationFamily, parse_estimator, run_experiment
from .core.divergence import fit_curvature, kl_quadratic_scan
from .core.fisher import (
    fisher_amplitude,
    fisher_location,
    fisher_parametric,
    momentum_identity_check,
    score_route_identity,
)
from .core.grid import make_grid
from .core.moments import gaussian_minimality_probe, uncertainty_report
from .core.quantum_state import (
    CORPUS,
    corpus,
    corpus_default_grid,
    density_of,
    with_global_phase,
)
from .models import CheckResult

logger = logging.getLogger(__name__)

HBAR_VALUES = (0.5, 1.0, 2.0)
# The Heisenberg tolerance is absolute, so large hbar is checked as well.
HEISENBERG_HBAR_VALUES = HBAR_VALUES + (4.0, 10.0)
# Non-Gaussian states must clear hbar/2 by at least this fraction of hbar.
STRICT_MARGIN = 1e-3


def _corpus_states():
    for name, entry in CORPUS.items():
        grid = corpus_default_grid(name, entry.defaults)
        yield name, entry, corpus(name, grid, entry.defaults)


def check_minimum_uncertainty() -> CheckResult:
    worst = 0.0
    for delta_x in (0.5, 1.0, 3.0):
        grid = make_grid(-12.0 * delta_x, 12.0 * delta_x, 2049)
        psi = corpus("gaussian", grid, [delta_x])
        for hbar in HBAR_VALUES:
            report = uncertainty_report(psi, hbar)
            worst = max(worst, abs(report.product - report.bound) / report.bound)
    return CheckResult(
        name="minimum_uncertainty_product",
        passed=worst < 1e-6,
        detail=f"max relative gap to hbar/2 over Gaussians: {worst:.3e}",
    )


def check_heisenberg_inequality() -> CheckResult:
    failures = []
    smallest_margin = math.inf
    for name, entry, psi in _corpus_states():
        for hbar in HEISENBERG_HBAR_VALUES:
            report = uncertainty_report(psi, hbar)
            if not report.heisenberg_satisfied:
                failures.append(f"{name} (hbar={hbar})")
            if not entry.minimum_uncertainty:
                margin = (report.product - report.bound) / hbar
                smallest_margin = min(smallest_margin, margin)
                if margin <= STRICT_MARGIN:
                    failures.append(f"{name} margin {margin:.3e}")
    return CheckResult(
        name="heisenberg_inequality",
        passed=not failures,
        detail=", ".join(failures) or f"smallest non-Gaussian margin {smallest_margin:.4e} * hbar",
    )


def check_fisher_identity() -> CheckResult:
    worst = 0.0
    for _, _, psi in _corpus_states():
        worst = max(worst, score_route_identity(psi).relative_gap)
        for hbar in HBAR_VALUES:
            identity = momentum_identity_check(psi, hbar)
            log_route = hbar ** 2 * fisher_location(density_of(psi)).value
            worst = max(worst, identity.relative_gap, abs(log_route - identity.rhs) / identity.rhs)
    return CheckResult(
        name="fisher_momentum_identity",
        passed=worst < 1e-6,
        detail=f"max relative gap over corpus, both routes: {worst:.3e}",
    )


def check_cramer_rao_link() -> CheckResult:
    failures = []
    for name, entry, psi in _corpus_states():
        ratio = uncertainty_report(psi).cramer_rao_ratio
        if ratio < 1.0 - 1e-9:
            failures.append(f"{name} dx^2*I = {ratio!r} < 1")
        elif entry.minimum_uncertainty and abs(ratio - 1.0) > 1e-6:
            failures.append(f"{name} dx^2*I = {ratio!r} is not 1")
        elif not entry.minimum_uncertainty and ratio <= 1.0 + 1e-6:
            failures.append(f"{name} dx^2*I = {ratio!r} reaches 1")
    return CheckResult(
        name="cramer_rao_link",
        passed=not failures,
        detail=", ".join(failures) or "dx^2*I >= 1 on every corpus state, equal only for the Gaussian",
    )


def check_kl_curvature() -> CheckResult:
    worst = 0.0
    for _, _, psi in _corpus_states():
        scan = kl_quadratic_scan(density_of(psi))
        half_info = scan.fisher_information / 2.0
        worst = max(worst, abs(fit_curvature(scan) - half_info) / half_info)
    grid = make_grid(-8.0, 8.0, 1025)
    gaussian = kl_quadratic_scan(
        density_of(corpus("gaussian", grid, [1.0])), [-0.5, -0.25, -0.125, 0.125, 0.25, 0.5]
    )
    residual = max(abs(r) for r in gaussian.residuals)
    return CheckResult(
        name="kl_curvature",
        passed=worst < 0.01 and residual < 1e-8,
        detail=f"max curvature error {worst:.3e}; Gaussian max |residual| {residual:.3e}",
    )


def check_cramer_rao() -> CheckResult:
    grid = make_grid(-12.0, 12.0, 2049)
    family = LocationFamily(density_of(corpus("gaussian", grid, [1.0])))
    mean = run_experiment(parse_estimator("mean"), family, n=100, trials=10_000, seed=0)
    median = run_experiment(parse_estimator("median"), family, n=101, trials=10_000, seed=0)
    shrunk = run_experiment(parse_estimator("shrunk:0.5"), family, n=100, trials=10_000, seed=0)
    ratio = mean.empirical_variance / mean.cr_bound
    checks = [
        abs(mean.empirical_variance - 0.01) <= 0.05 * 0.01,
        0.97 <= ratio <= 1.05,
        mean.bound_satisfied,
        median.empirical_variance - median.cr_bound >= 3.0 * median.variance_std_error,
        shrunk.bound_satisfied,
    ]
    return CheckResult(
        name="cramer_rao_bound",
        passed=all(checks),
        detail=(
            f"mean Var/bound {ratio:.4f}; median excess "
            f"{(median.empirical_variance - median.cr_bound) / median.variance_std_error:.1f} SE; "
            f"shrunk bound {shrunk.cr_bound:.4g}"
        ),
    )


def check_gaussian_minimality() -> CheckResult:
    points = gaussian_minimality_probe(1.0, [-0.2, -0.1, 0.0, 0.1, 0.2])
    at_zero = next(pt.product for pt in points if pt.amplitude == 0.0)
    margin = min(pt.product - at_zero for pt in points if pt.admissible and pt.amplitude != 0.0)
    return CheckResult(
        name="gaussian_minimality",
        passed=margin >= 1e-5,
        detail=f"nearest perturbed product exceeds the Gaussian by {margin:.3e}",
    )


def check_invariances() -> CheckResult:
    scaled = []
    for sigma in (0.5, 1.0, 2.0, 4.0):
        grid = make_grid(-12.0 * sigma, 12.0 * sigma, 2049)
        scaled.append(fisher_location(density_of(corpus("gaussian", grid, [sigma]))).value * sigma ** 2)
    scale_spread = (max(scaled) - min(scaled)) / min(scaled)

    grid = make_grid(-16.0, 16.0, 2049)
    psi = corpus("gaussian", grid, [1.0])
    family = LocationFamily(density_of(psi))
    shift_gap = abs(fisher_parametric(family, 0.0).value - fisher_parametric(family, 2.0).value)

    rotated = with_global_phase(psi, 0.7)
    density_gap = float(abs(density_of(rotated).p - density_of(psi).p).max())
    fisher_gap = abs(fisher_amplitude(rotated).value - fisher_amplitude(psi).value)
    passed = scale_spread < 1e-5 and shift_gap < 1e-8 and density_gap < 1e-12 and fisher_gap < 1e-12
    return CheckResult(
        name="scale_and_invariance",
        passed=passed,
        detail=(
            f"scale spread {scale_spread:.2e}; shift gap {shift_gap:.2e}; "
            f"phase gaps {density_gap:.2e}/{fisher_gap:.2e}"
        ),
    )


def check_reproducibility() -> CheckResult:
    grid = make_grid(-12.0, 12.0, 2049)
    family = LocationFamily(density_of(corpus("gaussian", grid, [1.0])))
    spec = parse_estimator("median")
    first = run_experiment(spec, family, n=11, trials=1000, seed=7)
    second = run_experiment(spec, family, n=11, trials=1000, seed=7)
    return CheckResult(
        name="reproducibility",
        passed=first.model_dump() == second.model_dump(),
        detail="identical arguments give identical reports",
    )


CHECKS: List[Callable[[], CheckResult]] = [
    check_minimum_uncertainty,
    check_heisenberg_inequality,
    check_fisher_identity,
    check_cramer_rao_link,
    check_kl_curvature,
    check_cramer_rao,
    check_gaussian_minimality,
    check_invariances,
    check_reproducibility,
]


def run_self_check() -> List[CheckResult]:
    """Run every check; a raised qfisher or validation error fails only that check."""
    results = []
    for check in CHECKS:
        try:
            result = check()
        except (QFisherError, ValueError) as e:
            result = CheckResult(name=check.__name__[len("check_"):], passed=False, detail=str(e))
        logger.info(f"{result.name}: {'pass' if result.passed else 'FAIL'} ({result.detail})")
        results.append(result)
    return results
