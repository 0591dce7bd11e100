"""
Kerridge inaccuracy between a density and its translate, and the quadratic
Fisher approximation to it.

Accepting ``p(x + delta)`` in place of the true ``p(x)`` costs
``K(delta) = integral of p(x) ln[p(x) / p(x + delta)]`` nats. For small
shifts ``K(delta) ~ 0.5 * I * delta^2`` with ``I`` the Fisher information.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..models import KL_FLOOR, KLScanResult
from .base import (
    DENSITY_CUTOFF,
    InputValidationError,
    MAX_EXCLUDED_MASS,
    NumericalValidationError,
)
from .fisher import fisher_location
from .grid import Grid1D, integrate_samples, lattice_steps
from .quantum_state import DensityGrid, shift_density

logger = logging.getLogger(__name__)

DEFAULT_SCAN_STEPS = (1, 2, 4, 8, 16)


def kerridge_inaccuracy(p: DensityGrid, delta: float) -> float:
    """
    Kullback relative information of ``p(x + delta)`` with respect to ``p(x)``.

    Samples where either density is below the cutoff are skipped.

    Args:
        p: Normalized density.
        delta: Translation, an integer multiple of the grid spacing.

    Returns:
        float: The divergence in nats; exactly 0.0 for ``delta == 0``.

    Raises:
        ShiftError: If ``delta`` is not a lattice multiple or the shift pushes
            probability off the grid.
        NumericalValidationError: If the cutoff skips more than 1e-8 of mass
            or the result falls below -1e-12.
    """
    if lattice_steps(p.grid, delta) == 0:
        return 0.0
    q = shift_density(p, -delta).p
    keep = (p.p >= DENSITY_CUTOFF) & (q >= DENSITY_CUTOFF)
    excluded_mass = float(np.sum(p.p[~keep]) * p.grid.spacing)
    if excluded_mass > MAX_EXCLUDED_MASS:
        raise NumericalValidationError(
            f"Shift {delta!r}: cutoff skips {excluded_mass:.3e} of probability "
            f"(limit {MAX_EXCLUDED_MASS})"
        )
    integrand = np.zeros_like(p.p)
    integrand[keep] = p.p[keep] * np.log(p.p[keep] / q[keep])
    value = integrate_samples(p.grid, integrand)
    if value < KL_FLOOR:
        raise NumericalValidationError(f"Shift {delta!r}: divergence {value:.3e} is negative")
    return value


def default_deltas(grid: Grid1D) -> list:
    """Shifts of +-1, 2, 4, 8 and 16 grid spacings, in increasing order."""
    steps = sorted([-s for s in DEFAULT_SCAN_STEPS] + list(DEFAULT_SCAN_STEPS))
    return [s * grid.spacing for s in steps]


def kl_quadratic_scan(p: DensityGrid, deltas: Optional[Sequence[float]] = None) -> KLScanResult:
    """
    Divergence, quadratic approximation and residual at each shift.

    Args:
        p: Normalized density.
        deltas: Lattice shifts; defaults to ``default_deltas(p.grid)``.

    Returns:
        KLScanResult: Columns in the order of ``deltas``.
    """
    shifts = default_deltas(p.grid) if deltas is None else [float(d) for d in deltas]
    information = fisher_location(p).value
    kl_values = [kerridge_inaccuracy(p, delta) for delta in shifts]
    quadratic = [0.5 * information * delta ** 2 for delta in shifts]
    residuals = [kl - quad for kl, quad in zip(kl_values, quadratic)]
    logger.info(f"KL scan over {len(shifts)} shift(s), I = {information:.12g}")
    return KLScanResult(
        shifts=shifts,
        kl_values=kl_values,
        quadratic_values=quadratic,
        residuals=residuals,
        fisher_information=information,
    )


def fit_curvature(scan: KLScanResult, n_smallest: int = 4) -> float:
    """
    Least-squares ``c`` in ``kl ~ c * delta^2`` over the smallest nonzero shifts.

    For the quadratic expansion to hold, ``c`` must be close to ``I / 2``.

    Raises:
        InputValidationError: If the scan has fewer than ``n_smallest``
            nonzero shifts.
    """
    pairs = sorted(
        ((abs(d), d, kl) for d, kl in zip(scan.shifts, scan.kl_values) if d != 0.0),
        key=lambda item: item[0],
    )
    if len(pairs) < n_smallest:
        raise InputValidationError(
            f"Curvature fit needs {n_smallest} nonzero shifts, scan has {len(pairs)}"
        )
    chosen = pairs[:n_smallest]
    d2 = np.array([d ** 2 for _, d, _ in chosen])
    kl = np.array([k for _, _, k in chosen])
    return float(np.dot(kl, d2) / np.dot(d2, d2))
