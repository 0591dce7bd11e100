"""
Fisher information of location families.

Three routes are provided and must agree on smooth states:

- ``fisher_location``: the score form, integral of ``(d/dx ln p)^2 p``;
- ``fisher_amplitude``: the amplitude form, ``4 * integral of (d|psi|/dx)^2``,
  which needs no low-density cutoff;
- ``fisher_parametric``: the definition in terms of the parameter,
  differentiating ``p_theta`` with respect to ``theta`` across lattice shifts.
"""

import logging
from typing import TYPE_CHECKING, Tuple

import numpy as np

from ..models import FisherMethod, FisherResult, MomentumIdentity, RouteIdentity
from .base import (
    DEFAULT_HBAR,
    DENSITY_CUTOFF,
    MAX_EXCLUDED_MASS,
    NumericalValidationError,
    StateError,
)
from .grid import Grid1D, RealField, derivative, integrate_samples
from .quantum_state import DensityGrid, WavefunctionGrid, density_of

if TYPE_CHECKING:
    from .cramer_rao import LocationFamily

logger = logging.getLogger(__name__)


def _score_integral(grid: Grid1D, p: np.ndarray, dp: np.ndarray) -> Tuple[float, float]:
    """Integrate ``dp**2 / p`` over samples with ``p >= DENSITY_CUTOFF``."""
    keep = p >= DENSITY_CUTOFF
    excluded_mass = float(np.sum(p[~keep]) * grid.spacing)
    if excluded_mass > MAX_EXCLUDED_MASS:
        raise NumericalValidationError(
            f"Low-density cutoff skips {excluded_mass:.3e} of probability "
            f"(limit {MAX_EXCLUDED_MASS}); density too rough or truncated for a reliable I"
        )
    integrand = np.zeros_like(p)
    integrand[keep] = dp[keep] ** 2 / p[keep]
    return integrate_samples(grid, integrand), excluded_mass


def fisher_location(p: DensityGrid) -> FisherResult:
    """
    Fisher information of the location family generated by ``p``.

    Args:
        p: Normalized density.

    Returns:
        FisherResult: ``method = log_derivative`` and the probability mass
        skipped by the cutoff.

    Raises:
        NumericalValidationError: If the cutoff skips more than 1e-8 of mass.
    """
    dp = derivative(RealField(p.grid, p.p)).values
    value, excluded_mass = _score_integral(p.grid, p.p, dp)
    logger.debug(f"Log-derivative Fisher information {value:.12g} (excluded mass {excluded_mass:.2e})")
    return FisherResult(value=value, method=FisherMethod.LOG_DERIVATIVE, excluded_mass=excluded_mass)


def fisher_amplitude(psi: WavefunctionGrid) -> FisherResult:
    """
    Fisher information ``4 * integral of (d|psi|/dx)^2``.

    Depends on ``|psi|`` only, so a global phase does not change it.
    """
    modulus = np.abs(psi.psi)
    slope = derivative(RealField(psi.grid, modulus)).values
    value = 4.0 * integrate_samples(psi.grid, slope ** 2)
    return FisherResult(value=value, method=FisherMethod.AMPLITUDE_DERIVATIVE, excluded_mass=0.0)


def fisher_parametric(family: "LocationFamily", theta: float) -> FisherResult:
    """
    Fisher information from the parametric definition at ``theta``.

    The derivative of ``p_theta`` with respect to ``theta`` is taken with the
    five-point central stencil over lattice shifts ``theta + k*h``,
    ``k = -2..2``, where ``h`` is the grid spacing.
    """
    grid = family.base.grid
    h = grid.spacing
    members = [family.density_at(theta + k * h).p for k in (-2, -1, 0, 1, 2)]
    dp_dtheta = (members[0] - 8.0 * members[1] + 8.0 * members[3] - members[4]) / (12.0 * h)
    value, excluded_mass = _score_integral(grid, members[2], dp_dtheta)
    return FisherResult(
        value=value, method=FisherMethod.PARAMETRIC_DIFFERENCE, excluded_mass=excluded_mass
    )


def score_route_identity(psi: WavefunctionGrid) -> RouteIdentity:
    """Compare the log-density and amplitude forms of the Fisher integral."""
    log_route = fisher_location(density_of(psi)).value
    amplitude_route = fisher_amplitude(psi).value
    gap = abs(log_route - amplitude_route) / amplitude_route
    return RouteIdentity(log_route=log_route, amplitude_route=amplitude_route, relative_gap=gap)


def momentum_identity_check(psi: WavefunctionGrid, hbar: float = DEFAULT_HBAR) -> MomentumIdentity:
    """
    Check ``hbar^2 * I(psi) = 4 <p^2>`` for a real wavefunction.

    Raises:
        StateError: If ``psi`` has an imaginary part; for complex states the
            relation only holds as an inequality.
    """
    from .moments import momentum_variance

    if not psi.is_real:
        raise StateError(
            "momentum_identity_check requires a real wavefunction "
            f"(max |Im psi| = {np.max(np.abs(psi.psi.imag)):.3e})"
        )
    lhs = hbar ** 2 * fisher_amplitude(psi).value
    rhs = 4.0 * momentum_variance(psi, hbar)
    gap = abs(lhs - rhs) / rhs
    logger.info(f"Momentum identity: hbar^2 I = {lhs:.12g}, 4<p^2> = {rhs:.12g}, gap {gap:.2e}")
    return MomentumIdentity(lhs=lhs, rhs=rhs, relative_gap=gap, hbar=hbar)
