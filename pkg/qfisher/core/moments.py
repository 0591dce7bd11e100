"""
Position and momentum moments, uncertainty products, and the Gaussian
minimality probe.

Moments are central: the mean position is subtracted, so states need not be
centred at the origin. The mean momentum must vanish, which holds
identically for real wavefunctions.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..models import ProbePoint, ScoreLinearity, UncertaintyReport
from .base import (
    DEFAULT_HBAR,
    DENSITY_CUTOFF,
    InputValidationError,
    MAX_EXCLUDED_MASS,
    NumericalValidationError,
    StateError,
)
from .fisher import fisher_amplitude
from .grid import ComplexField, Grid1D, RealField, derivative, integrate_samples
from .quantum_state import (
    WavefunctionGrid,
    corpus_default_grid,
    gaussian_amplitude,
    normalize,
)

logger = logging.getLogger(__name__)

MIN_POSITION_VARIANCE = 1e-14
MAX_MEAN_MOMENTUM = 1e-8


def _check_hbar(hbar: float) -> None:
    if not (math.isfinite(hbar) and hbar > 0.0):
        raise InputValidationError(f"hbar must be a positive finite number, got {hbar!r}")


def _modulus2(psi: WavefunctionGrid) -> np.ndarray:
    return psi.psi.real ** 2 + psi.psi.imag ** 2


def position_mean(psi: WavefunctionGrid) -> float:
    """Expectation value of x."""
    return integrate_samples(psi.grid, psi.grid.points * _modulus2(psi))


def position_variance(psi: WavefunctionGrid) -> float:
    """
    Central second moment of position, ``integral of (x - <x>)^2 |psi|^2``.

    Raises:
        NumericalValidationError: If the variance is below 1e-14.
    """
    x = psi.grid.points
    centre = position_mean(psi)
    variance = integrate_samples(psi.grid, (x - centre) ** 2 * _modulus2(psi))
    if variance < MIN_POSITION_VARIANCE:
        raise NumericalValidationError(
            f"Position variance {variance:.3e} is below {MIN_POSITION_VARIANCE}; state is degenerate"
        )
    return variance


def momentum_mean(psi: WavefunctionGrid, hbar: float = DEFAULT_HBAR) -> float:
    """Expectation value of p = -i hbar d/dx."""
    _check_hbar(hbar)
    dpsi = derivative(ComplexField(psi.grid, psi.psi)).values
    # Re(conj(psi) * (-i hbar) dpsi) = hbar * Im(conj(psi) * dpsi)
    return hbar * integrate_samples(psi.grid, np.imag(np.conj(psi.psi) * dpsi))


def momentum_variance(psi: WavefunctionGrid, hbar: float = DEFAULT_HBAR) -> float:
    """
    Momentum variance ``hbar^2 * integral of |dpsi/dx|^2``.

    Raises:
        NumericalValidationError: If ``|<p>| >= 1e-8``.
    """
    mean = momentum_mean(psi, hbar)
    if abs(mean) >= MAX_MEAN_MOMENTUM:
        raise NumericalValidationError(
            f"Mean momentum {mean:.3e} is not zero; moments assume <p> = 0"
        )
    dpsi = derivative(ComplexField(psi.grid, psi.psi)).values
    variance = hbar ** 2 * integrate_samples(psi.grid, np.abs(dpsi) ** 2)
    if not variance > 0.0:
        raise NumericalValidationError(f"Momentum variance {variance!r} is not positive")
    return variance


def uncertainty_report(psi: WavefunctionGrid, hbar: float = DEFAULT_HBAR) -> UncertaintyReport:
    """
    Position and momentum spreads, their product, and the Fisher information
    used for the Cramer-Rao cross-check.
    """
    delta_x = math.sqrt(position_variance(psi))
    delta_p = math.sqrt(momentum_variance(psi, hbar))
    report = UncertaintyReport(
        delta_x=delta_x,
        delta_p=delta_p,
        product=delta_x * delta_p,
        bound=hbar / 2.0,
        fisher_value=fisher_amplitude(psi).value,
        hbar=hbar,
    )
    logger.info(
        f"dx = {report.delta_x:.12g}, dp = {report.delta_p:.12g}, "
        f"dx*dp = {report.product:.12g} (bound {report.bound:g})"
    )
    return report


def score_linearity(psi: WavefunctionGrid) -> ScoreLinearity:
    """
    Fit the position score ``d/dx ln|psi|^2`` to ``alpha * (x - <x>)``.

    The fit is weighted by ``|psi|^2``. The residual fraction is zero exactly
    when the density is Gaussian, which is when the uncertainty product
    reaches its minimum.
    """
    grid = psi.grid
    p = _modulus2(psi)
    dp = derivative(RealField(grid, p)).values
    keep = p >= DENSITY_CUTOFF
    excluded_mass = float(np.sum(p[~keep]) * grid.spacing)
    if excluded_mass > MAX_EXCLUDED_MASS:
        raise NumericalValidationError(
            f"Low-density cutoff skips {excluded_mass:.3e} of probability (limit {MAX_EXCLUDED_MASS})"
        )
    score = np.zeros_like(p)
    score[keep] = dp[keep] / p[keep]
    centre = position_mean(psi)
    offset = grid.points - centre
    alpha = integrate_samples(grid, score * offset * p) / position_variance(psi)
    information = integrate_samples(grid, score ** 2 * p)
    unexplained = integrate_samples(grid, np.where(keep, (score - alpha * offset) ** 2 * p, 0.0))
    return ScoreLinearity(
        alpha=alpha,
        centre=centre,
        residual_fraction=unexplained / information,
        excluded_mass=excluded_mass,
    )


def perturbation_shape(x: np.ndarray, delta_x: float) -> np.ndarray:
    """Even, smooth, decaying perturbation ``x^2 exp(-x^2 / (8 dx^2))``."""
    return x ** 2 * np.exp(-(x ** 2) / (8.0 * delta_x ** 2))


def gaussian_minimality_probe(
    delta_x: float,
    perturbation_amplitudes: Sequence[float],
    hbar: float = DEFAULT_HBAR,
    grid: Optional[Grid1D] = None,
    shape: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> List[ProbePoint]:
    """
    Uncertainty products of perturbed Gaussians ``gaussian(dx) * (1 + a*h)``.

    Args:
        delta_x: Width of the unperturbed packet.
        perturbation_amplitudes: Values of ``a``; must include 0.
        hbar: Reduced Planck constant.
        grid: Grid to build states on; defaults to the Gaussian's natural grid.
        shape: Perturbation ``h(x)``; defaults to ``perturbation_shape``.

    Returns:
        One ProbePoint per amplitude, in input order. An amplitude for which
        ``1 + a*h`` is not positive everywhere, or whose state leaves mass
        at the grid ends, gets a point with ``error`` set and no product.

    Raises:
        InputValidationError: If the amplitudes do not include 0.
        StateError: If the unperturbed packet itself does not fit the grid.
    """
    _check_hbar(hbar)
    amplitudes = [float(a) for a in perturbation_amplitudes]
    if 0.0 not in amplitudes:
        raise InputValidationError("perturbation amplitudes must include 0")
    if grid is None:
        grid = corpus_default_grid("gaussian", [delta_x])
    x = grid.points
    base = gaussian_amplitude(x, delta_x)
    h = perturbation_shape(x, delta_x) if shape is None else np.asarray(shape(x), dtype=float)

    points = []
    for a in amplitudes:
        try:
            point = _probe_point(grid, base, h, a, hbar)
        except StateError as e:
            if a == 0.0:
                raise
            logger.warning(f"Skipping perturbation amplitude {a!r}: {e}")
            point = ProbePoint(amplitude=a, error=str(e))
        points.append(point)
    return points


def _probe_point(grid: Grid1D, base: np.ndarray, h: np.ndarray, a: float, hbar: float) -> ProbePoint:
    factor = 1.0 + a * h
    if np.any(factor <= 0.0):
        raise StateError(
            f"factor 1 + a*h(x) must stay positive, but reaches {factor.min():.3g}"
        )
    psi = normalize(RealField(grid, base * factor))
    product = uncertainty_report(psi, hbar).product
    logger.debug(f"Perturbation amplitude {a:+.4g}: dx*dp = {product:.15g}")
    return ProbePoint(amplitude=a, product=product)


def minimum_at_zero(points: Sequence[ProbePoint]) -> bool:
    """True if the unperturbed packet has the smallest product among admissible points."""
    products = [pt for pt in points if pt.admissible]
    at_zero = min(pt.product for pt in products if pt.amplitude == 0.0)
    return all(pt.product >= at_zero for pt in products)
