"""
Wavefunctions, probability densities and the named test-state corpus.

A ``WavefunctionGrid`` holds complex amplitude samples normalized so that
the integral of ``|psi|^2`` is one; ``DensityGrid`` holds the matching
probability density. Both are immutable and validated on construction.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .base import (
    ENDPOINT_DENSITY_TOLERANCE,
    MAX_SHIFTED_OUT_MASS,
    NORM_TOLERANCE,
    ShiftError,
    StateError,
)
from .grid import (
    ComplexField,
    Grid1D,
    RealField,
    integrate,
    integrate_samples,
    lattice_steps,
    make_grid,
    shift_samples,
    warn_if_truncated,
)

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 2049


@dataclass(frozen=True, eq=False)
class WavefunctionGrid:
    """
    Normalized complex amplitude samples on a grid.

    Invariants checked on construction: the norm is one within 1e-10 and
    ``|psi|^2`` is at most 1e-10 at both grid endpoints.
    """

    grid: Grid1D
    psi: np.ndarray

    def __post_init__(self) -> None:
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 1 or psi.shape[0] != self.grid.n_points:
            raise StateError(
                f"Wavefunction has shape {psi.shape}, grid expects ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(psi)):
            raise StateError("Wavefunction holds non-finite samples")
        modulus2 = np.abs(psi) ** 2
        norm = integrate_samples(self.grid, modulus2)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise StateError(f"Wavefunction norm is {norm!r}, expected 1 within {NORM_TOLERANCE}")
        edge = max(modulus2[0], modulus2[-1])
        if edge > ENDPOINT_DENSITY_TOLERANCE:
            raise StateError(
                f"|psi|^2 at the grid endpoints is {edge:.3e}, above {ENDPOINT_DENSITY_TOLERANCE}; "
                f"widen the grid {self.grid}"
            )
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.psi.imag)) < 1e-12)

    def as_field(self) -> ComplexField:
        return ComplexField(self.grid, self.psi)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Nonnegative probability density samples integrating to one."""

    grid: Grid1D
    p: np.ndarray

    def __post_init__(self) -> None:
        if np.iscomplexobj(self.p):
            raise StateError("Density samples must be real")
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or p.shape[0] != self.grid.n_points:
            raise StateError(f"Density has shape {p.shape}, grid expects ({self.grid.n_points},)")
        if not np.all(np.isfinite(p)):
            raise StateError("Density holds non-finite samples")
        if np.any(p < 0.0):
            raise StateError(f"Density has negative samples (min {p.min()!r})")
        total = integrate_samples(self.grid, p)
        if abs(total - 1.0) > NORM_TOLERANCE:
            raise StateError(f"Density integrates to {total!r}, expected 1 within {NORM_TOLERANCE}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def as_field(self) -> RealField:
        return RealField(self.grid, self.p)


def density_of(psi: WavefunctionGrid) -> DensityGrid:
    """Pointwise ``|psi(x)|^2`` as a validated density."""
    p = psi.psi.real ** 2 + psi.psi.imag ** 2
    warn_if_truncated(psi.grid, p, "Density")
    return DensityGrid(psi.grid, p)


def normalize(psi_raw: Union[ComplexField, RealField]) -> WavefunctionGrid:
    """
    Scale raw amplitude samples to unit norm.

    Raises:
        StateError: If the samples have zero norm.
    """
    values = np.asarray(psi_raw.values, dtype=complex)
    if not np.any(values):
        raise StateError("Cannot normalize an all-zero wavefunction")
    norm2 = integrate(RealField(psi_raw.grid, np.abs(values) ** 2))
    if not norm2 > 0.0:
        raise StateError(f"Cannot normalize a wavefunction with norm^2 {norm2!r}")
    return WavefunctionGrid(psi_raw.grid, values / math.sqrt(norm2))


def with_global_phase(psi: WavefunctionGrid, phi: float) -> WavefunctionGrid:
    """Multiply by ``exp(i*phi)``; the result describes the same density."""
    return WavefunctionGrid(psi.grid, np.exp(1j * phi) * psi.psi)


def _lost_mass(grid: Grid1D, dropped_density: np.ndarray) -> float:
    return float(np.sum(dropped_density) * grid.spacing)


def shift(psi: WavefunctionGrid, theta: float) -> WavefunctionGrid:
    """
    Translate a wavefunction by ``theta``: the result is ``psi(x - theta)``.

    Raises:
        ShiftError: If ``theta`` is not a lattice multiple or the translation
            pushes more than 1e-10 of probability off the grid.
    """
    steps = lattice_steps(psi.grid, theta)
    if steps == 0:
        return psi
    shifted, dropped = shift_samples(psi.psi, steps)
    lost = _lost_mass(psi.grid, np.abs(dropped) ** 2)
    if lost > MAX_SHIFTED_OUT_MASS:
        raise ShiftError(f"Shift by {theta!r} pushes {lost:.3e} of probability off the grid")
    return WavefunctionGrid(psi.grid, shifted)


def shift_density(p: DensityGrid, theta: float) -> DensityGrid:
    """Translate a density by ``theta``: the result is ``p(x - theta)``."""
    steps = lattice_steps(p.grid, theta)
    if steps == 0:
        return p
    shifted, dropped = shift_samples(p.p, steps)
    lost = _lost_mass(p.grid, dropped)
    if lost > MAX_SHIFTED_OUT_MASS:
        raise ShiftError(f"Shift by {theta!r} pushes {lost:.3e} of probability off the grid")
    return DensityGrid(p.grid, shifted)


# --- corpus -----------------------------------------------------------------


def gaussian_amplitude(x: np.ndarray, delta_x: float) -> np.ndarray:
    """Minimum-uncertainty packet ``(2 pi dx^2)^(-1/4) exp(-x^2 / (4 dx^2))``."""
    return (2.0 * math.pi * delta_x ** 2) ** -0.25 * np.exp(-(x ** 2) / (4.0 * delta_x ** 2))


def _double_gaussian(x: np.ndarray, separation: float, delta_x: float) -> np.ndarray:
    half = separation / 2.0
    return gaussian_amplitude(x - half, delta_x) + gaussian_amplitude(x + half, delta_x)


def _cosine_window(x: np.ndarray, width: float) -> np.ndarray:
    inside = np.abs(x) <= width / 2.0
    return np.where(inside, np.cos(math.pi * x / width) ** 6, 0.0)


def _sech(x: np.ndarray, scale: float) -> np.ndarray:
    u = np.abs(x) / scale
    decay = np.exp(-u)
    return 2.0 * decay / (1.0 + decay ** 2)


@dataclass(frozen=True)
class CorpusEntry:
    """A named family of real test states."""

    name: str
    params: Tuple[str, ...]
    defaults: Tuple[float, ...]
    amplitude: Callable[..., np.ndarray]
    half_width: Callable[..., float]
    # True only for states that saturate dx * dp = hbar / 2
    minimum_uncertainty: bool = False
    analytically_normalized: bool = False


CORPUS: Dict[str, CorpusEntry] = {
    "gaussian": CorpusEntry(
        name="gaussian",
        params=("delta_x",),
        defaults=(1.0,),
        amplitude=gaussian_amplitude,
        half_width=lambda delta_x: 12.0 * delta_x,
        minimum_uncertainty=True,
        analytically_normalized=True,
    ),
    "double_gaussian": CorpusEntry(
        name="double_gaussian",
        params=("separation", "delta_x"),
        defaults=(4.0, 0.5),
        amplitude=_double_gaussian,
        half_width=lambda separation, delta_x: separation / 2.0 + 12.0 * delta_x,
    ),
    "cosine_window": CorpusEntry(
        name="cosine_window",
        params=("width",),
        defaults=(4.0,),
        amplitude=_cosine_window,
        half_width=lambda width: width,
    ),
    "sech": CorpusEntry(
        name="sech",
        params=("scale",),
        defaults=(1.0,),
        amplitude=_sech,
        half_width=lambda scale: 15.0 * scale,
    ),
}


def resolve_params(name: str, params: Optional[Sequence[float]] = None) -> Tuple[float, ...]:
    """
    Validate corpus parameters, filling trailing defaults.

    Raises:
        StateError: For an unknown name, too many parameters, or a parameter
            that is not a positive finite number.
    """
    if name not in CORPUS:
        raise StateError(f"Unknown corpus state {name!r}; choose from {sorted(CORPUS)}")
    entry = CORPUS[name]
    given = tuple(float(v) for v in (params or ()))
    if len(given) > len(entry.params):
        raise StateError(
            f"State {name!r} takes at most {len(entry.params)} parameter(s) "
            f"{entry.params}, got {len(given)}"
        )
    resolved = given + entry.defaults[len(given):]
    for label, value in zip(entry.params, resolved):
        if not (math.isfinite(value) and value > 0.0):
            raise StateError(f"Parameter {label} of {name!r} must be positive, got {value!r}")
    return resolved


def corpus(name: str, grid: Grid1D, params: Optional[Sequence[float]] = None) -> WavefunctionGrid:
    """
    Build a named, normalized, real-valued test state on ``grid``.

    Names and parameters:
        gaussian(delta_x), double_gaussian(separation, delta_x),
        cosine_window(width), sech(scale).

    Raises:
        StateError: For an unknown name, invalid parameters, or a state
            whose density has not decayed below 1e-10 at the grid ends.
    """
    resolved = resolve_params(name, params)
    entry = CORPUS[name]
    raw = entry.amplitude(grid.points, *resolved)
    logger.debug(f"Building corpus state {name}{resolved} on grid {grid}")
    if entry.analytically_normalized:
        return WavefunctionGrid(grid, raw)
    return normalize(RealField(grid, raw))


def corpus_default_grid(name: str, params: Optional[Sequence[float]] = None) -> Grid1D:
    """Symmetric grid of 2049 points wide enough for the named state to decay."""
    resolved = resolve_params(name, params)
    half = CORPUS[name].half_width(*resolved)
    return make_grid(-half, half, DEFAULT_GRID_POINTS)
