"""
Uniform real-line grids, Simpson quadrature and finite-difference derivatives.

Every other core module works on samples attached to a ``Grid1D``. The grid
spans a truncated interval ``[x_min, x_max]`` standing in for the real line;
physical fields are expected to have decayed to numerical zero at both ends.
"""

import logging
import math
from dataclasses import dataclass
from typing import ClassVar, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import simpson

from .base import (
    GridError,
    LATTICE_TOLERANCE,
    ShiftError,
    TRUNCATION_WARNING_LEVEL,
)

logger = logging.getLogger(__name__)

MIN_POINTS = 16


class Grid1D(BaseModel):
    """
    Uniform discretization of ``[x_min, x_max]``.

    Attributes:
        x_min: Left endpoint (position units)
        x_max: Right endpoint (position units)
        n_points: Number of samples, odd and at least 16 for composite Simpson
    """

    model_config = ConfigDict(frozen=True)

    x_min: float = Field(..., description="Left endpoint")
    x_max: float = Field(..., description="Right endpoint")
    n_points: int = Field(..., description="Number of samples")

    @model_validator(mode="after")
    def _check_layout(self) -> "Grid1D":
        _validate_layout(self.x_min, self.x_max, self.n_points)
        return self

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def __str__(self) -> str:
        return f"{self.x_min:g}:{self.x_max:g}:{self.n_points}"


def _validate_layout(x_min: float, x_max: float, n_points: int) -> None:
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        raise GridError(f"Grid bounds must be finite, got [{x_min}, {x_max}]")
    if not x_min < x_max:
        raise GridError(f"Grid requires x_min < x_max, got [{x_min}, {x_max}]")
    if n_points < MIN_POINTS:
        raise GridError(f"n_points must be at least {MIN_POINTS}, got {n_points}")
    if n_points % 2 == 0:
        raise GridError(f"n_points must be odd for Simpson quadrature, got {n_points}")


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    """
    Build a uniform grid.

    Args:
        x_min: Left endpoint.
        x_max: Right endpoint.
        n_points: Odd number of samples, at least 16.

    Returns:
        Grid1D: The grid, with spacing ``(x_max - x_min) / (n_points - 1)``.

    Raises:
        GridError: If the bounds are non-finite or unordered, or the point
            count is even or too small.
    """
    if isinstance(n_points, bool) or int(n_points) != n_points:
        raise GridError(f"n_points must be an integer, got {n_points!r}")
    _validate_layout(float(x_min), float(x_max), int(n_points))
    return Grid1D(x_min=float(x_min), x_max=float(x_max), n_points=int(n_points))


@dataclass(frozen=True, eq=False)
class _SampledField:
    """Read-only samples attached to a grid."""

    grid: Grid1D
    values: np.ndarray

    dtype: ClassVar[type] = float

    def __post_init__(self) -> None:
        if self.dtype is float and np.iscomplexobj(self.values):
            raise GridError("RealField cannot hold complex samples")
        values = np.array(self.values, dtype=self.dtype)
        if values.ndim != 1 or values.shape[0] != self.grid.n_points:
            raise GridError(
                f"Field has shape {values.shape}, grid expects ({self.grid.n_points},)"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class RealField(_SampledField):
    """Real samples on a grid (densities, integrands)."""

    dtype: ClassVar[type] = float


@dataclass(frozen=True, eq=False)
class ComplexField(_SampledField):
    """Complex samples on a grid (raw amplitudes)."""

    dtype: ClassVar[type] = complex


FieldT = TypeVar("FieldT", RealField, ComplexField)


def integrate(f: RealField) -> float:
    """
    Composite Simpson estimate of the integral of ``f`` over the grid.

    Args:
        f: Real samples on a valid grid.

    Returns:
        float: The integral, exact for cubics up to rounding.

    Raises:
        GridError: If ``f`` is complex or holds non-finite samples.
    """
    if not isinstance(f, RealField):
        raise GridError(f"integrate expects a RealField, got {type(f).__name__}")
    if not np.all(np.isfinite(f.values)):
        raise GridError("Cannot integrate a field with non-finite samples")
    return float(simpson(f.values, dx=f.grid.spacing))


def integrate_samples(grid: Grid1D, values: np.ndarray) -> float:
    """Shorthand for ``integrate(RealField(grid, values))``."""
    return integrate(RealField(grid, values))


# Sixth-order one-sided stencils for the first three samples, in units of 1/(60 h).
# Row k is the stencil for sample k over samples 0..6; the right edge mirrors it.
_EDGE_STENCILS = np.array(
    [
        [-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0],
        [-10.0, -77.0, 150.0, -100.0, 50.0, -15.0, 2.0],
        [2.0, -24.0, -35.0, 80.0, -30.0, 8.0, -1.0],
    ]
)


def _sixth_order_derivative(values: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(values)
    out[3:-3] = (
        -values[:-6]
        + 9.0 * values[1:-5]
        - 45.0 * values[2:-4]
        + 45.0 * values[4:-2]
        - 9.0 * values[5:-1]
        + values[6:]
    )
    out[:3] = _EDGE_STENCILS @ values[:7]
    out[-3:] = -(_EDGE_STENCILS @ values[:-8:-1])[::-1]
    return out / (60.0 * h)


def derivative(f: FieldT) -> FieldT:
    """
    Sixth-order finite-difference derivative of a real or complex field.

    Central seven-point differences are used in the interior and one-sided
    seven-point stencils on the first and last three samples.

    Args:
        f: Samples on a valid grid.

    Returns:
        A field of the same kind on the same grid.
    """
    if not isinstance(f, (RealField, ComplexField)):
        raise GridError(f"derivative expects a sampled field, got {type(f).__name__}")
    if not np.all(np.isfinite(f.values)):
        raise GridError("Cannot differentiate a field with non-finite samples")
    return type(f)(f.grid, _sixth_order_derivative(f.values, f.grid.spacing))


def lattice_steps(grid: Grid1D, theta: float) -> int:
    """
    Convert a translation into a whole number of grid steps.

    Raises:
        ShiftError: If ``theta`` is not an integer multiple of the spacing.
    """
    if not math.isfinite(theta):
        raise ShiftError(f"Shift must be finite, got {theta}")
    ratio = theta / grid.spacing
    steps = round(ratio)
    if abs(ratio - steps) > LATTICE_TOLERANCE * max(1.0, abs(ratio)):
        raise ShiftError(
            f"Shift {theta!r} is not a multiple of the grid spacing {grid.spacing!r}"
        )
    if abs(steps) >= grid.n_points:
        raise ShiftError(f"Shift {theta!r} moves every sample off the grid")
    return int(steps)


def shift_samples(values: np.ndarray, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Translate samples by ``steps`` positions, zero-filling vacated samples.

    Positive ``steps`` move the samples towards ``x_max``.

    Returns:
        The shifted samples and the samples that fell off the grid.
    """
    out = np.zeros_like(values)
    if steps == 0:
        out[:] = values
        return out, values[:0]
    if steps > 0:
        out[steps:] = values[:-steps]
        return out, values[-steps:]
    out[:steps] = values[-steps:]
    return out, values[:-steps]


def warn_if_truncated(grid: Grid1D, values: np.ndarray, label: str) -> bool:
    """Log a warning when a physical field has not decayed at the grid ends."""
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= TRUNCATION_WARNING_LEVEL:
        logger.warning(
            f"{label} is {edge:.3e} at the edge of grid {grid}; truncation error may be visible"
        )
        return True
    return False
