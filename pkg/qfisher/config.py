"""
Configuration classes for the qfisher package.

This module defines Pydantic models for the options shared by every CLI
subcommand: the grid, the state, hbar, the output sink and the seed.
"""

import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .core.base import DEFAULT_HBAR
from .core.grid import Grid1D, make_grid
from .core.quantum_state import corpus_default_grid, resolve_params

ENV_DEFAULT_GRID = "QFISHER_DEFAULT_GRID"
SCHEMA_VERSION = "qfisher.report/1"


def _split_numbers(text: str, label: str) -> List[float]:
    try:
        return [float(part) for part in text.split(":")]
    except ValueError:
        raise ValueError(f"{label} must be colon-separated numbers, got {text!r}")


class GridConfig(BaseModel):
    """
    Grid configuration.

    Attributes:
        x_min: Left endpoint
        x_max: Right endpoint
        n_points: Number of samples (odd, at least 16)
    """

    model_config = ConfigDict(frozen=True)

    x_min: float = Field(-8.0, description="Left endpoint")
    x_max: float = Field(8.0, description="Right endpoint")
    n_points: int = Field(1025, description="Number of grid samples")

    @model_validator(mode="after")
    def _check_grid(self) -> "GridConfig":
        make_grid(self.x_min, self.x_max, self.n_points)
        return self

    @classmethod
    def parse(cls, text: str) -> "GridConfig":
        """Parse ``MIN:MAX:N``."""
        parts = _split_numbers(text, "grid")
        if len(parts) != 3:
            raise ValueError(f"grid must look like MIN:MAX:N, got {text!r}")
        x_min, x_max, n_points = parts
        if n_points != int(n_points):
            raise ValueError(f"grid point count must be an integer, got {n_points!r}")
        return cls(x_min=x_min, x_max=x_max, n_points=int(n_points))

    def to_grid(self) -> Grid1D:
        return make_grid(self.x_min, self.x_max, self.n_points)


class StateConfig(BaseModel):
    """
    Corpus state selection.

    Attributes:
        name: Corpus name (gaussian, double_gaussian, cosine_window, sech)
        params: Positional parameters; missing trailing ones take defaults
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field("gaussian", description="Corpus state name")
    params: List[float] = Field(default_factory=list, description="State parameters")

    @model_validator(mode="after")
    def _check_state(self) -> "StateConfig":
        resolve_params(self.name, self.params)
        return self

    @classmethod
    def parse(cls, text: str) -> "StateConfig":
        """Parse ``NAME[:P1[:P2]]``."""
        name, *rest = text.strip().split(":")
        params = _split_numbers(":".join(rest), "state parameters") if rest else []
        return cls(name=name, params=params)

    @property
    def resolved_params(self) -> List[float]:
        return list(resolve_params(self.name, self.params))

    def __str__(self) -> str:
        return ":".join([self.name] + [f"{p:g}" for p in self.resolved_params])


class OutputConfig(BaseModel):
    """
    Output sink configuration.

    Attributes:
        format: csv or json
        path: Output file; standard output when omitted
        lock_timeout: Timeout for the output file lock in seconds
    """

    model_config = ConfigDict(frozen=True)

    format: Literal["csv", "json"] = Field("json", description="Output format")
    path: Optional[str] = Field(None, description="Output file path")
    lock_timeout: float = Field(30.0, gt=0.0, description="Timeout for file locking in seconds")


class RunConfig(BaseModel):
    """
    Main run configuration, validated before any computation.

    Attributes:
        grid: Grid configuration; the state's natural grid when omitted
        hbar: Reduced Planck constant
        state: Corpus state
        output: Output configuration
        seed: Root seed for Monte Carlo experiments
        log_level: Logging level
    """

    model_config = ConfigDict(frozen=True)

    grid: Optional[GridConfig] = Field(None, description="Grid configuration")
    hbar: float = Field(DEFAULT_HBAR, gt=0.0, description="Reduced Planck constant")
    state: StateConfig = Field(default_factory=StateConfig, description="Corpus state")
    output: OutputConfig = Field(default_factory=OutputConfig, description="Output configuration")
    seed: int = Field(0, ge=0, description="Root seed")
    log_level: str = Field("INFO", description="Logging level")

    @field_validator("hbar")
    @classmethod
    def _finite_hbar(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("hbar must be finite")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return level

    def resolved_grid(self) -> Grid1D:
        if self.grid is not None:
            return self.grid.to_grid()
        return corpus_default_grid(self.state.name, self.state.params)

    def parameters(self) -> dict:
        """Echo of the effective run parameters for report headers."""
        return {
            "grid": str(self.resolved_grid()),
            "hbar": self.hbar,
            "state": str(self.state),
            "seed": self.seed,
        }


def describe_validation_error(error: ValidationError) -> str:
    """One line per failing field, e.g. ``grid: n_points must be odd ...``."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ()))
        message = str(item.get("msg", "invalid value"))
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        lines.append(f"{location}: {message}" if location else message)
    return "; ".join(lines)


__all__ = [
    "ENV_DEFAULT_GRID",
    "SCHEMA_VERSION",
    "GridConfig",
    "StateConfig",
    "OutputConfig",
    "RunConfig",
    "describe_validation_error",
]
