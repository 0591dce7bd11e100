"""
Data models for the qfisher package.

This module defines Pydantic models for the results produced by the core
numerics: Fisher information values, divergence scans, uncertainty reports
and Monte Carlo estimator experiments.
"""

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core.base import MAX_EXCLUDED_MASS

# Absolute slack when checking that a divergence is nonnegative.
KL_FLOOR = -1e-12

# Relative distance from hbar/2 below which a state counts as minimum-uncertainty.
EQUALITY_RTOL = 1e-6


class FisherMethod(str, Enum):
    """How a Fisher information value was computed."""

    LOG_DERIVATIVE = "log_derivative"
    AMPLITUDE_DERIVATIVE = "amplitude_derivative"
    PARAMETRIC_DIFFERENCE = "parametric_difference"


class FisherResult(BaseModel):
    """Fisher information of a location family (1/position^2 units)."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0, description="Fisher information")
    method: FisherMethod = Field(..., description="Computation route")
    excluded_mass: float = Field(
        0.0,
        ge=0.0,
        le=MAX_EXCLUDED_MASS,
        description="Probability mass skipped by the low-density cutoff",
    )


class MomentumIdentity(BaseModel):
    """Both sides of hbar^2 * I(psi) = 4 <p^2> for a real wavefunction."""

    model_config = ConfigDict(frozen=True)

    lhs: float = Field(..., description="hbar^2 times the Fisher information")
    rhs: float = Field(..., description="Four times the second momentum moment")
    relative_gap: float = Field(..., ge=0.0, description="|lhs - rhs| / rhs")
    hbar: float = Field(..., gt=0.0, description="Reduced Planck constant")


class RouteIdentity(BaseModel):
    """The log-density and amplitude forms of the Fisher integral, side by side."""

    model_config = ConfigDict(frozen=True)

    log_route: float
    amplitude_route: float
    relative_gap: float = Field(..., ge=0.0)


class KLScanResult(BaseModel):
    """
    Kullback relative information between a density and its shifted copies.

    Attributes:
        shifts: Translations (position units)
        kl_values: Divergence at each shift (nats)
        quadratic_values: Second-order approximation 0.5 * I * shift^2 (nats)
        residuals: kl_values - quadratic_values (nats)
        fisher_information: The I used for the quadratic column
    """

    model_config = ConfigDict(frozen=True)

    shifts: List[float] = Field(default_factory=list, description="Shifts")
    kl_values: List[float] = Field(default_factory=list, description="Divergences in nats")
    quadratic_values: List[float] = Field(default_factory=list, description="0.5 * I * shift^2")
    residuals: List[float] = Field(default_factory=list, description="kl - quadratic")
    fisher_information: float = Field(..., ge=0.0, description="Fisher information of the density")

    @model_validator(mode="after")
    def _check_columns(self) -> "KLScanResult":
        n = len(self.shifts)
        if not (len(self.kl_values) == len(self.quadratic_values) == len(self.residuals) == n):
            raise ValueError("KLScanResult columns must have equal length")
        for kl in self.kl_values:
            if kl < KL_FLOOR:
                raise ValueError(f"Divergence {kl!r} is below the numerical floor {KL_FLOOR}")
        for kl, quad, res in zip(self.kl_values, self.quadratic_values, self.residuals):
            if res != kl - quad:
                raise ValueError("residuals must equal kl_values - quadratic_values")
        return self

    def rows(self) -> List[dict]:
        return [
            {"delta": d, "kl": k, "quadratic": q, "residual": r}
            for d, k, q, r in zip(self.shifts, self.kl_values, self.quadratic_values, self.residuals)
        ]


class UncertaintyReport(BaseModel):
    """
    Position and momentum spreads of a state and their product.

    The Cramer-Rao cross-check uses ``fisher_value``: with the measurement
    inaccuracy taken equal to ``delta_x``, ``delta_x**2 * fisher_value >= 1``.
    """

    model_config = ConfigDict(frozen=True)

    delta_x: float = Field(..., gt=0.0, description="Position standard deviation")
    delta_p: float = Field(..., gt=0.0, description="Momentum standard deviation")
    product: float = Field(..., description="delta_x * delta_p")
    bound: float = Field(..., description="hbar / 2")
    fisher_value: float = Field(..., ge=0.0, description="Fisher information of the density")
    hbar: float = Field(..., gt=0.0, description="Reduced Planck constant")

    @model_validator(mode="after")
    def _check_consistency(self) -> "UncertaintyReport":
        if not math.isclose(self.product, self.delta_x * self.delta_p, rel_tol=1e-12):
            raise ValueError("product must equal delta_x * delta_p")
        if not math.isclose(self.bound, self.hbar / 2.0, rel_tol=1e-15):
            raise ValueError("bound must equal hbar / 2")
        return self

    @property
    def heisenberg_satisfied(self) -> bool:
        return self.product >= self.bound - 1e-9

    @property
    def saturates_bound(self) -> bool:
        return (self.product - self.bound) / self.bound < EQUALITY_RTOL

    @property
    def cramer_rao_ratio(self) -> float:
        """``delta_x**2 * I``; at least one, equal to one only for Gaussians."""
        return self.delta_x ** 2 * self.fisher_value


class ScoreLinearity(BaseModel):
    """Weighted least-squares fit of the position score to alpha * (x - centre)."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., description="Fitted slope of d/dx ln|psi|^2")
    centre: float = Field(..., description="Mean position")
    residual_fraction: float = Field(
        ..., description="Share of the Fisher information not explained by the linear score"
    )
    excluded_mass: float = Field(0.0, ge=0.0, le=MAX_EXCLUDED_MASS)


class ProbePoint(BaseModel):
    """
    Uncertainty product of one perturbed Gaussian.

    An amplitude that does not give an admissible state carries ``error``
    instead of a product.
    """

    model_config = ConfigDict(frozen=True)

    amplitude: float
    product: Optional[float] = None
    error: Optional[str] = None

    @model_validator(mode="after")
    def _product_or_error(self) -> "ProbePoint":
        if (self.product is None) == (self.error is None):
            raise ValueError("a probe point needs exactly one of product and error")
        return self

    @property
    def admissible(self) -> bool:
        return self.error is None


class EstimatorKind(str, Enum):
    """Estimators available to the Monte Carlo experiments."""

    SAMPLE_MEAN = "sample_mean"
    SAMPLE_MEDIAN = "sample_median"
    SHRUNK_MEAN = "shrunk_mean"


class EstimatorSpec(BaseModel):
    """
    An estimator T(x_1, ..., x_n) of a location parameter.

    ``shrunk_mean`` multiplies the sample mean by ``c``; it is deliberately
    biased for ``c < 1`` and identical to ``sample_mean`` for ``c == 1``.
    """

    model_config = ConfigDict(frozen=True)

    kind: EstimatorKind = Field(..., description="Estimator family")
    c: float = Field(1.0, gt=0.0, le=1.0, description="Shrinkage factor (shrunk_mean only)")

    @field_validator("c")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("c must be finite")
        return value

    @property
    def label(self) -> str:
        if self.kind is EstimatorKind.SHRUNK_MEAN:
            return f"shrunk_mean({self.c:g})"
        return self.kind.value


class EstimatorReport(BaseModel):
    """
    Outcome of a Monte Carlo estimator experiment.

    Attributes:
        estimator: Label of the estimator used
        n_samples: Observations per trial
        n_trials: Number of independent trials
        theta: True location parameter
        empirical_mean: Mean of the estimates over trials
        empirical_variance: Variance of the estimates over trials (ddof=1)
        variance_std_error: Batch-means standard error of empirical_variance
        bias_slope: Estimated d<T>/dtheta
        fisher_information: Fisher information of one observation
        cr_bound: bias_slope^2 / (n_samples * fisher_information)
        bound_satisfied: empirical_variance >= cr_bound - 3 * variance_std_error
        seed: Root seed of the experiment
    """

    model_config = ConfigDict(frozen=True)

    estimator: str = Field(..., description="Estimator label")
    n_samples: int = Field(..., ge=1, description="Observations per trial")
    n_trials: int = Field(..., ge=1, description="Number of trials")
    theta: float = Field(..., description="True location parameter")
    empirical_mean: float = Field(..., description="Mean estimate")
    empirical_variance: float = Field(..., ge=0.0, description="Variance of the estimates")
    variance_std_error: float = Field(..., gt=0.0, description="Standard error of the variance")
    bias_slope: float = Field(..., description="d<T>/dtheta")
    fisher_information: float = Field(..., gt=0.0, description="Fisher information per observation")
    cr_bound: float = Field(..., ge=0.0, description="Cramer-Rao lower bound")
    bound_satisfied: bool = Field(..., description="Bound holds at 3 standard errors")
    seed: int = Field(..., description="Root seed")
    estimates: Optional[List[float]] = Field(
        None, exclude=True, description="Per-trial estimates, kept only on request"
    )

    @model_validator(mode="after")
    def _check_bound(self) -> "EstimatorReport":
        expected = self.bias_slope ** 2 / (self.n_samples * self.fisher_information)
        if not math.isclose(self.cr_bound, expected, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError("cr_bound must equal bias_slope^2 / (n_samples * fisher_information)")
        return self

    @property
    def efficiency(self) -> float:
        """Bound over variance; one for an efficient estimator."""
        return self.cr_bound / self.empirical_variance


class CheckResult(BaseModel):
    """Outcome of one invariant in the self-check suite."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str = ""
