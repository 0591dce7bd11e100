"""
Numerical core: grids, states, Fisher information, divergences, moments and
Monte Carlo estimator experiments.
"""

from .base import (
    QFisherError,
    InputValidationError,
    GridError,
    StateError,
    ShiftError,
    EstimatorError,
    NumericalValidationError,
)

__all__ = [
    'QFisherError',
    'InputValidationError',
    'GridError',
    'StateError',
    'ShiftError',
    'EstimatorError',
    'NumericalValidationError',
]
