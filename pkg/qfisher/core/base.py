"""
Base exceptions and shared numerical tolerances for the qfisher core.
"""

# Absolute density below which log-derivative and log-ratio integrands are skipped.
DENSITY_CUTOFF = 1e-13

# Largest probability mass the density cutoff may skip before a result is rejected.
MAX_EXCLUDED_MASS = 1e-8

# Normalization tolerance for wavefunctions and densities.
NORM_TOLERANCE = 1e-10

# Largest |psi|^2 allowed at either grid endpoint.
ENDPOINT_DENSITY_TOLERANCE = 1e-10

# Endpoint magnitude above which a truncation warning is logged.
TRUNCATION_WARNING_LEVEL = 1e-12

# Largest probability mass a lattice shift may push off the grid.
MAX_SHIFTED_OUT_MASS = 1e-10

# Relative tolerance when deciding whether a shift is a lattice multiple.
LATTICE_TOLERANCE = 1e-9

DEFAULT_HBAR = 1.0


class QFisherError(Exception):
    """Base exception for all qfisher errors."""
    pass


class InputValidationError(QFisherError, ValueError):
    """Raised when an operation's precondition is violated by its inputs."""
    pass


class GridError(InputValidationError):
    """Raised for an invalid grid or a field that does not match its grid."""
    pass


class StateError(InputValidationError):
    """Raised for an invalid wavefunction, density or corpus request."""
    pass


class ShiftError(InputValidationError):
    """Raised when a translation is not an integer multiple of the grid spacing."""
    pass


class EstimatorError(InputValidationError):
    """Raised for an unknown estimator or an invalid Monte Carlo request."""
    pass


class NumericalValidationError(QFisherError):
    """Raised when a computed result fails its own postcondition."""
    pass
