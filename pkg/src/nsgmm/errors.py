"""Exception types shared across the package."""


class NsgmmError(Exception):
    """Base class for all package errors."""


class CovarianceError(NsgmmError):
    """Covariance matrix fails symmetry / positive-semidefiniteness checks."""


class DataError(NsgmmError):
    """Dataset is missing required columns or is otherwise unusable."""


class WeightSingularError(NsgmmError):
    """Weight target is singular beyond ridge repair.

    When raised during a two-step fit, the ``preliminary`` attribute holds
    the first-stage fit for diagnosis.
    """

    def __init__(self, message, preliminary=None):
        super().__init__(message)
        self.preliminary = preliminary


class DegenerateArrangementError(NsgmmError):
    """Line arrangement too degenerate for the sweep and too large for brute force."""


class ConfigError(NsgmmError):
    """Run configuration failed schema validation."""
