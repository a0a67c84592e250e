"""Exception types raised across the package."""


class MTInverseError(Exception):
    """Base class for all package errors."""


class NonPositiveFrequency(MTInverseError, ValueError):
    pass


class SingularDenominator(MTInverseError, ZeroDivisionError):
    """A concentration-factor bracket vanished (pathological contrast)."""


class EmptyMinimizerSet(MTInverseError):
    """The measured permittivity lies outside the image of the forward model."""


class DegenerateScale(MTInverseError):
    """Charnes-Cooper scale variable collapsed to zero."""


class InfeasibleMeasurement(MTInverseError):
    """The inversion LP did not reach an optimal status."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class SingularSensitivity(MTInverseError, ZeroDivisionError):
    """Sensitivity matrix is rank deficient; no error bound exists."""


class ConfigError(MTInverseError, ValueError):
    """Invalid material-system configuration or CLI input."""
