"""Exception hierarchy shared across the package.

Exit-code mapping used by the command line interface:

* :class:`InvalidInputError` -> 2 (bad data, bad flags, malformed files)
* :class:`ModelViolationError`, :class:`OracleDegradedError` -> 3
* :class:`CalibrationError` -> 4
"""

__all__ = [
    "ImstitchError",
    "InvalidInputError",
    "ModelViolationError",
    "OracleDegradedError",
    "CalibrationError",
    "EmptyIntervalError",
]


class ImstitchError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(ImstitchError):
    """Malformed data, out-of-range options, or unusable file contents."""


class ModelViolationError(ImstitchError):
    """The data violate an assumption the model needs (separation,
    boundary-divergent likelihood, no observed events, ...)."""


class OracleDegradedError(ImstitchError):
    """Too many Monte Carlo replicates failed for the estimate to be trusted."""

    def __init__(self, message, failure_rate=None):
        super().__init__(message)
        self.failure_rate = failure_rate


class CalibrationError(ImstitchError):
    """Stochastic-approximation calibration failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class EmptyIntervalError(ImstitchError):
    """No parameter value reaches the requested plausibility level."""
