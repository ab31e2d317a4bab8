"""Exception hierarchy shared by every ``dtcsim`` subpackage.

The CLI maps each family onto an exit code, see :data:`EXIT_CODES`.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional, Sequence


class DtcSimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(DtcSimError, ValueError):
    """Invalid device parameters, config file, or pulse descriptor."""


class NumericalError(DtcSimError, RuntimeError):
    """A numerical routine failed to deliver a trustworthy result."""


class ConvergenceError(NumericalError):
    """The eigensolver did not converge or its residuals are too large."""

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class LabelingError(NumericalError):
    """Dressed states could not be matched to computational labels."""

    def __init__(
        self,
        message: str,
        theta: Optional[float] = None,
        overlap: Optional[float] = None,
    ):
        super().__init__(message)
        self.theta = theta
        self.overlap = overlap


class NoInteriorExtremumError(NumericalError):
    """A bracketed extremum search ended on the bracket boundary."""


class PropagationError(NumericalError):
    """Time propagation failed (step underflow or norm drift)."""

    def __init__(self, message: str, stats: Optional[Mapping[str, Any]] = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class FitError(NumericalError):
    """An ideal-gate phase could not be defined from the extracted matrix."""


class CalibrationBracketError(DtcSimError, ValueError):
    """The gate-time bracket does not straddle the target angle."""

    def __init__(self, message: str, endpoints: Optional[Sequence[Any]] = None):
        super().__init__(message)
        self.endpoints = list(endpoints) if endpoints is not None else []


EXIT_CODES = {
    ConfigurationError: 2,
    NumericalError: 3,
    CalibrationBracketError: 4,
}


def exit_code_for(exc: BaseException) -> int:
    """Return the CLI exit code for ``exc`` (1 for anything unexpected)."""
    for exc_type, code in EXIT_CODES.items():
        if isinstance(exc, exc_type):
            return code
    return 1


__all__ = [
    "CalibrationBracketError",
    "ConfigurationError",
    "ConvergenceError",
    "DtcSimError",
    "EXIT_CODES",
    "FitError",
    "LabelingError",
    "NoInteriorExtremumError",
    "NumericalError",
    "PropagationError",
    "exit_code_for",
]
