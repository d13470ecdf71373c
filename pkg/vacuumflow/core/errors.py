"""
Exception hierarchy for vacuumflow.
Every error carries the CLI exit code it maps to and a JSON-ready payload.
"""
from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_CHECK = 4


class VacuumFlowError(Exception):
    """Base class for all errors raised by the package."""

    exit_code: int = EXIT_RUNTIME

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = {k: v for k, v in details.items() if v is not None}

    def to_dict(self) -> Dict[str, Any]:
        """
        Machine-readable error document.

        Returns:
            Mapping with error class, message, exit code and extra details
        """
        payload: Dict[str, Any] = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        payload.update(self.details)
        return payload


class ConfigError(VacuumFlowError):
    """Experiment file could not be parsed or validated."""

    exit_code = EXIT_CONFIG

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None) -> None:
        super().__init__(message, line=line, key=key)
        self.line = line
        self.key = key


class DomainError(VacuumFlowError, ValueError):
    """Argument outside the admissible physical or numerical range."""


class GridMismatchError(VacuumFlowError, ValueError):
    """Field length does not match the grid it is evaluated on."""


class ZeroDenominatorError(VacuumFlowError, ZeroDivisionError):
    """A ratio was requested whose denominator vanishes."""


class SolverError(VacuumFlowError):
    """Time integration failed; ``time`` is the instant of failure."""

    def __init__(self, message: str, time: Optional[float] = None, **details: Any) -> None:
        super().__init__(message, time=time, **details)
        self.time = time

    def at_time(self, time: float) -> "SolverError":
        """Attach the failing time if it is not known yet."""
        if self.time is None:
            self.time = time
            self.details["time"] = time
        return self


class ParticleCrossingError(SolverError):
    """The flow map stopped being invertible (1 + ∂_yω ≤ 0)."""


class CFLViolationError(SolverError):
    """The time step exceeds the stability restriction."""


class NonFiniteStateError(SolverError):
    """The state contains NaN or infinite values."""


class CheckFailedError(VacuumFlowError):
    """A verification gate (residual, order, ratio) was not met."""

    exit_code = EXIT_CHECK


class OutputError(VacuumFlowError):
    """An artifact or the output directory could not be written."""

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(message, path=path)
        self.path = path
