"""Exception hierarchy used across utrx."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional, Union

from public import public


@public
class UTRError(Exception):
    """Base class for every error raised by utrx."""


@public
class ConfigurationError(UTRError, ValueError):
    """Invalid parameters, names or ranges."""


@public
class DataError(UTRError, ValueError):
    """Input data that violates the dataset contract."""


@public
class ParseError(DataError):
    """Malformed line in a LIBSVM file."""

    path: Optional[Path]
    line_number: Optional[int]

    def __init__(
        self,
        message: str,
        path: Optional[Union[str, Path]] = None,
        line_number: Optional[int] = None,
    ) -> None:
        self.path = Path(path) if path is not None else None
        self.line_number = line_number
        location = ""
        if self.path is not None:
            location = f"{self.path}"
            if line_number is not None:
                location += f":{line_number}"
            location += ": "
        super().__init__(f"{location}{message}")


@public
class NumericalError(UTRError, ArithmeticError):
    """Factorization or eigensolver failure.

    Attributes
    ----------
    diagnostics : dict
        Whatever the failing routine knew at the time, including its best
        estimate when one exists.
    """

    diagnostics: Dict[str, Any]

    def __init__(
        self, message: str, diagnostics: Optional[Dict[str, Any]] = None
    ) -> None:
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


@public
class ContractViolation(UTRError, AssertionError):
    """An invariant of an operation does not hold."""
