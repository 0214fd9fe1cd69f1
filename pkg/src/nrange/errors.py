"""Exception hierarchy shared by the library, the CLI and the MCP tools."""

from __future__ import annotations


class NRangeError(ValueError):
    """Base class for every error raised by nrange."""


class DimensionError(NRangeError):
    """A matrix is not square or two operands disagree in size."""


class DomainError(NRangeError):
    """A mathematical precondition does not hold for the given input."""


class ParameterError(NRangeError):
    """A numeric parameter (sample count, tolerance, precision) is out of range."""


class KIndexError(NRangeError, IndexError):
    """The rank index k is outside 1..n."""


class ParseError(NRangeError):
    """A matrix file could not be read.

    ``context`` names the offending row or field, e.g. ``"entries[2]"``.
    """

    def __init__(self, message: str, *, context: str | None = None) -> None:
        self.context = context
        if context:
            message = f"{context}: {message}"
        super().__init__(message)


class InconsistencyError(NRangeError):
    """An algorithm produced an outcome its contract rules out."""


__all__ = [
    "NRangeError",
    "DimensionError",
    "DomainError",
    "ParameterError",
    "KIndexError",
    "ParseError",
    "InconsistencyError",
]
