"""Exception types shared across the package."""

from __future__ import annotations


class CapacityError(RuntimeError):
    """An exact engine was asked to work beyond its configured size limit."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: size {size} exceeds exact limit {limit}")
        self.what = what
        self.size = size
        self.limit = limit


class GraphFormatError(ValueError):
    """Malformed graph text input."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class HypothesisError(ValueError):
    """A documented precondition of a construction does not hold.

    ``hypothesis`` names the failed condition so callers can report it.
    """

    def __init__(self, hypothesis: str, detail: str = ""):
        msg = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(msg)
        self.hypothesis = hypothesis


class InternalConsistencyError(AssertionError):
    """A postcondition that the underlying combinatorics guarantees has failed."""
