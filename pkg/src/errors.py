"""
Exception hierarchy for the packing toolkit.

Every error raised on purpose by the library derives from PackingForgeError,
so the CLI can map it to an exit code without catching unrelated failures.
"""

from __future__ import annotations

from typing import Any


class PackingForgeError(Exception):
    """Base class for all toolkit errors."""


class InvalidParamsError(PackingForgeError, ValueError):
    """Raised when packing parameters violate their invariants."""


class BudgetExceededError(PackingForgeError, RuntimeError):
    """Raised when an instance would exceed the configured size budget.

    Attributes:
        quantity: What was being counted (vertices, comparisons, nodes)
        predicted: The predicted count (may be astronomically large)
        budget: The configured cap
    """

    def __init__(self, quantity: str, predicted: int | float, budget: int) -> None:
        self.quantity = quantity
        self.predicted = predicted
        self.budget = budget
        super().__init__(
            f"Budget exceeded: predicted {quantity} = {_format_count(predicted)} "
            f"> budget {budget}"
        )


class GeometryDomainError(PackingForgeError, ValueError):
    """Raised for arguments outside a geometric formula's domain."""


class BoundPreconditionError(PackingForgeError, ValueError):
    """Raised when a bound is requested outside the regime where it is valid."""


class PackingFormatError(PackingForgeError, ValueError):
    """Raised when a packing file cannot be parsed.

    Attributes:
        line: 1-based line number of the offending line (0 for whole-file problems)
        field: Name of the field that failed to parse
    """

    def __init__(self, message: str, line: int = 0, field: str = "") -> None:
        self.line = line
        self.field = field
        location = f"line {line}" if line else "file"
        if field:
            location += f", field '{field}'"
        super().__init__(f"{location}: {message}")


class VerificationError(PackingForgeError, RuntimeError):
    """Raised when a packing fails geometric verification.

    Attributes:
        report: The verification report describing the failure
    """

    def __init__(self, message: str, report: Any = None) -> None:
        self.report = report
        super().__init__(message)


class IndependenceViolationError(PackingForgeError, RuntimeError):
    """Raised when a supposedly independent set contains an edge."""


def _format_count(value: int | float) -> str:
    if isinstance(value, int) and value.bit_length() > 64:
        return f"~2^{value.bit_length() - 1}"
    return str(value)
