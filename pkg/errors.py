"""Exceptions raised across the package.

All errors derive from ``BglaError``; most also derive from ``ValueError`` so
callers that only know the builtin hierarchy still catch bad input.
"""

from __future__ import annotations

from typing import Any, Sequence


class BglaError(Exception):
    """Base class for every error reported by this package."""

    def details(self) -> dict[str, Any]:
        """Structured fields added to JSON error reports."""
        return {}


class ShapeMismatchError(BglaError, ValueError):
    """Objects built over different tree shapes were combined."""


class InvalidVertexError(BglaError, ValueError):
    """A letter is out of range for its depth."""


class LevelCapError(BglaError, ValueError):
    """A level would exceed the configured level-size cap."""


class DegreeLimitError(BglaError, ValueError):
    """A permutation degree exceeds the configured backtrack limit."""


class ParseError(BglaError, ValueError):
    """Malformed spec file, clopen expression, ray literal or word."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.reason = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(f"{where}{message}")

    def details(self) -> dict[str, Any]:
        return {"line": self.line, "column": self.column}


class HomomorphismViolation(BglaError, ValueError):
    """A two-valued map breaks one of the Boolean homomorphism laws."""

    def __init__(self, law: str, witnesses: Sequence[Any], message: str = "") -> None:
        self.law = law
        self.witnesses = tuple(witnesses)
        shown = ", ".join(str(w) for w in self.witnesses)
        super().__init__(message or f"{law} law violated at {shown}")

    def details(self) -> dict[str, Any]:
        return {"law": self.law, "witnesses": [str(w) for w in self.witnesses]}


class NotAnIdealError(BglaError, ValueError):
    """Maximality was asked of a set that is not an ideal."""


class UniverseNotClosedError(BglaError, ValueError):
    """A finite universe is not closed under the Boolean operations."""


class OracleBudgetExhausted(BglaError, RuntimeError):
    """A two-valued oracle ran out of queries."""


class NotTreeInducedError(BglaError, ValueError):
    """An algebra automorphism does not map cones to same-depth cones."""


class IdentityUndecidedError(BglaError, RuntimeError):
    """The product automaton hit its state cap before deciding triviality."""

    def __init__(self, depth: int) -> None:
        self.depth = depth
        super().__init__(f"trivial up to depth {depth}, unknown beyond (product state cap reached)")

    def details(self) -> dict[str, Any]:
        return {"depth": self.depth}


class SupportNotClopenError(BglaError, ValueError):
    """A support computation did not end with a clopen verdict."""

    def __init__(self, result: Any) -> None:
        self.result = result
        super().__init__(f"support verdict is {result.verdict.value} at depth {result.depth_used}")

    def details(self) -> dict[str, Any]:
        return {"support": self.result.to_dict()}


class UnknownBuiltinError(BglaError, ValueError):
    """No shipped rist recursion exists for the requested group or vertex."""


class AmbientMismatchError(BglaError, ValueError):
    """Structure classes over different ambient groups were combined."""


class PreconditionError(BglaError, ValueError):
    """An operation was called outside its documented precondition."""
