"""Exception types shared across the package."""

from __future__ import annotations


class MatchgapError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MatchgapError):
    """Raised when instance text cannot be parsed.

    Carries enough position information (line number, field) to locate
    the offending input.
    """

    def __init__(self, message: str, line: int | None = None,
                 field: str | None = None) -> None:
        parts = [message]
        if line is not None:
            parts.append(f"(line {line})")
        if field is not None:
            parts.append(f"(field {field!r})")
        super().__init__(" ".join(parts))
        self.line = line
        self.field = field


class ValidationError(MatchgapError):
    """Raised when parsed data violates a structural invariant."""


class PreconditionError(MatchgapError):
    """Raised when an operation is called outside its stated preconditions."""


class InvariantError(MatchgapError):
    """Raised when an internal invariant fails.

    This always signals a bug in an upstream construction, never bad
    user input; the message carries a witness of the failure.
    """


class NoPerfectMatchingError(MatchgapError):
    """Raised when a graph admits no perfect matching.

    The ``witness`` is a set of vertices S such that deleting S leaves
    more than |S| odd components (a Tutte set), or None when the failure
    was detected without extracting one.
    """

    def __init__(self, message: str, witness: frozenset | None = None) -> None:
        super().__init__(message)
        self.witness = witness
