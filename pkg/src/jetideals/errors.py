"""Exception types shared across the package."""


class JetIdealsError(Exception):
    """Base class for all package errors."""


class ParseError(JetIdealsError):
    """Raised on malformed input text; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DegreeOverflowError(JetIdealsError):
    """A parsed term exceeds the jet degree bound."""


class SignatureMismatchError(JetIdealsError):
    """Operands live in different jet rings."""


class DimensionMismatchError(JetIdealsError):
    """Vectors or points of incompatible length."""


class DomainError(JetIdealsError):
    """Evaluation requested outside an expression's domain."""
