"""Exception types raised across the package."""


class SummatrixError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SummatrixError, ValueError):
    """Malformed input: wrong lengths, bad shapes, unreadable files."""


class DomainError(SummatrixError, ValueError):
    """Input outside the mathematical domain of an operation."""


class NumericalError(SummatrixError, ArithmeticError):
    """Two routes that must agree did not, or a computation lost precision."""
