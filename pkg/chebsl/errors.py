"""Exceptions raised by chebsl

Every error derives from :class:`ChebslError`, which is a :class:`ValueError`, so
callers can catch either.

"""

from __future__ import annotations


class ChebslError(ValueError):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(ChebslError):
    """A coefficient expression could not be parsed.

    :param message: Human readable description of the problem.
    :param position: 0-based character offset in the source text.

    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprDomainError(ChebslError):
    """A coefficient expression was evaluated outside its natural domain."""

    def __init__(self, message: str, expression: str, x: float) -> None:
        super().__init__(f"{message} in {expression} at x={x!r}")
        self.expression = expression
        self.x = x


class ProblemError(ChebslError):
    """The Sturm-Liouville problem definition is invalid."""


class AssemblyError(ChebslError):
    """The discrete eigenproblem could not be assembled."""


class SolverError(ChebslError):
    """The dense eigensolver failed or returned nothing usable."""


class InterpolationError(ChebslError):
    """An eigenfunction could not be reconstructed or evaluated."""
