"""Sturm-Liouville problems

``-(p y')' + q y = lambda w y`` on ``[a, b]`` with separated boundary conditions
``c y + d y' = 0`` at each endpoint.

"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from chebsl.errors import ExprDomainError, ProblemError
from chebsl.expr import Expr, derivative, parse
from chebsl.grid import Domain

logger = logging.getLogger(__name__)

POSITIVITY_SAMPLES = 101

BUILTIN_EXAMPLES = (1, 2, 3)


@dataclass(frozen=True)
class BoundaryCondition:
    """Coefficients of ``c y + d y' = 0`` at one endpoint."""

    c: float
    d: float

    def __post_init__(self) -> None:
        if self.c == 0.0 and self.d == 0.0:
            message = "Boundary condition coefficients (c, d) must not both be zero"
            raise ProblemError(message)

    @classmethod
    def dirichlet(cls) -> BoundaryCondition:
        return cls(1.0, 0.0)

    @property
    def is_dirichlet(self) -> bool:
        return self.d == 0.0


def _check_positive(name: str, e: Expr, domain: Domain) -> None:
    for x in np.linspace(domain.a, domain.b, POSITIVITY_SAMPLES):
        try:
            value = e.evaluate(float(x))
        except ExprDomainError as exc_info:
            message = f"Coefficient {name} cannot be evaluated: {exc_info}"
            raise ProblemError(message) from exc_info
        if not value > 0:
            message = f"Coefficient {name} = {e} must be positive, got {value} at x={x}"
            raise ProblemError(message)


@dataclass(frozen=True)
class SLProblem:
    """A regular Sturm-Liouville eigenvalue problem.

    ``p`` and ``w`` are checked for positivity on 101 equispaced points of the
    domain. The check is a sample, not a proof.

    """

    p: Expr
    q: Expr
    w: Expr
    domain: Domain
    bc_left: BoundaryCondition = field(default_factory=BoundaryCondition.dirichlet)
    bc_right: BoundaryCondition = field(default_factory=BoundaryCondition.dirichlet)
    label: str = ""

    def __post_init__(self) -> None:
        _check_positive("p", self.p, self.domain)
        _check_positive("w", self.w, self.domain)


@dataclass(frozen=True)
class CanonicalCoefficients:
    """Coefficients of ``-y'' - p~ y' + q~ y = lambda w~ y``."""

    p_tilde: Callable[[float], float]
    q_tilde: Callable[[float], float]
    w_tilde: Callable[[float], float]


def canonicalize(prob: SLProblem) -> CanonicalCoefficients:
    """Divide the equation through by ``p``.

    ``p~ = p'/p``, ``q~ = q/p`` and ``w~ = w/p``, with ``p'`` differentiated
    symbolically.

    >>> from chebsl.expr import parse
    >>> coefficients = canonicalize(
    ...     SLProblem(parse("1+x"), parse("0"), parse("1"), Domain(0, 1))
    ... )
    >>> coefficients.p_tilde(1.0)
    0.5

    """
    p, q, w = prob.p, prob.q, prob.w
    dp = derivative(p)
    for x in np.linspace(prob.domain.a, prob.domain.b, POSITIVITY_SAMPLES):
        if p.evaluate(float(x)) == 0.0:
            message = f"p vanishes at x={x} in problem {prob.label!r}"
            raise ProblemError(message)

    def p_tilde(x: float) -> float:
        return dp.evaluate(x) / p.evaluate(x)

    def q_tilde(x: float) -> float:
        return q.evaluate(x) / p.evaluate(x)

    def w_tilde(x: float) -> float:
        return w.evaluate(x) / p.evaluate(x)

    logger.debug("Canonical form of %r uses p' = %s", prob.label, dp)
    return CanonicalCoefficients(p_tilde, q_tilde, w_tilde)


def builtin(example: int, d_truncation: float | None = None) -> SLProblem:
    """Return one of the three bundled example problems.

    1. ``-y'' = lambda (x+pi)^4 y`` on ``[0, pi]``
    2. ``-y'' + x^4 y = lambda y`` on ``[-d, d]``, the truncated quartic oscillator
    3. ``-y'' = lambda y / (1+x)^2`` on ``[0, 1]``

    All three have Dirichlet conditions at both ends.

    >>> builtin(2, 10).domain
    Domain(a=-10.0, b=10.0)

    """
    if example in (1, 3) and d_truncation is not None:
        message = f"Example {example} lives on a finite interval and takes no d"
        raise ProblemError(message)
    if example == 1:
        return SLProblem(
            p=parse("1"),
            q=parse("0"),
            w=parse("(x+pi)^4"),
            domain=Domain(0.0, math.pi),
            label="example 1",
        )
    if example == 2:
        if d_truncation is None or not d_truncation > 0:
            message = (
                "Example 2 needs a positive truncation half-width d,"
                f" got {d_truncation!r}"
            )
            raise ProblemError(message)
        return SLProblem(
            p=parse("1"),
            q=parse("x^4"),
            w=parse("1"),
            domain=Domain(-float(d_truncation), float(d_truncation)),
            label=f"example 2 (d={d_truncation:g})",
        )
    if example == 3:
        return SLProblem(
            p=parse("1"),
            q=parse("0"),
            w=parse("1/(1+x)^2"),
            domain=Domain(0.0, 1.0),
            label="example 3",
        )
    message = f"Unknown example {example!r}, expected one of {BUILTIN_EXAMPLES}"
    raise ProblemError(message)
