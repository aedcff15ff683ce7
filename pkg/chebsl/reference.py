"""Reference spectra for the bundled examples and the relative error metric

Example 1 and example 2 have no closed form; their references are the WKB
asymptotics, which become accurate as the index grows. Example 3 is exactly
solvable.

>>> round(exact_example3(1), 9)
20.792288455
>>> round(wkb_example1(40), 9)
3.016941724

"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from chebsl.errors import ProblemError
from chebsl.expr import Expr
from chebsl.grid import Domain, integrate, make_grid

WKB_QUADRATURE_ORDER = 200

WKB = "wkb"
EXACT = "exact"

# lowest eigenvalue index of each bundled example
FIRST_INDEX = {1: 1, 2: 0, 3: 1}


@dataclass(frozen=True)
class ReferenceValue:
    """A reference eigenvalue and how it was obtained."""

    index: int
    value: float
    kind: str

    def __post_init__(self) -> None:
        if self.index < 0 or not math.isfinite(self.value):
            message = f"Invalid reference value {self.value!r} for n={self.index}"
            raise ProblemError(message)


def gamma(z: float) -> float:
    """Return the gamma function at ``z``.

    >>> round(gamma(5.0), 12)
    24.0

    """
    return float(scipy.special.gamma(z))


def _check_index(n: int, first: int) -> None:
    if n < first:
        message = f"Eigenvalue index must be >= {first}, got {n}"
        raise ProblemError(message)


def _check_point(x: float, domain: Domain) -> None:
    if not domain.contains(x):
        message = f"x={x!r} is outside [{domain.a}, {domain.b}]"
        raise ProblemError(message)


def _sqrt_weight_integral(w: Expr, domain: Domain) -> float:
    grid = make_grid(WKB_QUADRATURE_ORDER, domain)
    samples = w.sample(grid.mapped_nodes)
    if np.any(samples < 0):
        j = int(np.argmax(samples < 0))
        message = f"Weight {w} is negative at x={grid.mapped_nodes[j]!r}"
        raise ProblemError(message)
    return integrate(grid, np.sqrt(samples))


def wkb_general(w: Expr, domain: Domain, n: int) -> float:
    """WKB eigenvalue ``(n pi / integral of sqrt(w))^2`` of ``-y'' = lambda w y``."""
    _check_index(n, 1)
    return (n * math.pi / _sqrt_weight_integral(w, domain)) ** 2


def wkb_eigenfunction_general(w: Expr, domain: Domain, n: int, x: float) -> float:
    """WKB eigenfunction of ``-y'' = lambda w y`` with Dirichlet ends.

    ``[I/2]^(-1/2) w(x)^(-1/4) sin(n pi I(x) / I)`` where ``I(x)`` integrates
    ``sqrt(w)`` from ``a`` to ``x`` and ``I = I(b)``.

    """
    _check_index(n, 1)
    _check_point(x, domain)
    total = _sqrt_weight_integral(w, domain)
    partial = 0.0 if x == domain.a else _sqrt_weight_integral(w, Domain(domain.a, x))
    amplitude = (total / 2) ** -0.5 * w.evaluate(x) ** -0.25
    return amplitude * math.sin(n * math.pi * partial / total)  # type: ignore[no-any-return]


def wkb_example1(n: int) -> float:
    """WKB eigenvalue ``9 n^2 / (49 pi^4)`` of example 1."""
    _check_index(n, 1)
    return 9 * n**2 / (49 * math.pi**4)


def wkb_eigenfunction_example1(n: int, x: float) -> float:
    """WKB eigenfunction of example 1 at ``x`` in ``[0, pi]``."""
    _check_index(n, 1)
    _check_point(x, Domain(0.0, math.pi))
    phase = n * (x**3 + 3 * x**2 * math.pi + 3 * math.pi**2 * x) / (7 * math.pi**2)
    return math.sqrt(6 / (7 * math.pi**3)) * math.sin(phase) / (math.pi + x)


def wkb_example2(n: int) -> float:
    """WKB level of the quartic oscillator ``-y'' + x^4 y = lambda y``, ``n >= 0``.

    >>> round(wkb_example2(0), 6)
    0.867145

    """
    _check_index(n, 0)
    base = 3 * gamma(0.75) * (n + 0.5) * math.sqrt(math.pi) / gamma(0.25)
    return base ** (4 / 3)  # type: ignore[no-any-return]


def exact_example3(n: int) -> float:
    """Exact eigenvalue ``1/4 + (pi n / ln 2)^2`` of example 3."""
    _check_index(n, 1)
    return 0.25 + (math.pi * n / math.log(2)) ** 2


def exact_eigenfunction_example3(n: int, x: float) -> float:
    """Exact eigenfunction ``sqrt(1+x) sin(pi n ln(1+x) / ln 2)`` of example 3."""
    _check_index(n, 1)
    _check_point(x, Domain(0.0, 1.0))
    return math.sqrt(1 + x) * math.sin(math.pi * n * math.log1p(x) / math.log(2))


def reference_value(example: int, n: int) -> ReferenceValue:
    """Return the reference eigenvalue ``n`` of a bundled example."""
    if example == 1:
        return ReferenceValue(n, wkb_example1(n), WKB)
    if example == 2:  # noqa: PLR2004
        return ReferenceValue(n, wkb_example2(n), WKB)
    if example == 3:  # noqa: PLR2004
        return ReferenceValue(n, exact_example3(n), EXACT)
    message = f"No reference spectrum for example {example!r}"
    raise ProblemError(message)


def relative_error(exact: float, computed: float) -> float:
    """Return ``|exact - computed| / |exact|``.

    >>> relative_error(4.0, 3.0)
    0.25

    """
    if exact == 0:
        message = "Relative error is undefined for a zero reference value"
        raise ProblemError(message)
    return abs(exact - computed) / abs(exact)
