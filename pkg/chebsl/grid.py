"""Chebyshev collocation grids

Nodes are the Chebyshev points of the second kind in *descending* order,
``x_0 = 1 > x_1 > ... > x_N = -1``. Every other module relies on this order: node
``0`` is the right endpoint ``b`` and node ``N`` the left endpoint ``a`` of the
physical interval.

"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from chebsl.errors import ProblemError

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class Domain:
    """The closed physical interval ``[a, b]``."""

    a: float
    b: float

    def __post_init__(self) -> None:
        """Reject infinite, empty and reversed intervals."""
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            message = f"Domain endpoints must be finite, got [{self.a}, {self.b}]"
            raise ProblemError(message)
        if not self.a < self.b:
            message = f"Domain needs a < b, got [{self.a}, {self.b}]"
            raise ProblemError(message)

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def to_physical(self, nodes: FloatArray) -> FloatArray:
        """Map canonical points in ``[-1, 1]`` to ``[a, b]``."""
        return ((self.b - self.a) * nodes + self.b + self.a) / 2


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """Chebyshev nodes with their interpolation and quadrature weights."""

    order: int
    nodes: FloatArray
    mapped_nodes: FloatArray
    bary_weights: FloatArray
    quad_weights: FloatArray
    domain: Domain

    @property
    def size(self) -> int:
        return self.order + 1


def _check_order(n: int) -> None:
    if n < 1:
        message = f"Chebyshev grids need N >= 1, got N={n}"
        raise ProblemError(message)


def cheb_points(n: int) -> FloatArray:
    """Return the ``N + 1`` Chebyshev points ``cos(j pi / N)``, ``j = 0..N``.

    The points are computed as ``sin(pi (N - 2j) / (2N))`` and then symmetrized, so
    ``x_j == -x_{N-j}`` holds bitwise.

    >>> cheb_points(2).tolist()
    [1.0, 0.0, -1.0]
    >>> cheb_points(1).tolist()
    [1.0, -1.0]

    """
    _check_order(n)
    j = np.arange(n + 1)
    x = np.sin(np.pi * (n - 2 * j) / (2 * n))
    return (x - x[::-1]) / 2  # type: ignore[no-any-return]


def clenshaw_curtis_weights(n: int) -> FloatArray:
    """Return the Clenshaw-Curtis weights on the ``N + 1`` Chebyshev points.

    The explicit cosine sum is used. For even ``N`` the rule integrates every
    polynomial of degree ``<= N`` exactly over ``[-1, 1]``.

    >>> (clenshaw_curtis_weights(2) * 3).round(12).tolist()
    [1.0, 4.0, 1.0]

    """
    _check_order(n)
    theta = np.pi * np.arange(n + 1) / n
    weights = np.zeros(n + 1)
    interior = theta[1:n]
    v = np.ones(n - 1)
    if n % 2 == 0:
        weights[0] = weights[n] = 1.0 / (n**2 - 1)
        for k in range(1, n // 2):
            v -= 2 * np.cos(2 * k * interior) / (4 * k**2 - 1)
        v -= np.cos(n * interior) / (n**2 - 1)
    else:
        weights[0] = weights[n] = 1.0 / n**2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * interior) / (4 * k**2 - 1)
    weights[1:n] = 2 * v / n
    return weights


def barycentric_weights(n: int) -> FloatArray:
    """Return the barycentric weights ``(-1)^j delta_j`` of the Chebyshev points.

    ``delta_j`` is ``1/2`` at both endpoints and ``1`` elsewhere; the common scale
    factor cancels in the barycentric formula.

    """
    _check_order(n)
    weights = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
    weights[0] *= 0.5
    weights[n] *= 0.5
    return weights


def make_grid(n: int, domain: Domain) -> ChebGrid:
    """Build the order ``N`` Chebyshev grid on ``domain``."""
    nodes = cheb_points(n)
    mapped = domain.to_physical(nodes)
    # pin the endpoints so boundary values land exactly on a and b
    mapped[0] = domain.b
    mapped[n] = domain.a
    return ChebGrid(
        order=n,
        nodes=nodes,
        mapped_nodes=mapped,
        bary_weights=barycentric_weights(n),
        quad_weights=clenshaw_curtis_weights(n) * domain.length / 2,
        domain=domain,
    )


def integrate(grid: ChebGrid, values: FloatArray) -> float:
    """Integrate node samples over the grid's domain by Clenshaw-Curtis."""
    if values.shape != grid.quad_weights.shape:
        message = (
            f"Expected {grid.size} samples for an order {grid.order} grid,"
            f" got {values.shape[0]}"
        )
        raise ProblemError(message)
    return float(grid.quad_weights @ values)
