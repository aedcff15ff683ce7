"""Dense Chebyshev differentiation matrices"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from chebsl.errors import ProblemError
from chebsl.grid import ChebGrid, Domain, FloatArray


@dataclass(frozen=True, eq=False)
class DiffMatrices:
    """First and second derivative matrices, already scaled to the domain."""

    order: int
    d1: FloatArray
    d2: FloatArray
    domain: Domain


def cheb_diff_matrix(grid: ChebGrid) -> DiffMatrices:
    """Return the differentiation matrices for the nodes of ``grid``.

    Off-diagonal entries are ``(c_k / c_j) (-1)^(k+j) / (x_k - x_j)`` with
    ``c = 2`` at the endpoints. Each diagonal entry is the negated sum of its row,
    so constants are annihilated exactly. ``d2`` is ``d1 @ d1`` with its diagonal
    reset the same way.

    >>> from chebsl.grid import Domain, make_grid
    >>> cheb_diff_matrix(make_grid(1, Domain(-1, 1))).d1.tolist()
    [[0.5, -0.5], [0.5, -0.5]]

    """
    n = grid.order
    x = grid.nodes
    c = np.ones(n + 1)
    c[0] = c[n] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d1 = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))
    scale = 2.0 / grid.domain.length
    d1 *= scale
    d2 = d1 @ d1
    np.fill_diagonal(d2, 0.0)
    np.fill_diagonal(d2, -d2.sum(axis=1))
    return DiffMatrices(order=n, d1=d1, d2=d2, domain=grid.domain)


def apply(matrices: DiffMatrices, values: FloatArray, deriv_order: int) -> FloatArray:
    """Differentiate node samples once or twice."""
    if deriv_order not in (1, 2):
        message = f"Only first and second derivatives are supported, got {deriv_order}"
        raise ProblemError(message)
    if values.shape != (matrices.order + 1,):
        message = (
            f"Expected {matrices.order + 1} node values, got shape {values.shape}"
        )
        raise ProblemError(message)
    matrix = matrices.d1 if deriv_order == 1 else matrices.d2
    return matrix @ values
