"""Discretization of a Sturm-Liouville problem on a Chebyshev grid

The full collocation operator ``L = -D2 - diag(p~) D1 + diag(q~)`` is built on the
mapped grid. Boundary conditions are then eliminated, leaving the square problem
``A y = lambda diag(b) y`` on the interior nodes with ``b > 0``.

"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from chebsl.diffmat import cheb_diff_matrix
from chebsl.errors import AssemblyError, ChebslError
from chebsl.grid import ChebGrid, FloatArray, make_grid
from chebsl.problem import BoundaryCondition, SLProblem, canonicalize

logger = logging.getLogger(__name__)

IntArray = NDArray[np.int64]

MIN_GRID_ORDER = 4

# condition number above which the boundary rows are treated as degenerate
SINGULAR_BOUNDARY_COND = 1e12


@dataclass(frozen=True, eq=False)
class DiscreteEVP:
    """Reduced generalized eigenproblem ``a_mat y = lambda diag(b_diag) y``.

    ``interior_index_map[k]`` is the grid node of reduced unknown ``k``. Endpoint
    values follow from the reduced vector ``v`` as
    ``y[robin_nodes] = boundary_relations @ v``; every other endpoint is a
    Dirichlet zero.

    """

    a_mat: FloatArray
    b_diag: FloatArray
    interior_index_map: IntArray
    grid: ChebGrid
    label: str
    robin_nodes: IntArray
    boundary_relations: FloatArray

    @property
    def size(self) -> int:
        return int(self.b_diag.shape[0])


def _sample(
    name: str, func: Callable[[float], float], nodes: FloatArray
) -> FloatArray:
    values = np.empty_like(nodes)
    for j, x in enumerate(nodes):
        try:
            values[j] = func(float(x))
        except (ChebslError, ZeroDivisionError) as exc_info:
            message = f"Cannot evaluate {name} at node {j} (x={x!r}): {exc_info}"
            raise AssemblyError(message) from exc_info
    if not np.all(np.isfinite(values)):
        j = int(np.argmin(np.isfinite(values)))
        message = f"{name} is not finite at node {j} (x={nodes[j]!r})"
        raise AssemblyError(message)
    return values


def eliminate_boundary(  # noqa: PLR0913
    l_full: FloatArray,
    b_full: FloatArray,
    bc_left: BoundaryCondition,
    bc_right: BoundaryCondition,
    d1: FloatArray,
    *,
    grid: ChebGrid,
    label: str = "",
) -> DiscreteEVP:
    """Remove the endpoint unknowns from the full collocation system.

    A Dirichlet endpoint simply loses its row and column. For a Robin or Neumann
    endpoint the discrete condition ``c y_k + d (D1 y)_k = 0`` is solved for the
    endpoint value in terms of the interior values, and the result is substituted
    into the interior rows. The weight rows of the boundary conditions are zero, so
    ``b_full`` reduces by plain deletion.

    """
    n = l_full.shape[0] - 1
    interior = np.arange(1, n, dtype=np.int64)
    # node 0 is the right endpoint b, node N the left endpoint a
    robin = [
        (node, bc)
        for node, bc in ((0, bc_right), (n, bc_left))
        if not bc.is_dirichlet
    ]
    a_mat = l_full[np.ix_(interior, interior)]
    robin_nodes = np.array([node for node, _ in robin], dtype=np.int64)
    relations = np.zeros((len(robin), n - 1))
    if robin:
        identity = np.eye(n + 1)
        rows = np.array([bc.c * identity[node] + bc.d * d1[node] for node, bc in robin])
        block = rows[:, robin_nodes]
        if np.linalg.cond(block) > SINGULAR_BOUNDARY_COND:
            message = (
                f"Boundary conditions of {label!r} are degenerate"
                " after discretization"
            )
            raise AssemblyError(message)
        relations = -np.linalg.solve(block, rows[:, interior])
        a_mat = a_mat + l_full[np.ix_(interior, robin_nodes)] @ relations
    b_diag = b_full[interior]
    if not np.all(b_diag > 0):
        j = int(interior[np.argmin(b_diag > 0)])
        message = f"Weight w/p must be positive, got {b_full[j]} at node {j}"
        raise AssemblyError(message)
    return DiscreteEVP(
        a_mat=a_mat,
        b_diag=b_diag,
        interior_index_map=interior,
        grid=grid,
        label=label,
        robin_nodes=robin_nodes,
        boundary_relations=relations,
    )


def assemble(prob: SLProblem, n: int) -> DiscreteEVP:
    """Discretize ``prob`` on the order ``N`` Chebyshev grid of its domain."""
    if n < MIN_GRID_ORDER:
        message = f"Assembly needs N >= {MIN_GRID_ORDER}, got N={n}"
        raise AssemblyError(message)
    grid = make_grid(n, prob.domain)
    matrices = cheb_diff_matrix(grid)
    coefficients = canonicalize(prob)
    x = grid.mapped_nodes
    p_tilde = _sample("p'/p", coefficients.p_tilde, x)
    q_tilde = _sample("q/p", coefficients.q_tilde, x)
    w_tilde = _sample("w/p", coefficients.w_tilde, x)
    l_full = -matrices.d2 - p_tilde[:, None] * matrices.d1 + np.diag(q_tilde)
    evp = eliminate_boundary(
        l_full,
        w_tilde,
        prob.bc_left,
        prob.bc_right,
        matrices.d1,
        grid=grid,
        label=prob.label,
    )
    logger.debug(
        "Assembled %r at N=%d into a %dx%d problem", prob.label, n, evp.size, evp.size
    )
    return evp
