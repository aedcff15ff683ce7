"""Eigenfunction reconstruction from interior eigenvectors

Conventions for every returned eigenfunction: unit norm in the ``w``-weighted
Clenshaw-Curtis inner product, and a positive slope at the left endpoint ``a``.

"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from chebsl.assemble import DiscreteEVP
from chebsl.diffmat import cheb_diff_matrix
from chebsl.eigen import Spectrum
from chebsl.errors import InterpolationError
from chebsl.expr import Expr
from chebsl.grid import ChebGrid, FloatArray, integrate

# relative size below which slopes and node values count as zero for the sign rule
SIGN_TIE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Eigenfunction:
    """Node values of an eigenfunction on the full grid, endpoints included."""

    node_values: FloatArray
    grid: ChebGrid
    eigenvalue: float
    index: int


def reattach_boundary(v: FloatArray, evp: DiscreteEVP) -> FloatArray:
    """Extend interior values ``v`` to all ``N + 1`` nodes.

    Dirichlet endpoints get exact zeros; Robin endpoints are recomputed from the
    elimination relations stored at assembly.

    """
    if v.shape != (evp.size,):
        message = f"Expected {evp.size} interior values, got shape {v.shape}"
        raise InterpolationError(message)
    values = np.zeros(evp.grid.size)
    values[evp.interior_index_map] = v
    if evp.robin_nodes.size:
        values[evp.robin_nodes] = evp.boundary_relations @ v
    return values


def bary_eval(f: Eigenfunction, x: float) -> float:
    """Evaluate the interpolant of ``f`` at ``x`` by the second barycentric formula.

    >>> from chebsl.grid import Domain, make_grid
    >>> grid = make_grid(8, Domain(-1.0, 1.0))
    >>> cube = Eigenfunction(grid.mapped_nodes**3, grid, 0.0, 1)
    >>> round(bary_eval(cube, 0.3), 12)
    0.027

    """
    domain = f.grid.domain
    if not domain.contains(x):
        message = f"x={x!r} is outside [{domain.a}, {domain.b}]"
        raise InterpolationError(message)
    nodes = f.grid.mapped_nodes
    hits = np.flatnonzero(nodes == x)
    if hits.size:
        return float(f.node_values[hits[0]])
    terms = f.grid.bary_weights / (x - nodes)
    return float(terms @ f.node_values / terms.sum())


def weighted_inner(f: Eigenfunction, g: Eigenfunction, w: Expr) -> float:
    """Return the ``w``-weighted Clenshaw-Curtis inner product of ``f`` and ``g``."""
    if f.grid.order != g.grid.order or f.grid.domain != g.grid.domain:
        message = "Eigenfunctions must live on the same grid"
        raise InterpolationError(message)
    weight = w.sample(f.grid.mapped_nodes)
    return integrate(f.grid, weight * f.node_values * g.node_values)


def normalize(f: Eigenfunction, w: Expr) -> Eigenfunction:
    """Scale ``f`` to unit weighted norm and fix its sign.

    The sign makes the slope at the left endpoint positive. When that slope
    vanishes, as for modes decaying towards both ends, the first node value from
    the left that is not negligible is made positive.

    """
    norm_squared = weighted_inner(f, f, w)
    if not norm_squared > 0:
        message = f"Cannot normalize eigenfunction {f.index}: its weighted norm is zero"
        raise InterpolationError(message)
    values = f.node_values / np.sqrt(norm_squared)
    slopes = cheb_diff_matrix(f.grid).d1 @ values
    # the left endpoint a is the last node
    slope = slopes[-1]
    if abs(slope) > SIGN_TIE_TOL * np.abs(slopes).max():
        sign = np.sign(slope)
    else:
        from_left = values[::-1]
        significant = from_left[np.abs(from_left) > SIGN_TIE_TOL * np.abs(values).max()]
        sign = np.sign(significant[0])
    return replace(f, node_values=sign * values)


def eigenfunction(spectrum: Spectrum, k: int, w: Expr, index: int) -> Eigenfunction:
    """Return the normalized eigenfunction of the ``k``-th eigenpair.

    ``index`` is the label the caller uses for the mode (e.g. ``n`` starting at 0
    or 1).

    """
    if not 0 <= k < len(spectrum):
        message = f"Spectrum has {len(spectrum)} eigenpairs, no position {k}"
        raise InterpolationError(message)
    values = reattach_boundary(spectrum.eigenvectors[:, k], spectrum.evp)
    raw = Eigenfunction(
        node_values=values,
        grid=spectrum.evp.grid,
        eigenvalue=float(spectrum.eigenvalues[k]),
        index=index,
    )
    return normalize(raw, w)


def sample(f: Eigenfunction, m: int) -> list[tuple[float, float]]:
    """Return ``m`` equispaced ``(x, y)`` samples over the domain of ``f``."""
    if m < 2:  # noqa: PLR2004
        message = f"Need at least 2 samples, got {m}"
        raise InterpolationError(message)
    domain = f.grid.domain
    xs = np.linspace(domain.a, domain.b, m)
    return [(float(x), bary_eval(f, float(x))) for x in xs]
