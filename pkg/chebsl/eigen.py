"""Dense eigensolution of the reduced problem and convergence certification"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from chebsl.assemble import DiscreteEVP, assemble
from chebsl.errors import SolverError
from chebsl.grid import FloatArray
from chebsl.problem import SLProblem

logger = logging.getLogger(__name__)

BoolArray = NDArray[np.bool_]

DEFAULT_TOL = 1e-8
REALNESS_TOL = 1e-8
RESIDUAL_TOL = 1e-6
MIN_CERTIFY_ORDER = 8


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs of one discretization, sorted by ascending eigenvalue.

    ``eigenvectors[:, k]`` holds the interior node values belonging to
    ``eigenvalues[k]``, scaled to unit Euclidean norm. ``converged`` is all false
    until :func:`certify` sets it.

    """

    eigenvalues: FloatArray
    eigenvectors: FloatArray
    residuals: FloatArray
    n_grid: int
    converged: BoolArray
    evp: DiscreteEVP

    def __len__(self) -> int:
        return int(self.eigenvalues.shape[0])

    def truncated(self, count: int) -> Spectrum:
        """Return the first ``count`` eigenpairs."""
        return replace(
            self,
            eigenvalues=self.eigenvalues[:count],
            eigenvectors=self.eigenvectors[:, :count],
            residuals=self.residuals[:count],
            converged=self.converged[:count],
        )


def residual(evp: DiscreteEVP, lam: float, v: FloatArray) -> float:
    """Return ``|A v - lambda B v| / |v|`` in the Euclidean norm."""
    if v.shape != (evp.size,):
        message = f"Expected a vector of length {evp.size}, got shape {v.shape}"
        raise SolverError(message)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        message = "Residual of the zero vector is undefined"
        raise SolverError(message)
    return float(np.linalg.norm(evp.a_mat @ v - lam * evp.b_diag * v)) / norm


def solve(evp: DiscreteEVP) -> Spectrum:
    """Compute all eigenpairs of ``A y = lambda diag(b) y``.

    The problem is reduced to ``diag(b)^-1 A`` and handed to LAPACK's dense
    nonsymmetric solver (balancing, Hessenberg reduction, shifted QR).
    Eigenvalues with a non-negligible imaginary part are discarded as spurious.

    """
    n = evp.grid.order
    matrix = evp.a_mat / evp.b_diag[:, None]
    try:
        values, vectors = scipy.linalg.eig(matrix, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc_info:
        message = f"Dense eigensolver failed for N={n}: {exc_info}"
        raise SolverError(message) from exc_info
    values = np.asarray(values, dtype=np.complex128)
    vectors = np.asarray(vectors, dtype=np.complex128)
    keep = np.isfinite(values) & (
        np.abs(values.imag) <= REALNESS_TOL * (1 + np.abs(values.real))
    )
    if not keep.any():
        message = f"No real eigenvalues found for {evp.label!r} at N={n}"
        raise SolverError(message)
    discarded = int((~keep).sum())
    if discarded:
        logger.info("Discarded %d complex eigenvalues at N=%d", discarded, n)
    order = np.argsort(values.real[keep], kind="stable")
    eigenvalues = values.real[keep][order]
    selected = vectors[:, keep][:, order]
    # rotate each vector so its largest component is real before dropping the
    # imaginary parts
    pivots = selected[np.argmax(np.abs(selected), axis=0), np.arange(order.size)]
    eigenvectors = (selected * (np.abs(pivots) / pivots)).real
    eigenvectors /= np.linalg.norm(eigenvectors, axis=0)
    # columns have unit norm, so this is residual() for all pairs at once
    residuals = np.linalg.norm(
        evp.a_mat @ eigenvectors - evp.b_diag[:, None] * eigenvectors * eigenvalues,
        axis=0,
    )
    bound = RESIDUAL_TOL * (1 + np.abs(eigenvalues))
    if np.any(residuals > bound):
        warnings.warn(
            f"{int((residuals > bound).sum())} eigenpairs of {evp.label!r} at N={n}"
            " exceed the residual bound",
            stacklevel=2,
        )
    logger.debug("Solved %r at N=%d: %d eigenvalues", evp.label, n, eigenvalues.size)
    return Spectrum(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        residuals=residuals,
        n_grid=n,
        converged=np.zeros(eigenvalues.shape, dtype=np.bool_),
        evp=evp,
    )


def settled(coarse: Spectrum, fine: Spectrum, tol: float = DEFAULT_TOL) -> BoolArray:
    """Flag the eigenvalues of ``fine`` that agree with ``coarse``.

    Eigenvalues are matched by sorted index; eigenvalue ``k`` agrees when
    ``|lambda_k(coarse) - lambda_k(fine)| / (1 + |lambda_k(fine)|) <= tol``. The
    result covers the shorter of the two spectra.

    """
    if not tol > 0:
        message = f"Tolerance must be positive, got {tol}"
        raise SolverError(message)
    count = min(len(coarse), len(fine))
    reference = fine.eigenvalues[:count]
    drift = np.abs(coarse.eigenvalues[:count] - reference) / (1 + np.abs(reference))
    flags: BoolArray = drift <= tol
    return flags


def certify(prob: SLProblem, n: int, tol: float = DEFAULT_TOL) -> Spectrum:
    """Solve at ``N`` and ``2N`` and flag the eigenvalues that agree.

    Eigenvalue ``k`` is converged when
    ``|lambda_k(N) - lambda_k(2N)| / (1 + |lambda_k(2N)|) <= tol``. The returned
    spectrum holds the ``2N`` eigenpairs, truncated to the number of eigenvalues
    found at ``N``.

    """
    if n < MIN_CERTIFY_ORDER:
        message = f"Certification needs N >= {MIN_CERTIFY_ORDER}, got N={n}"
        raise SolverError(message)
    if not tol > 0:
        message = f"Tolerance must be positive, got {tol}"
        raise SolverError(message)
    with ThreadPoolExecutor(max_workers=2) as executor:
        coarse_job = executor.submit(lambda: solve(assemble(prob, n)))
        fine_job = executor.submit(lambda: solve(assemble(prob, 2 * n)))
        coarse, fine = coarse_job.result(), fine_job.result()
    converged = settled(coarse, fine, tol)
    count = converged.size
    fine = fine.truncated(count)
    logger.info(
        "%r: %d of %d eigenvalues converged between N=%d and N=%d",
        prob.label,
        int(converged.sum()),
        count,
        n,
        2 * n,
    )
    return replace(fine, converged=converged)
