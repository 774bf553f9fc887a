"""Dense complex linear-algebra primitives with explicit numerical contracts.

Everything downstream (classification, normal forms, weights) funnels through
the handful of operations here: tolerance-aware kernels, invariant subspaces
by eigenvalue predicate (ordered Schur), Takagi factorization of complex
symmetric matrices, Hermitian square roots, and smallest singular values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .errors import BoundaryEigenvalue, NotPositiveDefinite, NotSymmetric

__all__ = [
    "Tolerance", "DEFAULT_TOL", "kernel", "invariant_subspace",
    "takagi", "herm_sqrt_inv", "smallest_singular",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances used throughout the package.

    rank_tol is a relative singular-value cutoff, cluster_tol an absolute
    eigenvalue-grouping radius, sym_tol a relative symmetry-residual bound.
    """

    rank_tol: float = 1e-10
    cluster_tol: float = 1e-8
    sym_tol: float = 1e-10

    def __post_init__(self):
        if min(self.rank_tol, self.cluster_tol, self.sym_tol) <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def kernel(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ker A as columns.

    Dimension is the number of singular values below ``rank_tol * sigma_max``;
    a zero matrix therefore returns the full identity basis.
    """
    A = _as_matrix(A)
    _, s, Vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(A.shape[1], dtype=complex)
    k = int(np.sum(s <= tol.rank_tol * smax))
    # columns of V beyond the numerical rank, plus any dimensions svd
    # didn't produce singular values for (wide matrices)
    extra = A.shape[1] - s.size
    return Vh[Vh.shape[0] - k - extra:].conj().T


def invariant_subspace(A, predicate: Callable[[complex], bool],
                       tol: Tolerance = DEFAULT_TOL,
                       boundary_dist: Callable[[complex], float] | None = None,
                       ) -> np.ndarray:
    """Orthonormal basis of the sum of generalized eigenspaces selected by
    ``predicate``, via ordered complex Schur factorization.

    ``boundary_dist`` gives the distance of an eigenvalue to the predicate's
    decision boundary; when provided, any eigenvalue within ``cluster_tol``
    of the boundary raises BoundaryEigenvalue.  Schur partitioning is
    backward stable, unlike chasing Jordan chains.
    """
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("invariant_subspace needs a square matrix")
    if boundary_dist is not None:
        for lam in np.linalg.eigvals(A):
            if boundary_dist(lam) < tol.cluster_tol:
                raise BoundaryEigenvalue(
                    f"eigenvalue {lam} within {tol.cluster_tol} of the "
                    "predicate boundary")
    _, Z, sdim = sla.schur(A, output="complex", sort=predicate)
    return Z[:, :sdim]


def takagi(C, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization C = U diag(s) U^T of a complex symmetric matrix.

    Returns (U unitary, s singular values descending).  Built on the SVD
    with a phase correction computed jointly on each cluster of equal
    singular values; degenerate clusters need the joint block or the
    reconstruction fails.
    """
    C = _as_matrix(C)
    n = C.shape[0]
    nrm = np.abs(C).max()
    if nrm > 0 and np.abs(C - C.T).max() > tol.sym_tol * nrm:
        raise NotSymmetric("takagi requires a complex symmetric matrix")
    C = 0.5 * (C + C.T)
    if nrm == 0.0:
        return np.eye(n, dtype=complex), np.zeros(n)
    V, s, Wh = np.linalg.svd(C)
    W = Wh.conj().T
    Q = np.zeros((n, n), dtype=complex)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(s[j + 1] - s[i]) <= tol.cluster_tol * max(1.0, s[i]):
            j += 1
        blk = slice(i, j + 1)
        # V^T W restricted to a singular-value cluster is unitary symmetric
        Z = V[:, blk].T @ W[:, blk]
        Z = 0.5 * (Z + Z.T)
        Q[blk, blk] = sla.sqrtm(Z)
        i = j + 1
    U = V @ Q.conj()
    return U, s


def herm_sqrt_inv(H, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """(H^{1/2}, H^{-1/2}) for Hermitian positive definite H."""
    H = _as_matrix(H)
    nrm = np.abs(H).max()
    if nrm > 0 and np.abs(H - H.conj().T).max() > tol.sym_tol * nrm:
        raise NotSymmetric("herm_sqrt_inv requires a Hermitian matrix")
    H = 0.5 * (H + H.conj().T)
    lam, U = np.linalg.eigh(H)
    if lam.min() <= tol.rank_tol * max(1.0, lam.max()):
        raise NotPositiveDefinite(
            f"matrix not positive definite (min eigenvalue {lam.min():.3e})")
    root = (U * np.sqrt(lam)) @ U.conj().T
    inv_root = (U / np.sqrt(lam)) @ U.conj().T
    return root, inv_root


def smallest_singular(A) -> float:
    """sigma_min(A), the square root of the least eigenvalue of A*A."""
    A = _as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[-1]) if s.size else 0.0
