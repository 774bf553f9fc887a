"""Quadratic symbols on R^{2n}, Hamilton maps, and their classification.

A quadratic form q(x, xi) is stored through its complex symmetric
coefficient matrix Q with q(X) = (X, Q X) for X = (x, xi).  The standard
symplectic form is sigma(X, Y) = (X, J Y) with J = [[0, -I], [I, 0]], and
the Hamilton map is F = J^{-1} Q, the unique sigma-antisymmetric map with
q(X) = sigma(X, F X).

Classification follows the semidefiniteness of Re q on the real sphere and
the singular space S = intersection of ker((Re F)(Im F)^k); q is elliptic
when Re q is positive definite, partially elliptic when Re q >= 0 and S is
trivial, and NotCovered otherwise.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError, RealEigenvalue
from .matcore import DEFAULT_TOL, Tolerance, kernel

__all__ = [
    "QuadraticForm", "HamiltonMap", "Kind", "Classification",
    "symplectic_J", "symplectic_form", "hamilton_map", "evaluate",
    "classify", "uhp_count", "form_from_coefficients",
]


def symplectic_J(n: int) -> np.ndarray:
    """J with sigma(X, Y) = (X, J Y); J = [[0, -I], [I, 0]]."""
    Z = np.zeros((n, n))
    I = np.eye(n)
    return np.block([[Z, -I], [I, Z]])


def symplectic_form(X, Y) -> complex:
    """sigma((x, xi), (y, eta)) = xi . y - eta . x."""
    X = np.asarray(X); Y = np.asarray(Y)
    n = X.shape[0] // 2
    return complex(X[n:] @ Y[:n] - Y[n:] @ X[:n])


@dataclass(frozen=True)
class QuadraticForm:
    """Complex quadratic form q(X) = (X, Q X) on R^{2n}."""

    n: int
    Q: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=complex)
        if Q.shape != (2 * self.n, 2 * self.n):
            raise InputError(f"Q must be {2*self.n}x{2*self.n}, got {Q.shape}")
        if not np.all(np.isfinite(Q)):
            raise InputError("Q has non-finite entries")
        nrm = np.abs(Q).max()
        if nrm > 0 and np.abs(Q - Q.T).max() > DEFAULT_TOL.sym_tol * nrm:
            raise InputError("Q must be complex symmetric")
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))

    def to_json_dict(self) -> dict:
        return {"n": self.n,
                "Q": [[[z.real, z.imag] for z in row] for row in self.Q]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "QuadraticForm":
        try:
            n = int(d["n"])
            Q = np.array([[complex(re, im) for re, im in row] for row in d["Q"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed QuadraticForm JSON: {exc}") from exc
        return cls(n=n, Q=Q)

    @classmethod
    def from_json(cls, text: str) -> "QuadraticForm":
        try:
            return cls.from_json_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc


def form_from_coefficients(n: int, coeffs: dict) -> QuadraticForm:
    """Build a QuadraticForm from monomial coefficients q_{ab} x^a xi^b.

    ``coeffs`` maps (alpha, beta) pairs of multi-indices (tuples of length n,
    |alpha + beta| = 2) to complex coefficients.  Weyl symmetrization is
    already built into the symmetric matrix Q.
    """
    Q = np.zeros((2 * n, 2 * n), dtype=complex)
    for (alpha, beta), c in coeffs.items():
        alpha = tuple(alpha); beta = tuple(beta)
        if sum(alpha) + sum(beta) != 2:
            raise InputError(f"coefficient {(alpha, beta)} is not quadratic")
        idx = [j for j in range(n) for _ in range(alpha[j])]
        idx += [n + j for j in range(n) for _ in range(beta[j])]
        i, j = idx
        Q[i, j] += c / 2
        Q[j, i] += c / 2
    return QuadraticForm(n=n, Q=Q)


@dataclass(frozen=True)
class HamiltonMap:
    """F = J^{-1} Q with q(X) = sigma(X, F X)."""

    F: np.ndarray

    @property
    def n(self) -> int:
        return self.F.shape[0] // 2


def hamilton_map(q: QuadraticForm) -> HamiltonMap:
    """Hamilton map (fundamental matrix) of q."""
    Jinv = -symplectic_J(q.n)    # J^{-1} = -J
    return HamiltonMap(F=Jinv @ q.Q)


def evaluate(q: QuadraticForm, X) -> complex:
    """q(X) = (X, Q X) for X in C^{2n}."""
    X = np.asarray(X, dtype=complex)
    return complex(X @ q.Q @ X)


class Kind(enum.Enum):
    ELLIPTIC = "Elliptic"
    PARTIALLY_ELLIPTIC = "PartiallyElliptic"
    NOT_COVERED = "NotCovered"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    k0: int | None
    singular_space_dim: int
    re_q_min: float

    def to_json_dict(self) -> dict:
        return {"kind": self.kind.value, "k0": self.k0,
                "singular_space_dim": self.singular_space_dim,
                "re_q_min_on_sphere": self.re_q_min}


def _singular_space(F: np.ndarray, tol: Tolerance) -> tuple[int | None, int]:
    """(k0, dim S) by iterating kernels of stacked (Re F)(Im F)^k.

    k0 is the least K with the running intersection trivial; the search
    stops at 2n - 1 by Cayley-Hamilton.  Returns (None, dim S) when the
    intersection never becomes trivial.
    """
    two_n = F.shape[0]
    ReF, ImF = F.real, F.imag
    rows = []
    power = np.eye(two_n)
    for K in range(two_n):
        rows.append(ReF @ power)
        ker = kernel(np.vstack(rows), tol)
        if ker.shape[1] == 0:
            return K, 0
        power = ImF @ power
    return None, ker.shape[1]


def classify(q: QuadraticForm, tol: Tolerance = DEFAULT_TOL) -> Classification:
    """Ellipticity / partial ellipticity / NotCovered, with k0 and dim S.

    The real-sphere minimum of Re q is the least eigenvalue of the real
    symmetric matrix Re Q; semidefiniteness is tested against -rank_tol so
    fixtures with irrational entries classify stably.
    """
    F = hamilton_map(q).F
    re_min = float(np.linalg.eigvalsh(q.Q.real).min())
    k0, sdim = _singular_space(F, tol)
    if re_min > tol.rank_tol:
        return Classification(Kind.ELLIPTIC, 0, 0, re_min)
    if re_min >= -tol.rank_tol and sdim == 0:
        return Classification(Kind.PARTIALLY_ELLIPTIC, k0, 0, re_min)
    return Classification(Kind.NOT_COVERED, None, sdim, re_min)


def uhp_count(F: HamiltonMap, tol: Tolerance = DEFAULT_TOL) -> tuple[int, int]:
    """(# eigenvalues with Im > 0, # with Im < 0), algebraic multiplicity.

    Raises RealEigenvalue if any eigenvalue lies within cluster_tol of the
    real axis; for partially elliptic symbols both counts equal n.
    """
    lam = np.linalg.eigvals(F.F)
    if np.any(np.abs(lam.imag) < tol.cluster_tol):
        worst = lam[np.argmin(np.abs(lam.imag))]
        raise RealEigenvalue(f"eigenvalue {worst} too close to the real axis")
    up = int(np.sum(lam.imag > 0))
    return up, lam.size - up
