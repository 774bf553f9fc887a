"""Reduction of partially elliptic quadratic symbols to normal form.

Pipeline: extract the stable manifolds Lambda^+/- of the Hamilton map as
graph matrices A_+/-, straighten Lambda^- by a real symplectic kappa, read
off the positive graph A_+ and its Cayley image C_+, conjugate by the
Bargmann-side matrix to reach a symbol (M_1 x) . xi, reduce M_1 to Jordan
form by G, and record the strictly convex weight determined by (G, C_+).

Also here: the inverse maps A_+ <-> C_+, Gaussian transport under linear
canonical transformations, and the (G, C_+) <-> weight correspondence
(re-exported from the weights module, which owns the weight type).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import (DegenerateTransport, GraphSingular, InputError,
                     NotNegative, NotPositive, NumericalError, SingularPencil)
from .matcore import DEFAULT_TOL, Tolerance, herm_sqrt_inv, invariant_subspace
from .symplectic import (HamiltonMap, Kind, QuadraticForm, classify,
                         hamilton_map, symplectic_J)
from .weights import QuadraticWeight, gc_from_weight, weight_from_gc

__all__ = [
    "LagrangianGraph", "NormalFormResult", "JordanReduction",
    "stable_manifolds", "straighten_kappa", "cplus_from_aplus",
    "aplus_from_cplus", "fbi_matrix", "fbi_matrix_inv", "jordan_reduce",
    "gaussian_transport", "reduce", "weight_from_gc", "gc_from_weight",
]


@dataclass(frozen=True)
class LagrangianGraph:
    """Lagrangian plane {(y, A y)} with its claimed sign.

    sign "positive" requires Im A positive definite (-i sigma(X, conj X) > 0
    on the plane), "negative" requires -Im A positive definite.
    """

    A: np.ndarray
    sign: str

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if self.sign not in ("positive", "negative"):
            raise InputError("sign must be 'positive' or 'negative'")
        scale = max(np.abs(A).max(), 1.0)
        if np.abs(A - A.T).max() > 1e-10 * scale:
            raise InputError("graph matrix must be complex symmetric")
        A = 0.5 * (A + A.T)
        im_eigs = np.linalg.eigvalsh(0.5 * (A.imag + A.imag.T))
        if self.sign == "positive" and im_eigs.min() <= 0:
            raise NotPositive(f"Im A not positive definite (min {im_eigs.min():.3e})")
        if self.sign == "negative" and im_eigs.max() >= 0:
            raise NotNegative(f"-Im A not positive definite (max Im {im_eigs.max():.3e})")
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def basis(self) -> np.ndarray:
        """Column basis [I; A] of the plane (not orthonormal)."""
        return np.vstack([np.eye(self.n), self.A])


def _graph_matrix(V: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Graph matrix Xi X^{-1} from a (2n, n) basis V = [X; Xi]."""
    n = V.shape[0] // 2
    X, Xi = V[:n], V[n:]
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= tol.rank_tol * max(s[0], 1.0):
        raise GraphSingular("plane is not a graph over the base variables")
    A = Xi @ np.linalg.inv(X)
    scale = max(np.abs(A).max(), 1.0)
    resid = np.abs(A - A.T).max()
    if resid > 1e-10 * scale:
        raise NumericalError(f"graph matrix symmetry residual {resid:.2e}")
    return 0.5 * (A + A.T)


def stable_manifolds(F: HamiltonMap, tol: Tolerance = DEFAULT_TOL,
                     ) -> tuple[LagrangianGraph, LagrangianGraph]:
    """(Lambda^+, Lambda^-) as graphs, from Schur invariant subspaces of F
    over the upper / lower half-plane eigenvalues."""
    Fm = F.F
    dist = lambda lam: abs(lam.imag)
    Vp = invariant_subspace(Fm, lambda lam: lam.imag > 0, tol, boundary_dist=dist)
    Vm = invariant_subspace(Fm, lambda lam: lam.imag < 0, tol, boundary_dist=dist)
    if Vp.shape[1] != F.n or Vm.shape[1] != F.n:
        raise NumericalError(
            f"half-plane splitting is not n/n: {Vp.shape[1]}/{Vm.shape[1]}")
    Ap = _graph_matrix(Vp, tol)
    Am = _graph_matrix(Vm, tol)
    return (LagrangianGraph(A=Ap, sign="positive"),
            LagrangianGraph(A=Am, sign="negative"))


def straighten_kappa(minus: LagrangianGraph | np.ndarray,
                     tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Real symplectic kappa with kappa(Lambda^-) = {(y, -i y)}.

    kappa = [[W^{1/2}, 0], [-W^{-1/2} Re A_-, W^{-1/2}]] for W = -Im A_-.
    """
    A = minus.A if isinstance(minus, LagrangianGraph) else np.asarray(minus, complex)
    n = A.shape[0]
    W = -A.imag
    if np.linalg.eigvalsh(0.5 * (W + W.T)).min() <= 0:
        raise NotNegative("-Im A_- is not positive definite")
    root, inv_root = herm_sqrt_inv(0.5 * (W + W.T), tol)
    root, inv_root = root.real, inv_root.real
    kappa = np.block([[root, np.zeros((n, n))], [-inv_root @ A.real, inv_root]])
    J = symplectic_J(n)
    resid = np.abs(kappa.T @ J @ kappa - J).max()
    if resid > 1e-12 * max(1.0, np.abs(kappa).max() ** 2):
        raise NumericalError(f"kappa symplectic residual {resid:.2e}")
    return kappa


def cplus_from_aplus(A_plus: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Cayley image C_+ = (1 - i A_+)^{-1} (1 + i A_+) of a positive graph.

    Positive definiteness of Im A_+ is equivalent to that of 1 - C_+^* C_+.
    """
    A = np.asarray(A_plus, dtype=complex)
    n = A.shape[0]
    if np.linalg.eigvalsh(0.5 * (A.imag + A.imag.T)).min() <= 0:
        raise NotPositive("Im A_+ is not positive definite")
    I = np.eye(n)
    C = np.linalg.solve(I - 1j * A, I + 1j * A)
    return 0.5 * (C + C.T)


def aplus_from_cplus(C_plus: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse Cayley map A_+ = i (1 + C_+)^{-1} (1 - C_+)."""
    C = np.asarray(C_plus, dtype=complex)
    n = C.shape[0]
    S = np.eye(n) - C.conj().T @ C
    if np.linalg.eigvalsh(0.5 * (S + S.conj().T)).min() <= tol.rank_tol:
        raise NotPositive("1 - C_+^* C_+ is not positive definite")
    pencil = np.eye(n) + C
    s = np.linalg.svd(pencil, compute_uv=False)
    if s[-1] <= tol.rank_tol * max(1.0, s[0]):
        raise SingularPencil("1 + C_+ is numerically singular")
    A = 1j * np.linalg.solve(pencil, np.eye(n) - C)
    return 0.5 * (A + A.T)


def fbi_matrix(A_plus: np.ndarray) -> np.ndarray:
    """2n x 2n matrix of the Bargmann-side canonical transformation
    determined by the positive graph A_+ (used only as a matrix, never as
    an integral operator)."""
    A = np.asarray(A_plus, dtype=complex)
    n = A.shape[0]
    I = np.eye(n)
    Minv = np.linalg.inv(I - 1j * A)
    return np.block([[I, -1j * I], [-Minv @ A, Minv]])


def fbi_matrix_inv(A_plus: np.ndarray) -> np.ndarray:
    """Closed-form inverse of fbi_matrix(A_plus)."""
    A = np.asarray(A_plus, dtype=complex)
    n = A.shape[0]
    I = np.eye(n)
    Minv = np.linalg.inv(I - 1j * A)
    return np.block([[Minv, 1j * I], [A @ Minv, I]])


def gaussian_transport(F_gauss: np.ndarray, kappa_inv: np.ndarray,
                       tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Transport of the Gaussian exp(i (x, F x) / 2) under the canonical
    transformation with inverse kappa_inv = [[A, B], [C, D]]:

        F_tilde = (D - F B)^{-1} (F A - C).

    Raises DegenerateTransport when D - F B is singular (the Gaussian
    degenerates into a delta distribution, excluded when Im F > 0 through
    the pipeline maps).
    """
    F = np.asarray(F_gauss, dtype=complex)
    kinv = np.asarray(kappa_inv, dtype=complex)
    n = F.shape[0]
    A, B = kinv[:n, :n], kinv[:n, n:]
    C, D = kinv[n:, :n], kinv[n:, n:]
    lhs = D - F @ B
    s = np.linalg.svd(lhs, compute_uv=False)
    if s[-1] <= tol.rank_tol * max(1.0, s[0]):
        raise DegenerateTransport("D - F B is numerically singular")
    Ft = np.linalg.solve(lhs, F @ A - C)
    scale = max(np.abs(Ft).max(), 1.0)
    if np.abs(Ft - Ft.T).max() > 1e-10 * scale:
        raise NumericalError("transported Gaussian matrix lost symmetry")
    return 0.5 * (Ft + Ft.T)


# ---------------------------------------------------------------------------
# Jordan reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JordanReduction:
    M: np.ndarray            # Jordan form, superdiagonal in {0, 1}
    G: np.ndarray            # invertible, G^{-1} M1 G = M
    ill_conditioned: bool    # cluster decision unstable under tol * 10 / 10


def _eig_sort_key(eigs: np.ndarray) -> np.ndarray:
    """Deterministic (Re, Im)-lexicographic ordering, with keys rounded
    relative to scale so roundoff noise cannot flip the order."""
    scale = max(np.abs(eigs).max(), 1.0)
    r = np.round(eigs.real / scale, 12)
    i = np.round(eigs.imag / scale, 12)
    return np.lexsort((i, r))


def _sorted_eigs(eigs: np.ndarray) -> np.ndarray:
    return eigs[_eig_sort_key(eigs)]


def _cluster(eigs: np.ndarray, tol: float) -> list[list[int]]:
    """Group eigenvalues by transitive proximity at radius tol."""
    order = _eig_sort_key(eigs)
    groups: list[list[int]] = []
    for i in order:
        for g in groups:
            if any(abs(eigs[i] - eigs[j]) <= tol for j in g):
                g.append(int(i))
                break
        else:
            groups.append([int(i)])
    groups.sort(key=lambda g: (np.mean(eigs[g]).real, np.mean(eigs[g]).imag))
    return groups


def _partition_signature(eigs: np.ndarray, tol: float) -> tuple:
    return tuple(tuple(sorted(g)) for g in _cluster(eigs, tol))


def _chain_basis(M1: np.ndarray, lam0: complex, mult: int, diam: float,
                 tol: Tolerance) -> list[list[np.ndarray]]:
    """Jordan chains for the cluster at lam0 by staircase rank deduction.

    Kernel thresholds are tied to the cluster diameter: eigenvalues of a
    defective block split by roughly the square root of the backward error,
    so rank decisions must sit above that noise floor.
    """
    n = M1.shape[0]
    B = M1 - lam0 * np.eye(n)
    scale = np.linalg.norm(M1, 2)
    thresh = max(tol.rank_tol * max(scale, 1.0), 4.0 * diam + 1e-14)
    kers: list[np.ndarray] = []
    Bp = np.eye(n, dtype=complex)
    while True:
        Bp = B @ Bp
        _, s, Vh = np.linalg.svd(Bp)
        k = int(np.sum(s <= thresh))
        kers.append(Vh[len(s) - k:].conj().T if k else np.zeros((n, 0), complex))
        if k >= mult or len(kers) > n:
            break
    dims = [K.shape[1] for K in kers]
    if dims[-1] != mult:
        raise NumericalError(
            f"staircase found kernel dimensions {dims}, expected {mult}; "
            "cluster tolerance may be inconsistent with the data")
    P = len(dims)
    chains: list[list[np.ndarray]] = []
    used = np.zeros((n, 0), dtype=complex)
    for p in range(P, 0, -1):
        n_p = dims[p - 1] - (dims[p - 2] if p >= 2 else 0)
        n_p1 = (dims[p] - dims[p - 1]) if p < P else 0
        for _ in range(n_p - n_p1):
            low = kers[p - 2] if p >= 2 else np.zeros((n, 0), complex)
            span = np.hstack([low, used]) if (low.size or used.size) else None
            K = kers[p - 1]
            if span is not None and span.size:
                Q, _ = np.linalg.qr(span)
                R = K - Q @ (Q.conj().T @ K)
            else:
                R = K
            j = int(np.argmax(np.linalg.norm(R, axis=0)))
            v = R[:, j]
            v = v / np.linalg.norm(v)
            chain = [v]
            for _ in range(p - 1):
                v = B @ v
                chain.append(v)
            chain = chain[::-1]          # bottom of the chain first
            chains.append(chain)
            used = np.hstack([used, np.column_stack(chain)])
    chains.sort(key=len, reverse=True)
    return chains


def jordan_reduce(M1: np.ndarray, tol: Tolerance = DEFAULT_TOL,
                  G: np.ndarray | None = None) -> JordanReduction:
    """Reduce M1 to Jordan normal form M with G^{-1} M1 G = M.

    When all eigenvalue gaps exceed cluster_tol this is a plain
    eigendecomposition with unit-norm columns (numerical Jordan structure
    is ill-posed, so the staircase path runs only for clustered
    eigenvalues).  For defective chains, a single scale per chain is fixed
    so the largest column has unit norm: per-column normalization would
    destroy the unit superdiagonal.  Callers may supply G to bypass the
    reduction entirely.

    The result carries ill_conditioned=True (not an error) when the cluster
    partition changes as cluster_tol is perturbed by a factor of 10 either
    way, or when the similarity residual exceeds 1e-8.
    """
    M1 = np.asarray(M1, dtype=complex)
    n = M1.shape[0]
    eigs = np.linalg.eigvals(M1)
    sig = _partition_signature(eigs, tol.cluster_tol)
    warn = (sig != _partition_signature(eigs, tol.cluster_tol * 10.0)
            or sig != _partition_signature(eigs, tol.cluster_tol / 10.0))

    if G is not None:
        G = np.asarray(G, dtype=complex)
        M = np.linalg.solve(G, M1 @ G)
        # snap to the structured bidiagonal form
        Ms = np.zeros_like(M)
        scale = max(np.abs(M).max(), 1.0)
        np.fill_diagonal(Ms, np.diag(M))
        for i in range(n - 1):
            if abs(M[i, i + 1]) > 1e-8 * scale:
                Ms[i, i + 1] = M[i, i + 1]
        if np.abs(M - Ms).max() > 1e-8 * scale:
            raise InputError("supplied G does not reduce M1 to bidiagonal form")
        return JordanReduction(M=Ms, G=G, ill_conditioned=warn)

    groups = _cluster(eigs, tol.cluster_tol)
    if all(len(g) == 1 for g in groups):
        lam, V = np.linalg.eig(M1)
        order = _eig_sort_key(lam)
        lam, V = lam[order], V[:, order]
        V = V / np.linalg.norm(V, axis=0)
        M = np.diag(lam)
        red = JordanReduction(M=M, G=V, ill_conditioned=warn)
    else:
        cols: list[np.ndarray] = []
        Mblocks = np.zeros((n, n), dtype=complex)
        pos = 0
        for g in groups:
            lam0 = complex(np.mean(eigs[g]))
            diam = max((abs(eigs[i] - eigs[j]) for i in g for j in g), default=0.0)
            if len(g) == 1:
                # simple eigenvalue: one eigenvector suffices
                chains = _chain_basis(M1, lam0, 1, 0.0, tol)
            else:
                chains = _chain_basis(M1, lam0, len(g), diam, tol)
            for chain in chains:
                L = len(chain)
                top = max(np.linalg.norm(v) for v in chain)
                for k, v in enumerate(chain):
                    cols.append(v / top)
                    Mblocks[pos + k, pos + k] = lam0
                    if k + 1 < L:
                        Mblocks[pos + k, pos + k + 1] = 1.0
                pos += L
        G0 = np.column_stack(cols)
        red = JordanReduction(M=Mblocks, G=G0, ill_conditioned=warn)

    resid = np.abs(np.linalg.solve(red.G, M1 @ red.G) - red.M).max()
    scale = max(np.abs(M1).max(), 1.0)
    if resid > 1e-6 * scale:
        raise NumericalError(f"jordan reduction residual {resid:.2e} too large")
    if resid > 1e-8 * scale and not red.ill_conditioned:
        red = replace(red, ill_conditioned=True)
    return red


# ---------------------------------------------------------------------------
# full reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalFormResult:
    """Output of the full reduction pipeline.

    lambdas are the upper-half-plane eigenvalues of the Hamilton map
    (eigenvalues of M are 2 * lambdas); gammas are the Jordan superdiagonal
    entries; kappa is the real straightening map; Phi2 is the strictly
    convex weight determined by (G, C_plus).
    """

    lambdas: tuple
    M: np.ndarray
    gammas: tuple
    G: np.ndarray
    C_plus: np.ndarray
    A_plus: np.ndarray
    Phi2: QuadraticWeight
    kappa: np.ndarray
    gauge: str = "unit-columns"
    gauge_scale: float = 1.0
    ill_conditioned: bool = False

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def with_gauge(self, r: float) -> "NormalFormResult":
        """Same reduction with G replaced by r G (r > 0); the weight and all
        downstream projection norms are gauge-invariant."""
        if r <= 0:
            raise InputError("gauge scale must be positive")
        G = r * self.G
        return replace(self, G=G, Phi2=weight_from_gc(G, self.C_plus),
                       gauge_scale=self.gauge_scale * r)

    def to_json_dict(self) -> dict:
        enc = lambda M: [[[z.real, z.imag] for z in row] for row in np.asarray(M, complex)]
        return {
            "n": self.n,
            "lambdas": [[z.real, z.imag] for z in self.lambdas],
            "M": enc(self.M),
            "gammas": list(self.gammas),
            "G": enc(self.G),
            "C_plus": enc(self.C_plus),
            "A_plus": enc(self.A_plus),
            "Phi2": self.Phi2.to_json_dict(),
            "kappa": enc(self.kappa),
            "gauge": {"normalization": self.gauge, "scale": self.gauge_scale},
            "ill_conditioned": self.ill_conditioned,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def reduce(q: QuadraticForm, tol: Tolerance = DEFAULT_TOL,
           G: np.ndarray | None = None, gauge_scale: float = 1.0,
           ) -> NormalFormResult:
    """Full reduction of an elliptic or partially elliptic quadratic form.

    Returns the normal-form data (M, G, C_+, A_+, Phi2, kappa).  The
    eigenvalues of M are checked against the upper-half-plane eigenvalues
    of 2F to 1e-9.  ``G`` bypasses the Jordan reduction; ``gauge_scale``
    rescales the canonical unit-column gauge by a positive factor.
    """
    cls = classify(q, tol)
    if cls.kind is Kind.NOT_COVERED:
        raise InputError("symbol is neither elliptic nor partially elliptic")
    F = hamilton_map(q)
    n = q.n
    plus, minus = stable_manifolds(F, tol)
    kappa = straighten_kappa(minus, tol)
    kappa_inv = np.linalg.inv(kappa)
    FR = kappa @ F.F @ kappa_inv
    Vplus = kappa @ plus.basis()
    A_plus = _graph_matrix(Vplus, tol)
    if np.linalg.eigvalsh(A_plus.imag).min() <= 0:
        raise NotPositive("straightened Lambda^+ lost positivity")
    C_plus = cplus_from_aplus(A_plus, tol)
    kapA = fbi_matrix(A_plus)
    Ft = kapA @ FR @ np.linalg.inv(kapA)
    off = max(np.abs(Ft[:n, n:]).max(), np.abs(Ft[n:, :n]).max())
    scale = max(np.abs(Ft).max(), 1.0)
    if off > 1e-9 * scale:
        raise NumericalError(f"normal form off-diagonal residual {off:.2e}")
    M1 = 2.0 * Ft[:n, :n]
    red = jordan_reduce(M1, tol, G=G)
    Gm = red.G * gauge_scale
    lambdas = tuple(np.diag(red.M) / 2.0)
    gammas = tuple(float(np.real(red.M[i, i + 1])) for i in range(n - 1))
    # reconstruction check: Spec M = Spec(2F) in the upper half-plane.
    # Defective eigenvalues split by ~sqrt(machine eps) under independent
    # perturbations, so compare multisets after joint clustering: within
    # each cluster, equal counts and matching means.
    lamF = np.linalg.eigvals(F.F)
    up = _sorted_eigs(2.0 * lamF[lamF.imag > 0])
    lamM = _sorted_eigs(np.linalg.eigvals(red.M))
    scale = max(1.0, np.abs(up).max())
    if np.abs(up - lamM).max() > 1e-9 * scale:
        joint = np.concatenate([up, lamM])
        ok = True
        for g in _cluster(joint, 10.0 * tol.cluster_tol * scale):
            from_up = sum(1 for i in g if i < n)
            if 2 * from_up != len(g):
                ok = False
                break
            mu = np.mean(joint[[i for i in g if i < n]])
            mm = np.mean(joint[[i for i in g if i >= n]])
            if abs(mu - mm) > 1e-9 * scale:
                ok = False
                break
        if not ok:
            raise NumericalError("Spec M does not match the UHP spectrum of 2F")
    Phi2 = weight_from_gc(Gm, C_plus)
    return NormalFormResult(
        lambdas=lambdas, M=red.M, gammas=gammas, G=Gm, C_plus=C_plus,
        A_plus=A_plus, Phi2=Phi2, kappa=kappa, gauge_scale=gauge_scale,
        ill_conditioned=red.ill_conditioned)
