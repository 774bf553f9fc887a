"""Quadratic Bargmann weights and their geometry.

A real-valued quadratic weight on C^n is determined by two matrices,

    Phi(x) = Re (x, Pxx x) + <Pxbx x, x>_herm,

with Pxx complex symmetric (the pluriharmonic data) and Pxbx Hermitian (the
Hermitian data).  Strict convexity means the full real Hessian in
(Re x, Im x) is positive definite.  All norms here use the weighted space of
entire functions square-integrable against exp(-2 Phi); the semiclassical
parameter is fixed to 1 in this module, since projection norms carry no
semiclassical content.

The module provides the Hermitian/pluriharmonic split, convexity bounds,
the (G, C_+) parameterization of weights and its inverse, the dual weight,
surface quadrature on the unit sphere of C^n, monomial norms and Gram
matrices, the dual basis to the monomials, and adjoint symbols of x and
d/dx as first-order operators.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import InputError, NotConvex, QuadratureNotConverged
from .matcore import DEFAULT_TOL, Tolerance, herm_sqrt_inv

__all__ = [
    "QuadraticWeight", "phi0", "weight_from_gc", "gc_from_weight",
    "dual_weight", "dual_gc", "evaluate", "split", "is_strictly_convex",
    "SphereQuadrature", "sphere_quadrature", "sphere_integrate",
    "sphere_measure_total", "moment_normalization",
    "norm_one", "monomial_norm", "log_monomial_norm_sq", "monomial_gram",
    "multi_indices", "DualBasisVector", "dual_basis", "adjoint_symbols",
    "gauss_hermite_cn", "log_sphere_integral",
]


# ---------------------------------------------------------------------------
# weight data type
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticWeight:
    """Real quadratic weight Phi(x) = Re (x, Pxx x) + <Pxbx x, x>."""

    n: int
    Pxx: np.ndarray
    Pxbx: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.Pxx, dtype=complex)
        H = np.asarray(self.Pxbx, dtype=complex)
        if P.shape != (self.n, self.n) or H.shape != (self.n, self.n):
            raise InputError("Pxx and Pxbx must be n x n")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(H))):
            raise InputError("weight matrices must be finite")
        scale = max(np.abs(P).max(), np.abs(H).max(), 1.0)
        if np.abs(P - P.T).max() > DEFAULT_TOL.sym_tol * scale:
            raise InputError("Pxx must be complex symmetric")
        if np.abs(H - H.conj().T).max() > DEFAULT_TOL.sym_tol * scale:
            raise InputError("Pxbx must be Hermitian")
        object.__setattr__(self, "Pxx", 0.5 * (P + P.T))
        object.__setattr__(self, "Pxbx", 0.5 * (H + H.conj().T))

    # -- geometry ----------------------------------------------------------

    def hessian_real(self) -> np.ndarray:
        """Real symmetric 2n x 2n matrix A with Phi(y) = (y, A y).

        A equals one half of the real Hessian of Phi in (Re x, Im x); its
        eigenvalue range gives the convexity bounds C_l, C_u.
        """
        P, H = self.Pxx, self.Pxbx
        A11 = P.real + H.real
        A22 = H.real - P.real
        A12 = -(P.imag + H.imag)
        return np.block([[A11, A12], [A12.T, A22]])

    def four_phi(self, x: np.ndarray) -> np.ndarray:
        """4 Phi evaluated on an (M, n) array of complex points."""
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        quad = np.real(np.einsum("mj,jk,mk->m", x, self.Pxx, x))
        herm = np.real(np.einsum("mj,jk,mk->m", x.conj(), self.Pxbx, x))
        return 4.0 * (quad + herm)

    def scaled(self, r2: float) -> "QuadraticWeight":
        """The weight r^2 * Phi."""
        return QuadraticWeight(self.n, r2 * self.Pxx, r2 * self.Pxbx)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        enc = lambda M: [[[z.real, z.imag] for z in row] for row in M]
        return {"n": self.n, "Pxx": enc(self.Pxx), "Pxbx": enc(self.Pxbx)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "QuadraticWeight":
        try:
            dec = lambda M: np.array([[complex(re, im) for re, im in row] for row in M])
            return cls(int(d["n"]), dec(d["Pxx"]), dec(d["Pxbx"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed QuadraticWeight JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "QuadraticWeight":
        try:
            return cls.from_json_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc


def phi0(n: int) -> QuadraticWeight:
    """The standard radial weight |x|^2 / 4."""
    return QuadraticWeight(n, np.zeros((n, n)), 0.25 * np.eye(n))


def evaluate(w: QuadraticWeight, x) -> float:
    """Phi(x) for a single point x in C^n."""
    return float(w.four_phi(np.asarray(x, dtype=complex)[None, :])[0] / 4.0)


def split(w: QuadraticWeight) -> tuple[QuadraticWeight, QuadraticWeight]:
    """(Hermitian part, pluriharmonic part); they sum to Phi pointwise.

    The Hermitian part also equals (Phi(x) + Phi(ix)) / 2.
    """
    Z = np.zeros((w.n, w.n))
    return QuadraticWeight(w.n, Z, w.Pxbx), QuadraticWeight(w.n, w.Pxx, Z)


def is_strictly_convex(w: QuadraticWeight) -> tuple[bool, float, float]:
    """(convex?, C_l, C_u) with C_l |x|^2 <= Phi(x) <= C_u |x|^2.

    C_l, C_u are the extreme eigenvalues of the real quadratic-form matrix
    of Phi (half the real Hessian).
    """
    lam = np.linalg.eigvalsh(w.hessian_real())
    return bool(lam[0] > 0), float(lam[0]), float(lam[-1])


def _require_convex(w: QuadraticWeight) -> tuple[float, float]:
    ok, cl, cu = is_strictly_convex(w)
    if not ok:
        raise NotConvex(f"weight is not strictly convex (C_l = {cl:.3e})")
    return cl, cu


# ---------------------------------------------------------------------------
# (G, C_+) parameterization and the dual weight
# ---------------------------------------------------------------------------

def weight_from_gc(G, C_plus) -> QuadraticWeight:
    """Weight with Pxbx = G*G/4 and Pxx = -G^T C_+ G / 4.

    This is the weight Phi(x) = (|G x|^2 - Re (G x, C_+ G x)) / 4; it is
    strictly convex exactly when 1 - C_+^* C_+ is positive definite.
    """
    G = np.asarray(G, dtype=complex)
    C = np.asarray(C_plus, dtype=complex)
    n = G.shape[0]
    return QuadraticWeight(n, -0.25 * G.T @ C @ G, 0.25 * G.conj().T @ G)


def gc_from_weight(w: QuadraticWeight,
                   tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Recover (G, C_+) from a strictly convex weight.

    G = 2 (Pxbx)^{1/2} (Hermitian square root, the canonical gauge) and
    C_+ = -4 G^{-T} Pxx G^{-1}.  weight_from_gc inverts this exactly.
    """
    _require_convex(w)
    root, _ = herm_sqrt_inv(w.Pxbx, tol)
    G = 2.0 * root
    Gi = np.linalg.inv(G)
    C = -4.0 * Gi.T @ w.Pxx @ Gi
    return G, 0.5 * (C + C.T)


def dual_gc(w: QuadraticWeight, tol: Tolerance = DEFAULT_TOL,
            ) -> tuple[np.ndarray, np.ndarray, float]:
    """(G_dagger, C_+_dagger, symmetry residual) of the dual weight.

    With E = (1 - C_+^* C_+)^{-1/2}:  G_dagger = E (G^*)^{-1} and
    C_+_dagger = -E^{-T} C_+ E.  The construction leaves symmetry of
    C_+_dagger implicit; it is symmetrized here and the residual reported.
    """
    G, C = gc_from_weight(w, tol)
    S = np.eye(w.n) - C.conj().T @ C
    lam = np.linalg.eigvalsh(0.5 * (S + S.conj().T))
    if lam.min() <= tol.rank_tol:
        raise NotConvex("1 - C_+^* C_+ is not positive definite")
    _, E = herm_sqrt_inv(0.5 * (S + S.conj().T), tol)   # E = S^{-1/2}
    Gd = E @ np.linalg.inv(G.conj().T)
    Cd = -np.linalg.inv(E.T) @ C @ E
    resid = float(np.abs(Cd - Cd.T).max())
    return Gd, 0.5 * (Cd + Cd.T), resid


def dual_weight(w: QuadraticWeight, tol: Tolerance = DEFAULT_TOL) -> QuadraticWeight:
    """The dual weight: the monomial dual basis of H_Phi corresponds
    unitarily to monomials in H_{Phi_dagger}."""
    Gd, Cd, _ = dual_gc(w, tol)
    return weight_from_gc(Gd, Cd)


# ---------------------------------------------------------------------------
# sphere quadrature on {|omega| = 1} in C^n
# ---------------------------------------------------------------------------

def sphere_measure_total(n: int) -> float:
    """Surface measure of the unit sphere of C^n: 2 pi^n / (n-1)!."""
    return 2.0 * np.pi**n / math.factorial(n - 1)


def moment_normalization(alpha: Iterable[int], n: int) -> float:
    """C(alpha; n) = integral of |omega^alpha|^2 over the sphere
    = 2 pi^n alpha! / (|alpha| + n - 1)!."""
    alpha = tuple(alpha)
    return 2.0 * np.pi**n * math.exp(
        sum(gammaln(a + 1) for a in alpha) - gammaln(sum(alpha) + n))


@dataclass(frozen=True)
class SphereQuadrature:
    """Quadrature nodes on {|omega|=1} with weights summing to the total
    surface measure."""

    n: int
    order: int
    nodes: np.ndarray       # (M, n) complex, unit norm
    weights: np.ndarray     # (M,) positive


@lru_cache(maxsize=32)
def _phi_grid(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Moduli s (K, n) and weights (K,) for the radial-angle part.

    Hyperspherical angles phi_1..phi_{n-1} in [0, pi/2] with Gauss-Legendre;
    density prod_j s_j times the S^{n-1} surface element restricted to the
    positive orthant.
    """
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    xs, ws = leggauss(order)
    f = (xs + 1.0) * (np.pi / 4.0)
    wf = ws * (np.pi / 4.0)
    fg = np.meshgrid(*([f] * (n - 1)), indexing="ij")
    wg = np.meshgrid(*([wf] * (n - 1)), indexing="ij")
    s = np.ones((n,) + fg[0].shape)
    wphi = np.ones(fg[0].shape)
    for j in range(n - 1):
        s[j] *= np.cos(fg[j])
        s[j + 1:] *= np.sin(fg[j])
        wphi *= wg[j]
    dens = np.prod(s, axis=0)
    for j in range(n - 1):
        dens *= np.sin(fg[j]) ** (n - 2 - j)
    return s.reshape(n, -1).T.copy(), (wphi * dens).ravel()


def sphere_quadrature(n: int, order: int) -> SphereQuadrature:
    """Tensor rule: trapezoid in each torus angle (spectrally accurate for
    periodic integrands), Gauss-Legendre in the moduli angles.

    Node count is order for n = 1 and order^(2n-1) in general; for n >= 3
    keep the order modest or integrate through sphere_integrate which
    streams chunks instead of materializing all nodes.
    """
    if n == 1:
        t = np.linspace(0.0, 2.0 * np.pi, order, endpoint=False)
        return SphereQuadrature(1, order, np.exp(1j * t)[:, None],
                                np.full(order, 2.0 * np.pi / order))
    s, wphi = _phi_grid(n, order)
    t = np.linspace(0.0, 2.0 * np.pi, order, endpoint=False)
    tg = np.meshgrid(*([t] * n), indexing="ij")
    ph = np.exp(1j * np.stack([g.ravel() for g in tg]))       # (n, Mt)
    om = (s.T[:, :, None] * ph[:, None, :]).reshape(n, -1).T
    wt = np.repeat(wphi[:, None], ph.shape[1], axis=1).ravel()
    wt = wt * (2.0 * np.pi / order) ** n
    return SphereQuadrature(n, order, om, wt)


def sphere_integrate(n: int, order: int,
                     integrand: Callable[[np.ndarray], np.ndarray]) -> complex:
    """Integrate over the sphere, streaming the torus factor in chunks so
    large orders stay within memory.  ``integrand`` maps an (M, n) complex
    array of unit vectors to values."""
    if n == 1:
        q = sphere_quadrature(1, order)
        return complex(np.sum(q.weights * integrand(q.nodes)))
    s, wphi = _phi_grid(n, order)
    t = np.linspace(0.0, 2.0 * np.pi, order, endpoint=False)
    tg = np.meshgrid(*([t] * n), indexing="ij")
    ph = np.exp(1j * np.stack([g.ravel() for g in tg]))       # (n, Mt)
    wtheta = (2.0 * np.pi / order) ** n
    total = 0.0 + 0.0j
    chunk = max(1, int(2e6 // ph.shape[1]))
    for lo in range(0, s.shape[0], chunk):
        sl = s[lo:lo + chunk]
        om = (sl.T[:, :, None] * ph[:, None, :]).reshape(n, -1).T
        vals = np.asarray(integrand(om)).reshape(sl.shape[0], -1)
        total += np.sum(wphi[lo:lo + chunk] * np.sum(vals, axis=1)) * wtheta
    return complex(total)


def log_sphere_integral(w: QuadraticWeight, alpha: tuple, order: int) -> float:
    """log of the positive integral of |omega^alpha|^2 (4 Phi)^{-|alpha|-n},
    evaluated stably in log space (the integrand spans many decades for
    large |alpha|)."""
    a = np.asarray(alpha, dtype=float)
    power = sum(alpha) + w.n

    def logf(om):
        with np.errstate(divide="ignore"):
            num = np.sum(2.0 * a * np.log(np.abs(om)), axis=1)
        return num - power * np.log(w.four_phi(om))

    # fold the max-shift into one streaming pass: per-chunk (max, shifted
    # sum) pairs merge into a single log-sum at the end
    if w.n == 1:
        q = sphere_quadrature(1, order)
        lf = logf(q.nodes)
        m = float(np.max(lf))
        return m + np.log(float(np.sum(q.weights * np.exp(lf - m))))
    s, wphi = _phi_grid(w.n, order)
    t = np.linspace(0.0, 2.0 * np.pi, order, endpoint=False)
    tg = np.meshgrid(*([t] * w.n), indexing="ij")
    ph = np.exp(1j * np.stack([g.ravel() for g in tg]))
    wtheta = (2.0 * np.pi / order) ** w.n
    chunk = max(1, int(2e6 // ph.shape[1]))
    pieces = []   # (log max, weighted sum of exp(shifted))
    for lo in range(0, s.shape[0], chunk):
        sl = s[lo:lo + chunk]
        om = (sl.T[:, :, None] * ph[:, None, :]).reshape(w.n, -1).T
        lf = logf(om).reshape(sl.shape[0], -1)
        m = float(np.max(lf))
        val = np.sum(wphi[lo:lo + chunk] * np.sum(np.exp(lf - m), axis=1)) * wtheta
        pieces.append((m, val))
    M = max(m for m, _ in pieces)
    return M + np.log(sum(v * np.exp(m - M) for m, v in pieces))


# ---------------------------------------------------------------------------
# norms of monomials
# ---------------------------------------------------------------------------

def _default_order(n: int) -> int:
    return {1: 512, 2: 64}.get(n, 16)


def _converged(fn: Callable[[int], float], order: int, rtol: float = 1e-8,
               max_doublings: int = 4, what: str = "quadrature",
               log_mode: bool = True) -> float:
    """Run fn at (order, 2*order); escalate until two successive resolutions
    agree to rtol, else raise QuadratureNotConverged.

    With log_mode the values are logarithms, so agreement is absolute in
    the logs (relative in the underlying quantities).
    """
    prev = fn(order)
    for _ in range(max_doublings):
        order *= 2
        cur = fn(order)
        err = abs(cur - prev) if log_mode else abs(cur - prev) / max(abs(cur), 1e-300)
        if err <= rtol:
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"{what} did not converge (last two values {prev:.6e} at order {order})")


def norm_one(w: QuadraticWeight) -> float:
    """Norm of the constant function 1 in H_Phi, by the closed-form complex
    Gaussian integral: ||1||^2 = pi^n det(A)^{-1/2} with A the real
    quadratic-form matrix of 2 Phi."""
    _require_convex(w)
    A = 2.0 * w.hessian_real()
    sign, logdet = np.linalg.slogdet(A)
    if sign <= 0:
        raise NotConvex("Hessian not positive definite")
    return float(np.exp(0.5 * (w.n * np.log(np.pi) - 0.5 * logdet)))


def log_monomial_norm_sq(w: QuadraticWeight, alpha: tuple,
                         order: int | None = None, rtol: float = 1e-8) -> float:
    """log ||x^alpha||^2_{H_Phi} via the polar reduction

        ||x^alpha||^2 = 2^{|alpha|+n-1} (|alpha|+n-1)! *
                        int |omega^alpha|^2 (4 Phi(omega))^{-|alpha|-n} dL.

    Gamma factors are combined in log space so degrees up to several
    hundred stay finite.
    """
    _require_convex(w)
    alpha = tuple(int(a) for a in alpha)
    d = sum(alpha)
    base = _default_order(w.n) if order is None else order
    log_int = _converged(lambda o: log_sphere_integral(w, alpha, o), base,
                         rtol=rtol, what=f"monomial norm |alpha|={d}")
    return (d + w.n - 1) * np.log(2.0) + float(gammaln(d + w.n)) + log_int


def monomial_norm(w: QuadraticWeight, alpha: tuple,
                  order: int | None = None) -> float:
    """||x^alpha||_{H_Phi}; overflows for very large |alpha|, use
    log_monomial_norm_sq there."""
    return float(np.exp(0.5 * log_monomial_norm_sq(w, alpha, order)))


def multi_indices(n: int, D: int) -> list[tuple]:
    """All multi-indices with |alpha| <= D, ordered by degree then
    lexicographically (a deterministic basis ordering)."""
    out = []
    for d in range(D + 1):
        block = sorted({a for a in itertools.product(range(d + 1), repeat=n)
                        if sum(a) == d}, reverse=True)
        out.extend(block)
    return out


def _gram_quadrature(w: QuadraticWeight, idx: list[tuple], order: int) -> np.ndarray:
    """Gram entries by the polar reduction with mixed moments:

        <x^a, x^b> = Gamma((|a|+|b|)/2 + n) / 2 *
                     int omega^a conj(omega)^b (2 Phi)^{-(|a|+|b|)/2-n} dL.

    The radial factor splits per index, so the whole matrix is one
    node-weighted outer product, accumulated in chunks.
    """
    n = w.n
    degs = np.array([sum(a) for a in idx])
    A = np.array(idx)       # (K, n)
    K = len(idx)
    G0 = np.zeros((K, K), dtype=complex)

    def accumulate(om, wt):
        twoPhi = 0.5 * w.four_phi(om)
        logr = np.log(twoPhi)
        U = np.empty((K, om.shape[0]), dtype=complex)
        for i in range(K):
            U[i] = np.prod(om ** A[i], axis=1) * np.exp(
                -(degs[i] / 2.0 + n / 2.0) * logr)
        nonlocal G0
        G0 += (U * wt) @ U.conj().T

    if n == 1:
        q = sphere_quadrature(1, order)
        accumulate(q.nodes, q.weights)
    else:
        s, wphi = _phi_grid(n, order)
        t = np.linspace(0.0, 2.0 * np.pi, order, endpoint=False)
        tg = np.meshgrid(*([t] * n), indexing="ij")
        ph = np.exp(1j * np.stack([g.ravel() for g in tg]))
        wtheta = (2.0 * np.pi / order) ** n
        chunk = max(1, int(4e5 // ph.shape[1]))
        for lo in range(0, s.shape[0], chunk):
            sl = s[lo:lo + chunk]
            om = (sl.T[:, :, None] * ph[:, None, :]).reshape(n, -1).T
            wt = np.repeat(wphi[lo:lo + chunk, None], ph.shape[1], 1).ravel() * wtheta
            accumulate(om, wt)
    pref = 0.5 * np.exp(gammaln((degs[:, None] + degs[None, :]) / 2.0 + n))
    return G0 * pref


def _gram_moments(w: QuadraticWeight, idx: list[tuple]) -> np.ndarray:
    """Exact Gram entries by the Gaussian moment recursion (Stein/Wick).

    exp(-2 Phi) is an unnormalized centered Gaussian on R^{2n}; monomial
    moments in (x, conj x) follow the two-term integration-by-parts
    recursion with covariances E[x x^T] and E[x x^*] of that Gaussian.
    Exact up to roundoff, so it scales to the high degrees the tau-norm
    oracle needs, where quadrature would be hopeless.
    """
    n = w.n
    Sy = np.linalg.inv(4.0 * w.hessian_real())
    T = np.hstack([np.eye(n), 1j * np.eye(n)])
    Cxx = T @ Sy @ T.T
    Cxxb = T @ Sy @ T.conj().T
    pos = {a: i for i, a in enumerate(idx)}
    K = len(idx)
    m = np.zeros((K, K), dtype=complex)
    m0 = norm_one(w) ** 2

    def get(a, b):
        if min(a) < 0 or min(b) < 0:
            return 0.0
        return m[pos[tuple(a)], pos[tuple(b)]]

    pairs = sorted(((a, b) for a in idx for b in idx),
                   key=lambda ab: (sum(ab[0]) + sum(ab[1]), sum(ab[1])))
    for a, b in pairs:
        ia, ib = pos[a], pos[b]
        da, db = sum(a), sum(b)
        if da == 0 and db == 0:
            m[ia, ib] = m0
            continue
        if (da + db) % 2 == 1:
            continue
        if da == 0:
            m[ia, ib] = np.conj(m[ib, ia])
            continue
        j = next(k for k in range(n) if a[k] > 0)
        am = list(a)
        am[j] -= 1
        tot = 0.0 + 0.0j
        for k in range(n):
            if am[k] > 0:
                a2 = list(am)
                a2[k] -= 1
                tot += Cxx[j, k] * am[k] * get(a2, b)
            if b[k] > 0:
                b2 = list(b)
                b2[k] -= 1
                tot += Cxxb[j, k] * b[k] * get(am, b2)
        m[ia, ib] = tot
    return m


def monomial_gram(w: QuadraticWeight, D: int, order: int | None = None,
                  method: str = "auto") -> tuple[list[tuple], np.ndarray]:
    """(indices, Gram matrix) of the monomials {x^alpha : |alpha| <= D}.

    method "quadrature" uses the polar reduction with two-resolution
    convergence control; "moments" uses the exact Gaussian moment
    recursion; "auto" picks moments beyond D = 10 where quadrature cost
    and conditioning stop being worthwhile.  The two agree to quadrature
    accuracy and are cross-checked in the test suite.
    """
    _require_convex(w)
    idx = multi_indices(w.n, D)
    if method == "auto":
        method = "moments" if D > 10 else "quadrature"
    if method == "moments":
        return idx, _gram_moments(w, idx)
    if method != "quadrature":
        raise ValueError(f"unknown gram method {method!r}")
    base = _default_order(w.n) if order is None else order
    prev = _gram_quadrature(w, idx, base)
    for _ in range(3):
        base *= 2
        cur = _gram_quadrature(w, idx, base)
        scale = np.abs(cur).max()
        if np.abs(cur - prev).max() <= 1e-8 * scale:
            return idx, cur
        prev = cur
    raise QuadratureNotConverged(f"gram quadrature did not converge by order {base}")


# ---------------------------------------------------------------------------
# dual basis and adjoint symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualBasisVector:
    """phi_dagger_alpha = poly(x) * C0 * exp((x, Pxx x)); poly maps
    multi-index -> coefficient and has degree exactly |alpha|."""

    alpha: tuple
    poly: dict
    C0: float

    def degree(self) -> int:
        return max((sum(m) for m, c in self.poly.items() if c != 0), default=0)


@dataclass(frozen=True)
class AdjointSymbols:
    """x* = Ax x + Bx d/dx and (d/dx)* = Ad x + Bd d/dx on H_Phi (h = 1)."""

    Ax: np.ndarray
    Bx: np.ndarray
    Ad: np.ndarray
    Bd: np.ndarray


def adjoint_symbols(w: QuadraticWeight) -> AdjointSymbols:
    """First-order representations of the adjoints of multiplication by x
    and of holomorphic differentiation on H_Phi."""
    P, H = w.Pxx, w.Pxbx
    Hc_inv = np.linalg.inv(H.conj())
    Ax = -Hc_inv @ P
    Bx = 0.5 * Hc_inv
    Ad = 2.0 * H - 2.0 * P.conj() @ Hc_inv @ P
    Bd = P.conj() @ Hc_inv
    return AdjointSymbols(Ax=Ax, Bx=Bx, Ad=Ad, Bd=Bd)


def _raise_poly(poly: dict, j: int, H: np.ndarray, B: np.ndarray, n: int) -> dict:
    """Apply the j-th raising operator (2 H x)_j + (B d/dx)_j to poly."""
    out: dict = {}
    for mon, cf in poly.items():
        for k in range(n):
            if H[j, k] != 0:
                m2 = tuple(x + (1 if l == k else 0) for l, x in enumerate(mon))
                out[m2] = out.get(m2, 0.0) + 2.0 * H[j, k] * cf
            if mon[k] > 0 and B[j, k] != 0:
                m2 = tuple(x - (1 if l == k else 0) for l, x in enumerate(mon))
                out[m2] = out.get(m2, 0.0) + B[j, k] * mon[k] * cf
    return out


def dual_basis(w: QuadraticWeight, alpha: tuple) -> DualBasisVector:
    """The alpha-th member of the family biorthogonal to the monomials.

    phi_dagger_0 = C0 exp((x, Pxx x)) with C0 = (2/pi)^n det Pxbx, and

        phi_dagger_alpha = (alpha!)^{-1} [ (2 Pxbx x + conj(Pxx)
                            conj(Pxbx)^{-1} d/dx)^alpha 1 ] phi_dagger_0.

    The raising operators commute (their commutators cancel because Pxx is
    symmetric), so the multi-index power is unambiguous.
    """
    _require_convex(w)
    alpha = tuple(int(a) for a in alpha)
    n = w.n
    H = w.Pxbx
    B = w.Pxx.conj() @ np.linalg.inv(w.Pxbx.conj())
    poly = {tuple([0] * n): 1.0 + 0.0j}
    for j in range(n):
        for _ in range(alpha[j]):
            poly = _raise_poly(poly, j, H, B, n)
    fact = math.exp(sum(gammaln(a + 1) for a in alpha))
    poly = {m: c / fact for m, c in poly.items() if c != 0}
    C0 = float((2.0 / np.pi) ** n * np.real(np.linalg.det(w.Pxbx)))
    return DualBasisVector(alpha=alpha, poly=poly, C0=C0)


# ---------------------------------------------------------------------------
# Gauss-Hermite quadrature on C^n (oracle substrate for inner products)
# ---------------------------------------------------------------------------

def gauss_hermite_cn(A: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes x (M, n) and weights for integrals of f(x) exp(-(y, A y))
    over C^n, y = (Re x, Im x), A real symmetric positive definite.

    Tensor Gauss-Hermite after the Cholesky change of variables; exact for
    polynomial f of real total degree < 2 * order.
    """
    d = A.shape[0]
    n = d // 2
    xs, ws = hermgauss(order)
    L = np.linalg.cholesky(A)
    grids = np.meshgrid(*([xs] * d), indexing="ij")
    T = np.stack([g.ravel() for g in grids], axis=-1)
    W = np.meshgrid(*([ws] * d), indexing="ij")
    wt = np.prod(np.stack([g.ravel() for g in W], axis=-1), axis=-1)
    Y = T @ np.linalg.inv(L)
    wt = wt / abs(np.linalg.det(L))
    return Y[:, :n] + 1j * Y[:, n:], wt
