"""Eigenvalue lattice, Taylor-truncation projections, and their norms.

The classical (h = 1) spectrum of a reduced operator is the lattice
mu_alpha = (1/i) sum_j (2 alpha_j + 1) lambda_j over multi-indices alpha,
with lambda_j the upper-half-plane eigenvalues of the Hamilton map.  The
spectral projection for an isolated mu is the Taylor truncation keeping
exactly the coefficients alpha with mu_alpha = mu.

For simple lattice points (|S| = 1) the operator norm of the projection on
H_Phi has the closed form

    ||Pi_alpha||^2 = det(1 - C_+^* C_+)^{-1/2} J(Phi, alpha) J(Phi_dag, alpha)

with J given by a sphere integral; an independent Gram-matrix oracle
(tau_norm_oracle) verifies it and covers the multiplicity > 1 case, where
no closed form is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .errors import (DegenerateCplus, InputError, NotConvex,
                     OptimizerNotConverged)
from .matcore import DEFAULT_TOL, Tolerance
from .normalform import NormalFormResult, stable_manifolds
from .symplectic import QuadraticForm, hamilton_map
from .weights import (QuadraticWeight, dual_gc, dual_weight, gc_from_weight,
                      is_strictly_convex, log_sphere_integral, monomial_gram,
                      moment_normalization, multi_indices, weight_from_gc)

__all__ = [
    "LatticePoint", "ProjectionNormReport", "TauNorm",
    "mu", "enumerate_lattice", "taylor_projection",
    "tau_norm_at_degree", "tau_norm_oracle", "tau_bound", "exact_J_bound",
    "log_J", "projection_norm_formula", "asymptotics_1d", "growth_rate",
    "eigen_projection_norm", "orthogonality_test", "OrthogonalityEvidence",
]


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def mu(lambdas, alpha, h: float = 1.0) -> complex:
    """mu_alpha = (h/i) sum_j (2 alpha_j + 1) lambda_j."""
    lam = np.asarray(lambdas, dtype=complex)
    a = np.asarray(alpha)
    return complex((h / 1j) * np.sum((2 * a + 1) * lam))


@dataclass(frozen=True)
class LatticePoint:
    mu: complex
    alphas: tuple            # all multi-indices with this eigenvalue
    simple: bool

    def to_json_dict(self) -> dict:
        return {"mu": [self.mu.real, self.mu.imag],
                "alphas": [list(a) for a in self.alphas],
                "simple": self.simple}


def enumerate_lattice(lambdas, R: float, h: float = 1.0,
                      collision_rtol: float = 1e-9) -> list[LatticePoint]:
    """All lattice points with |mu| <= R, collisions grouped.

    Since Re mu_alpha >= (2|alpha| + n) h min Im lambda, the enumeration is
    cut at |alpha| <= R / (2 h min Im lambda).  Collisions are grouped at
    radius collision_rtol * (1 + |mu|).
    """
    lam = np.asarray(lambdas, dtype=complex)
    if np.any(lam.imag <= 0):
        raise InputError("all lambdas must have positive imaginary part")
    n = lam.size
    cut = int(math.floor(R / (2.0 * h * lam.imag.min()))) + 1
    pts = []
    for a in multi_indices(n, cut):
        z = mu(lam, a, h)
        if abs(z) <= R:
            pts.append((z, a))
    pts.sort(key=lambda t: (t[0].real, t[0].imag, t[1]))
    out: list[LatticePoint] = []
    for z, a in pts:
        if out and abs(z - out[-1].mu) <= collision_rtol * (1.0 + abs(z)):
            prev = out.pop()
            alphas = prev.alphas + (a,)
            # representative: mean of the colliding values
            zz = (prev.mu * len(prev.alphas) + z) / len(alphas)
            out.append(LatticePoint(mu=zz, alphas=alphas, simple=False))
        else:
            out.append(LatticePoint(mu=z, alphas=(a,), simple=True))
    return out


def taylor_projection(coeffs: dict, S) -> dict:
    """Truncation keeping exactly the Taylor coefficients with alpha in S."""
    S = {tuple(a) for a in S}
    return {a: c for a, c in coeffs.items() if tuple(a) in S}


# ---------------------------------------------------------------------------
# tau-norm oracle (Gram matrix route)
# ---------------------------------------------------------------------------

def _normalized_gram(w: QuadraticWeight, D: int, method: str):
    idx, P = monomial_gram(w, D, method=method)
    d = np.sqrt(np.real(np.diag(P)))
    return idx, P / np.outer(d, d)


def tau_norm_at_degree(w: QuadraticWeight, S, D: int,
                       method: str = "auto",
                       _gram=None) -> float:
    """Norm of the Taylor truncation tau_S restricted to polynomials of
    degree <= D in H_Phi: the largest generalized eigenvalue of
    (T^* P T, P) for the monomial Gram matrix P and the 0/1 selection T.

    Nondecreasing in D, converging to ||tau_S|| from below.
    """
    S = {tuple(a) for a in S}
    if D < max(sum(a) for a in S):
        raise InputError("D must be at least the top degree in S")
    idx, Pn = _gram if _gram is not None else _normalized_gram(w, D, method)
    keep = [i for i, a in enumerate(idx) if sum(a) <= D]
    idx = [idx[i] for i in keep]
    Pn = Pn[np.ix_(keep, keep)]
    sel = np.array([a in S for a in idx])
    if sel.sum() == 1:
        # singleton: T^* P T is rank one, the top generalized eigenvalue is
        # P_aa (P^{-1})_aa, i.e. one entry of the inverse in the scaled basis
        i = int(np.nonzero(sel)[0][0])
        Pinv = np.linalg.inv(Pn)
        return float(np.sqrt(np.real(Pinv[i, i])))
    import scipy.linalg as sla
    A = Pn * np.outer(sel, sel)
    lam = sla.eigh(A, Pn, eigvals_only=True)
    return float(np.sqrt(max(lam[-1], 0.0)))


@dataclass(frozen=True)
class TauNorm:
    value: float             # best (extrapolated) estimate of ||tau_S||
    converged: bool
    D_used: int
    raw: float               # last un-extrapolated ladder value


def _aitken(seq: np.ndarray) -> np.ndarray:
    d1 = np.diff(seq)
    dd = np.diff(seq, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        acc = seq[2:] - d1[1:] ** 2 / dd
    return np.where(np.isfinite(acc), acc, seq[2:])


def tau_norm_oracle(w: QuadraticWeight, S, D: int | None = None,
                    rtol: float = 1e-6, method: str = "moments") -> TauNorm:
    """Converged estimate of ||tau_S|| through the degree ladder.

    Evaluates tau_norm_at_degree on D = M, M+2, M+4, ... (M the top degree
    in S; the Gram only couples degrees of equal parity, so odd steps add
    nothing) and accelerates the geometrically converging tail with
    iterated Aitken extrapolation.  Converged means successive estimates
    agree to rtol; if the cap D is hit first, the best value is returned
    with converged=False rather than raising, so callers can triage.
    """
    S = {tuple(a) for a in S}
    M = max(sum(a) for a in S)
    cap = D if D is not None else M + 40
    idx, Pn = _normalized_gram(w, cap, method)
    ladder = list(range(M, cap + 1, 2))
    vals = []
    best, converged = None, False
    for k, Dk in enumerate(ladder):
        vals.append(tau_norm_at_degree(w, S, Dk, _gram=(idx, Pn)))
        if len(vals) < 4:
            continue
        acc = np.asarray(vals, dtype=float)
        for _ in range(3):
            if acc.size < 3:
                break
            nxt = _aitken(acc)
            # keep acceleration only while it stays sane (monotone tails can
            # make Aitken blow up when increments hit roundoff)
            if not np.all(np.isfinite(nxt)) or np.any(nxt <= 0):
                break
            acc = nxt
        best = float(acc[-1])
        if acc.size >= 2 and abs(acc[-1] - acc[-2]) <= rtol * abs(acc[-1]):
            converged = True
            break
    if best is None:
        best = vals[-1]
    return TauNorm(value=best, converged=converged, D_used=ladder[len(vals) - 1],
                   raw=vals[-1])


# ---------------------------------------------------------------------------
# closed-form norms, bounds, asymptotics
# ---------------------------------------------------------------------------

def log_J(w: QuadraticWeight, alpha, order: int | None = None) -> float:
    """log J(Phi, alpha) where

        J = int (4 Phi)^{-|alpha|-n} |omega^alpha|^2 dL / C(alpha; n),

    the sphere-integral normalization of (2 pi)^{-n} 2^{-|alpha|}
    ||x^alpha||^2 / alpha!.
    """
    from .weights import _converged, _default_order
    alpha = tuple(int(a) for a in alpha)
    base = _default_order(w.n) if order is None else order
    li = _converged(lambda o: log_sphere_integral(w, alpha, o), base,
                    what=f"J integral alpha={alpha}")
    return li - math.log(moment_normalization(alpha, w.n))


def projection_norm_formula(w: QuadraticWeight, alpha,
                            order: int | None = None,
                            tol: Tolerance = DEFAULT_TOL) -> float:
    """||Pi_alpha|| on H_Phi by the closed form

        ||Pi_alpha||^2 = det(1 - C_+^* C_+)^{-1/2} J(Phi, alpha)
                                                   J(Phi_dagger, alpha).

    Equals 1 exactly for radial weights; always >= 1.
    """
    _, C = gc_from_weight(w, tol)
    wd = dual_weight(w, tol)
    S = np.eye(w.n) - C.conj().T @ C
    sign, logdet = np.linalg.slogdet(0.5 * (S + S.conj().T))
    if sign <= 0:
        raise NotConvex("1 - C_+^* C_+ not positive definite")
    val = -0.5 * logdet + log_J(w, alpha, order) + log_J(wd, alpha, order)
    return float(np.exp(0.5 * val))


def tau_bound(w: QuadraticWeight, S) -> float:
    """Elementary bound (C_u / C_l)^{(n + M) / 2}, M the top degree in S."""
    ok, cl, cu = is_strictly_convex(w)
    if not ok:
        raise NotConvex("weight is not strictly convex")
    M = max(sum(a) for a in ({tuple(a) for a in S}))
    return float((cu / cl) ** (0.5 * (w.n + M)))


def exact_J_bound(w: QuadraticWeight, alpha) -> float:
    """J(Phi, alpha) <= (inf_{|omega|=1} 4 Phi)^{-|alpha|-n}.

    The infimum of 4 Phi on the sphere is 4 C_l exactly (the least
    eigenvalue of the real quadratic form), so no optimization is needed.
    """
    ok, cl, _ = is_strictly_convex(w)
    if not ok:
        raise NotConvex("weight is not strictly convex")
    d = sum(alpha)
    return float((4.0 * cl) ** (-(d + w.n)))


def asymptotics_1d(C_plus: complex, N: int,
                   nodes: int = 16384) -> tuple[float, float]:
    """(scaled_norm, leading_term) of the dimension-1 projection norm.

    scaled_norm = ((1-|C|)/(1+|C|))^{N/2} ||Pi_N|| with ||Pi_N|| computed
    from the trapezoid rule on

        I_N = int_0^{2pi} (1 - |C| cos 2t)^{-N-1} dt,

    via ||Pi_N||^2 = (1-|C|^2)^{N+1/2} I_N^2 / (2 pi)^2; the leading term is
    c_0 N^{-1/2} with c_0 = (2 pi |C|)^{-1/2} ((1+|C|)/(1-|C|))^{1/4}.
    Everything is assembled in log space so N in the hundreds stays exact.
    """
    c = abs(C_plus)
    if c < 1e-12:
        raise DegenerateCplus("|C_+| ~ 0: normal case, expansion is vacuous")
    if c >= 1.0:
        raise InputError("|C_+| must be < 1 for a strictly convex weight")
    t = np.linspace(0.0, 2.0 * np.pi, nodes, endpoint=False)
    logf = -(N + 1.0) * np.log1p(-c * np.cos(2.0 * t))
    m = logf.max()
    logI = m + np.log(np.mean(np.exp(logf - m))) + np.log(2.0 * np.pi)
    logPi = 0.5 * (N + 0.5) * np.log1p(-c * c) + logI - np.log(2.0 * np.pi)
    log_scaled = 0.5 * N * (np.log1p(-c) - np.log1p(c)) + logPi
    c0 = (2.0 * np.pi * c) ** -0.5 * ((1.0 + c) / (1.0 - c)) ** 0.25
    return float(np.exp(log_scaled)), float(c0 / np.sqrt(N))


# ---------------------------------------------------------------------------
# growth rates (sphere optimization)
# ---------------------------------------------------------------------------

def _sphere_point(params: np.ndarray, n: int) -> np.ndarray:
    phis, thetas = params[:n - 1], params[n - 1:]
    s = np.ones(n)
    for j, p in enumerate(phis):
        s[j] *= np.cos(p)
        s[j + 1:] *= np.sin(p)
    return s * np.exp(1j * thetas)


def _sup_log_on_sphere(logf, n: int, ngrid: int, nstart: int,
                       spread_tol: float) -> float:
    """sup of a smooth log-scale function on {|omega|=1}: dense coarse grid
    then Nelder-Mead polish from the best starts; demands that at least two
    polished runs agree with the best to spread_tol."""
    if n == 1:
        axes = [np.linspace(0.0, 2.0 * np.pi, max(ngrid, 64), endpoint=False)]
    else:
        axes = ([np.linspace(0.0, np.pi / 2.0, ngrid)] * (n - 1) +
                [np.linspace(0.0, 2.0 * np.pi, ngrid, endpoint=False)] * n)
    grids = np.meshgrid(*axes, indexing="ij")
    P = np.stack([g.ravel() for g in grids], axis=-1)
    OM = np.empty((P.shape[0], n), dtype=complex)
    for i in range(P.shape[0]):
        OM[i] = _sphere_point(P[i], n)
    vals = logf(OM)
    starts = P[np.argsort(vals)[::-1][:nstart]]

    def neg(p):
        return -logf(_sphere_point(p, n)[None, :])[0]

    polished = []
    for s0 in starts:
        r = minimize(neg, s0, method="Nelder-Mead",
                     options=dict(xatol=1e-13, fatol=1e-14,
                                  maxiter=4000, maxfev=8000))
        polished.append(-r.fun)
    polished = np.sort(polished)[::-1]
    best = polished[0]
    agree = np.sum(np.abs(polished - best) <= spread_tol * max(1.0, abs(best)))
    if agree < 2:
        raise OptimizerNotConverged(
            f"multistart spread {np.abs(polished - best)[1]:.2e} exceeds "
            f"{spread_tol:.0e}")
    return float(best)


def growth_rate(w: QuadraticWeight, beta, ngrid: int = 32, nstart: int = 8,
                spread_tol: float = 1e-8, tol: Tolerance = DEFAULT_TOL) -> float:
    """Exponential growth rate of ||Pi_{lambda beta}|| along the ray beta:

        g = 1/2 log sup (4 Phi)^{-1} |omega^beta|^2
          + 1/2 log sup (4 Phi_dag)^{-1} |omega^beta|^2
          - sum_{beta_j != 0} beta_j log beta_j,

    suprema over the unit sphere, with the 0 log 0 = 0 convention.  beta
    must lie in the closed positive orthant with |beta|_1 = 1.
    """
    b = np.asarray(beta, dtype=float)
    if b.min() < 0 or abs(b.sum() - 1.0) > 1e-12:
        raise InputError("beta must be in the positive orthant with sum 1")
    if b.size != w.n:
        raise InputError("beta length must match the weight dimension")
    wd = dual_weight(w, tol)
    sups = []
    for wt in (w, wd):
        def logf(OM, wt=wt):
            with np.errstate(divide="ignore"):
                num = np.sum(2.0 * b * np.log(np.abs(OM) + 1e-300), axis=1)
            return num - np.log(wt.four_phi(OM))
        sups.append(_sup_log_on_sphere(logf, w.n, ngrid, nstart, spread_tol))
    entropy = -float(np.sum(b[b > 0] * np.log(b[b > 0])))
    return 0.5 * sups[0] + 0.5 * sups[1] + entropy


# ---------------------------------------------------------------------------
# per-eigenvalue reports and the orthogonality criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionNormReport:
    point: LatticePoint
    norm: float                      # formula for simple, oracle otherwise
    norm_formula: float | None
    norm_oracle: float | None
    upper_bound_exact: float | None  # det / (A1 A2) bound, simple case
    tau_bound: float
    growth_rate: float | None
    oracle_converged: bool | None = None

    def to_json_dict(self) -> dict:
        d = self.point.to_json_dict()
        d.update({
            "norm": self.norm,
            "oracle": self.norm_oracle,
            "bounds": {"tau": self.tau_bound,
                       "exact_exponential": self.upper_bound_exact},
            "growth_rate": self.growth_rate,
        })
        return d


def eigen_projection_norm(nf: NormalFormResult, point: LatticePoint,
                          with_oracle: bool = False,
                          with_growth: bool = False,
                          order: int | None = None,
                          tol: Tolerance = DEFAULT_TOL) -> ProjectionNormReport:
    """Projection-norm report for one lattice point of a reduced operator.

    Simple points use the closed formula on Phi2 (optionally cross-checked
    by the Gram oracle); points with multiplicity get the oracle only, as
    no closed form exists for rank > 1.
    """
    w = nf.Phi2
    S = point.alphas
    tb = tau_bound(w, S)
    formula = oracle = ub = g = None
    conv = None
    if point.simple:
        alpha = point.alphas[0]
        formula = projection_norm_formula(w, alpha, order=order, tol=tol)
        _, C = gc_from_weight(w, tol)
        Sm = np.eye(w.n) - C.conj().T @ C
        det = float(np.real(np.linalg.det(0.5 * (Sm + Sm.conj().T))))
        wd = dual_weight(w, tol)
        ub = float(np.sqrt(det ** -0.5 * exact_J_bound(w, alpha)
                           * exact_J_bound(wd, alpha)))
        if with_oracle:
            res = tau_norm_oracle(w, S)
            oracle, conv = res.value, res.converged
        if with_growth and sum(alpha) > 0:
            b = np.asarray(alpha, dtype=float)
            g = growth_rate(w, b / b.sum(), tol=tol)
        norm = formula
    else:
        res = tau_norm_oracle(w, S)
        oracle, conv = res.value, res.converged
        norm = oracle
    return ProjectionNormReport(point=point, norm=norm, norm_formula=formula,
                                norm_oracle=oracle, upper_bound_exact=ub,
                                tau_bound=tb, growth_rate=g,
                                oracle_converged=conv)


@dataclass(frozen=True)
class OrthogonalityEvidence:
    orthogonal: bool
    criteria_agree: bool
    conjugate_distance: float        # subspace distance Lambda^+ vs conj(Lambda^-)
    pluriharmonic_norm: float        # || (Phi_2)''_xx ||

    def to_json_dict(self) -> dict:
        return {"orthogonal": self.orthogonal,
                "criteria_agree": self.criteria_agree,
                "conjugate_distance": self.conjugate_distance,
                "pluriharmonic_norm": self.pluriharmonic_norm}


def _subspace_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Spectral-norm distance between the orthogonal projectors onto the
    column spans of U and V."""
    Qu, _ = np.linalg.qr(U)
    Qv, _ = np.linalg.qr(V)
    return float(np.linalg.norm(Qu @ Qu.conj().T - Qv @ Qv.conj().T, 2))


def orthogonality_test(q: QuadraticForm, nf: NormalFormResult | None = None,
                       tol: Tolerance = DEFAULT_TOL,
                       threshold: float = 1e-10) -> OrthogonalityEvidence:
    """Is the ground-state spectral projection orthogonal?

    Tests the two equivalent criteria: (i) Lambda^+ equals the conjugate of
    Lambda^- as subspaces; (ii) the reduced weight has no pluriharmonic
    part.  They are provably equivalent; numerical disagreement is reported
    as criteria_agree=False (a warning, not a result).
    """
    from .normalform import reduce as nf_reduce
    F = hamilton_map(q)
    plus, minus = stable_manifolds(F, tol)
    dist = _subspace_distance(plus.basis(), minus.basis().conj())
    if nf is None:
        nf = nf_reduce(q, tol)
    plh = float(np.abs(nf.Phi2.Pxx).max())
    # scale-free comparison for the weight criterion
    plh_rel = plh / max(np.abs(nf.Phi2.Pxbx).max(), 1e-300)
    c1 = dist <= threshold
    c2 = plh_rel <= threshold
    return OrthogonalityEvidence(orthogonal=bool(c1 and c2),
                                 criteria_agree=bool(c1 == c2),
                                 conjugate_distance=dist,
                                 pluriharmonic_norm=plh)
