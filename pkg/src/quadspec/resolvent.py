"""Energy-shell resolvent norms for normal-form operators on H_{Phi_1}.

With Phi_1 = |x|^2 / 4 the normalized monomials are orthonormal and the
spaces E_m of homogeneous polynomials of degree m are invariant under the
Weyl quantization of (M_1 x) . xi, so

    ||(Q(h) - z)^{-1}|| = sup_m || (Q(h)|_{E_m} - z)^{-1} ||,

and each restricted norm is the inverse of the smallest singular value of
the shell matrix.  All matrices here are built at the given h; entries are
linear in h, so ShellMatrix(m, h) = h * ShellMatrix(m, 1) exactly.

Identification of these norms with an L^2 operator norm requires the
reduction to land at C_+ = 0 (true for the Kramers-Fokker-Planck and
Jordan fixtures as constructed, not for the rotated oscillator).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "ShellMatrix", "SweepRow", "shell_indices", "shell_matrix",
    "restricted_resolvent", "resolvent_sweep", "sweep_to_csv",
    "sweep_to_long_csv",
]

_DENSE_SVD_LIMIT = 2000


def shell_indices(n: int, m: int) -> list[tuple]:
    """Multi-indices of degree m, ordered so the shell matrix is upper
    triangular: alpha precedes beta iff sum_j j alpha_j > sum_j j beta_j
    (ties broken lexicographically for determinism)."""
    out = []

    def rec(prefix, left, pos):
        if pos == n - 1:
            out.append(prefix + (left,))
            return
        for k in range(left, -1, -1):
            rec(prefix + (k,), left - k, pos + 1)

    rec((), m, 0)
    out.sort(key=lambda a: (-sum((j + 1) * a[j] for j in range(n)), a))
    return out


@dataclass(frozen=True)
class ShellMatrix:
    """Matrix of the Weyl quantization restricted to E_m in the orthonormal
    monomial basis of H_{Phi_1}."""

    m: int
    h: float
    indices: tuple
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.indices)


def shell_matrix(M1: np.ndarray, m: int, h: float = 1.0) -> ShellMatrix:
    """Shell matrix of (M_1 x) . xi on E_m.

    The Weyl operator is sum_jk (M_1)_jk x_k h D_j + (h / 2i) tr M_1; on
    the orthonormal basis it contributes the diagonal
    (h/i) sum_j (M_1)_jj (alpha_j + 1/2) and, for j != k, the coefficient
    (h/i) (M_1)_jk sqrt(alpha_j (alpha_k + 1)) from alpha to
    alpha - e_j + e_k.
    """
    M1 = np.asarray(M1, dtype=complex)
    n = M1.shape[0]
    idx = shell_indices(n, m)
    pos = {a: i for i, a in enumerate(idx)}
    d = len(idx)
    Q = np.zeros((d, d), dtype=complex)
    for a, i in pos.items():
        Q[i, i] = (h / 1j) * sum(M1[j, j] * (a[j] + 0.5) for j in range(n))
        for j in range(n):
            if a[j] == 0:
                continue
            for k in range(n):
                if j == k or M1[j, k] == 0:
                    continue
                b = list(a)
                b[j] -= 1
                b[k] += 1
                Q[pos[tuple(b)], i] += (h / 1j) * M1[j, k] * np.sqrt(a[j] * (a[k] + 1))
    return ShellMatrix(m=m, h=h, indices=tuple(idx), entries=Q)


def _smallest_singular_large(A: np.ndarray, iters: int = 200,
                             rtol: float = 1e-10) -> float:
    """sigma_min by inverse power iteration on A^* A with a prefactored LU;
    used above the dense-SVD size limit."""
    import scipy.linalg as sla
    lu, piv = sla.lu_factor(A)
    rng = np.random.default_rng(0)
    v = rng.normal(size=A.shape[0]) + 1j * rng.normal(size=A.shape[0])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = sla.lu_solve((lu, piv), v)                  # A^{-1} v
        w = sla.lu_solve((lu, piv), w, trans=2)         # A^{-*} A^{-1} v
        nrm = np.linalg.norm(w)
        v = w / nrm
        est = 1.0 / np.sqrt(nrm)
        if abs(est - prev) <= rtol * est:
            return est
        prev = est
    return prev


def restricted_resolvent(M1: np.ndarray, m: int, h: float, z: complex) -> float:
    """|| (Q(h)|_{E_m} - z)^{-1} || = 1 / sigma_min(Q_m - z).

    Returns inf when z is (numerically) an eigenvalue of the shell matrix.
    """
    Q = shell_matrix(M1, m, h).entries
    A = Q - z * np.eye(Q.shape[0])
    if Q.shape[0] <= _DENSE_SVD_LIMIT:
        s = np.linalg.svd(A, compute_uv=False)[-1]
    else:
        try:
            s = _smallest_singular_large(A)
        except np.linalg.LinAlgError:
            return float("inf")
    if s <= 0.0 or not np.isfinite(s):
        return float("inf")
    return float(1.0 / s)


@dataclass(frozen=True)
class SweepRow:
    m: int
    h: float
    energy: float
    resolvent_norm: float
    baseline_norm: float | None


def _harmonic_baseline(z: complex, m: int, h: float) -> float:
    """Resolvent norm of the 1-D harmonic reference 2 i x xi at the same
    energy shell: spectrum h (2m + 1), normal operator."""
    return float(1.0 / abs(z - h * (2 * m + 1)))


def resolvent_sweep(M1: np.ndarray, z: complex, h_list, m_max: int,
                    baseline: bool = True) -> list[SweepRow]:
    """Table of restricted resolvent norms over shells and h values.

    Rows are ordered by (h descending as given, m ascending); energy is
    m * h.  The baseline column holds the harmonic-oscillator reference at
    the same z and shell.
    """
    if m_max < 0:
        raise InputError("m_max must be nonnegative")
    rows: list[SweepRow] = []
    for h in h_list:
        for m in range(m_max + 1):
            rows.append(SweepRow(
                m=m, h=float(h), energy=float(m * h),
                resolvent_norm=restricted_resolvent(M1, m, h, z),
                baseline_norm=_harmonic_baseline(z, m, h) if baseline else None))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(x, ".17g")


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["m", "h", "energy", "resolvent_norm", "baseline_norm"])
    for r in rows:
        wr.writerow([r.m, _fmt(r.h), _fmt(r.energy),
                     _fmt(r.resolvent_norm), _fmt(r.baseline_norm)])
    return buf.getvalue()


def sweep_to_long_csv(rows: list[SweepRow]) -> str:
    """Long-format table (one value per row) suitable for any plotting tool."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["m", "h", "energy", "series", "value"])
    for r in rows:
        wr.writerow([r.m, _fmt(r.h), _fmt(r.energy), "resolvent",
                     _fmt(r.resolvent_norm)])
        if r.baseline_norm is not None:
            wr.writerow([r.m, _fmt(r.h), _fmt(r.energy), "baseline",
                         _fmt(r.baseline_norm)])
    return buf.getvalue()
