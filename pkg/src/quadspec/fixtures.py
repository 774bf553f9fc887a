"""Fixture catalog: the worked examples used across tests and the CLI.

Each fixture bundles the quadratic form (for the classification and
reduction pipeline), the canonical reduced data (M_1 and, where one exists,
the canonical weight from the literature-standard G) so growth-rate and
condition-number comparisons are made against exactly the matrices being
quoted, not a rescaled gauge of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .normalform import fbi_matrix
from .symplectic import QuadraticForm
from .weights import QuadraticWeight, phi0, weight_from_gc

__all__ = ["Fixture", "davies", "kfp", "jordan", "harmonic", "by_name",
           "FIXTURE_NAMES"]


@dataclass(frozen=True)
class Fixture:
    name: str
    params: dict
    form: QuadraticForm
    M1: np.ndarray | None = None            # normal-form symbol matrix
    canonical_G: np.ndarray | None = None   # literature-standard G
    canonical_C_plus: np.ndarray | None = None

    @property
    def canonical_weight(self) -> QuadraticWeight:
        if self.canonical_G is None:
            return phi0(self.form.n)
        C = (self.canonical_C_plus if self.canonical_C_plus is not None
             else np.zeros_like(self.canonical_G))
        return weight_from_gc(self.canonical_G, C)


def davies(theta: float) -> Fixture:
    """Rotated harmonic oscillator, symbol e^{-2i theta} xi^2 + e^{2i theta} x^2.

    Elliptic for |theta| < pi/4; C_+ = (-1 + e^{-4 i theta}) / 2, so
    |C_+| = |sin 2 theta|.
    """
    Q = np.diag([np.exp(2j * theta), np.exp(-2j * theta)])
    C = np.array([[0.5 * (-1.0 + np.exp(-4j * theta))]])
    M1 = np.array([[2j]])
    return Fixture(name="davies", params={"theta": theta},
                   form=QuadraticForm(n=1, Q=Q), M1=M1,
                   canonical_G=np.eye(1), canonical_C_plus=C)


_G_KFP = np.array([[(1 + 1j) / math.sqrt(2), (1 - 1j) / math.sqrt(2)],
                   [1.0, 1.0]])
_M1_KFP = np.array([[0.0, 1j / math.sqrt(2)], [-1j / math.sqrt(2), 1j]])


def kfp() -> Fixture:
    """Kramers-Fokker-Planck operator with quadratic potential, symbol

        (v^2 + eta^2)/2 + i (v xi - x eta / 2)

    in the variables (x, v, xi, eta).  Partially elliptic, not elliptic;
    the stable manifolds are conjugate, so its ground-state projection is
    orthogonal, and the reduced operator on E_m is tridiagonal.
    """
    Q = np.zeros((4, 4), dtype=complex)
    Q[1, 1] = 0.5
    Q[3, 3] = 0.5
    Q[1, 2] = Q[2, 1] = 0.5j
    Q[0, 3] = Q[3, 0] = -0.25j
    return Fixture(name="kfp", params={}, form=QuadraticForm(n=2, Q=Q),
                   M1=_M1_KFP, canonical_G=_G_KFP)


def _jordan_M(eps: float) -> np.ndarray:
    return np.array([[2j, 1.0], [0.0, 2j + eps]])


def jordan(eps: float = 0.0) -> Fixture:
    """Elliptic symbol whose normal form is M_eps = [[2i, 1], [0, 2i+eps]].

    Defined on the Bargmann side as (M_eps x) . xi over H_{Phi_1}; the
    equivalent real-side form is obtained by pulling back through the
    canonical matrix for A_+ = i (so the pipeline recovers M_eps exactly).
    For eps > 0, G_eps = [[1, 1], [0, eps]] diagonalizes, and the growth of
    its spectral projections tracks the condition number of G_eps.
    """
    M = _jordan_M(eps)
    Qt = np.zeros((4, 4), dtype=complex)
    Qt[:2, 2:] = M.T / 2.0
    Qt[2:, :2] = M / 2.0
    kapA = fbi_matrix(1j * np.eye(2))
    Qr = kapA.T @ Qt @ kapA
    G = np.array([[1.0, 1.0], [0.0, eps]]) if eps > 0 else None
    return Fixture(name="jordan", params={"eps": eps},
                   form=QuadraticForm(n=2, Q=0.5 * (Qr + Qr.T)),
                   M1=M, canonical_G=G)


def harmonic(*r: float) -> Fixture:
    """Selfadjoint anharmonic family sum_j r_j (x_j^2 + xi_j^2), r_j > 0.

    With rationally independent r_j every lattice point is simple; the
    reduced weight is radial and all projection norms are one.
    """
    if not r:
        r = (1.0, math.sqrt(2.0))
    if min(r) <= 0:
        raise InputError("harmonic frequencies must be positive")
    n = len(r)
    Q = np.diag(np.concatenate([np.asarray(r, float), np.asarray(r, float)]))
    M1 = np.diag(2j * np.asarray(r, dtype=complex))
    return Fixture(name="harmonic", params={"r": tuple(float(x) for x in r)},
                   form=QuadraticForm(n=n, Q=Q), M1=M1,
                   canonical_G=np.eye(n))


FIXTURE_NAMES = ("davies", "kfp", "jordan", "harmonic")


def by_name(name: str, *, theta: float | None = None, eps: float | None = None,
            r: tuple | None = None) -> Fixture:
    """Build a fixture from CLI-style arguments."""
    if name == "davies":
        if theta is None:
            raise InputError("davies fixture needs --theta")
        return davies(theta)
    if name == "kfp":
        return kfp()
    if name == "jordan":
        return jordan(0.0 if eps is None else eps)
    if name == "harmonic":
        return harmonic(*(r or ()))
    raise InputError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
