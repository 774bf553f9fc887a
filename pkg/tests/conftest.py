import numpy as np
import pytest

from quadspec.weights import QuadraticWeight, weight_from_gc


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_symmetric_clamped(rng, n, svmax=0.9, lo=0.1, hi=0.75):
    """Random complex symmetric C with singular values drawn in [lo, hi]
    and clamped at svmax (the Gram oracle converges geometrically at rate
    sigma_max^2 per degree, so draws stay below the clamp in routine runs;
    the clamp itself is still enforced)."""
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    C = 0.5 * (A + A.T)
    U, s, Vh = np.linalg.svd(C)
    s = np.minimum(rng.uniform(lo, hi, size=n), svmax)
    C = U @ np.diag(s) @ Vh
    return 0.5 * (C + C.T)


def random_convex_weight(rng, n=2, svmax=0.9, lo=0.1, hi=0.75,
                         gmin=0.7, gmax=1.6) -> QuadraticWeight:
    """Strictly convex weight from random (G, C_+) with controlled
    conditioning: unitary times diagonal G, C_+ singular values <= svmax."""
    C = random_symmetric_clamped(rng, n, svmax, lo, hi)
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U, _ = np.linalg.qr(B)
    G = U @ np.diag(rng.uniform(gmin, gmax, size=n))
    return weight_from_gc(G, C)


def poly_eval(poly: dict, x: np.ndarray) -> np.ndarray:
    """Evaluate a coefficient map {multi-index: coeff} on points x (M, n)."""
    x = np.atleast_2d(x)
    out = np.zeros(x.shape[0], dtype=complex)
    for mon, cf in poly.items():
        out += cf * np.prod(x ** np.asarray(mon), axis=1)
    return out


def weyl_apply(M1: np.ndarray, h: float, poly: dict) -> dict:
    """Action of the Weyl quantization of (M_1 x) . xi on a polynomial:

        sum_jk (M_1)_jk x_k h D_j + (h / 2i) tr(M_1),

    computed coefficient-by-coefficient.  Independent oracle for the shell
    matrices.
    """
    n = M1.shape[0]
    out: dict = {}
    tr = np.trace(M1)
    for mon, cf in poly.items():
        key = tuple(mon)
        out[key] = out.get(key, 0.0) + cf * (h / 2j) * tr
        for j in range(n):
            if mon[j] == 0:
                continue
            for k in range(n):
                if M1[j, k] == 0:
                    continue
                m2 = list(mon)
                m2[j] -= 1
                m2[k] += 1
                out[tuple(m2)] = out.get(tuple(m2), 0.0) \
                    + cf * (h / 1j) * M1[j, k] * mon[j]
    return {m: c for m, c in out.items() if c != 0}
