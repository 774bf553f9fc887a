import numpy as np
import pytest

from quadspec.errors import (DegenerateTransport, InputError, NotNegative,
                             NotPositive)
from quadspec.fixtures import davies, harmonic, jordan, kfp
from quadspec.matcore import Tolerance
from quadspec.normalform import (LagrangianGraph, aplus_from_cplus,
                                 cplus_from_aplus, fbi_matrix, fbi_matrix_inv,
                                 gaussian_transport, jordan_reduce, reduce,
                                 stable_manifolds, straighten_kappa)
from quadspec.symplectic import (hamilton_map, symplectic_J, symplectic_form)
from quadspec.weights import gc_from_weight, weight_from_gc

from conftest import random_symmetric_clamped


class TestStableManifolds:
    def test_davies(self):
        theta = 0.3
        plus, minus = stable_manifolds(hamilton_map(davies(theta).form))
        assert minus.A[0, 0] == pytest.approx(-1j * np.exp(2j * theta), abs=1e-12)
        assert plus.A[0, 0] == pytest.approx(1j * np.exp(2j * theta), abs=1e-12)

    def test_kfp(self):
        plus, minus = stable_manifolds(hamilton_map(kfp().form))
        assert np.abs(minus.A - np.diag([-0.5j, -1j])).max() < 1e-10
        # stable manifolds of the KFP symbol are conjugate
        assert np.abs(plus.A - minus.A.conj()).max() < 1e-12

    def test_standard_oscillator(self):
        from quadspec.symplectic import HamiltonMap
        plus, minus = stable_manifolds(HamiltonMap(np.array([[0., 1.], [-1., 0.]])))
        assert minus.A[0, 0] == pytest.approx(-1j, abs=1e-14)
        assert plus.A[0, 0] == pytest.approx(1j, abs=1e-14)

    def test_sigma_vanishes_and_positivity(self):
        for form in (davies(0.3).form, kfp().form, jordan(0.25).form,
                     harmonic(1, np.sqrt(2)).form):
            plus, minus = stable_manifolds(hamilton_map(form))
            for graph in (plus, minus):
                B = graph.basis()
                for i in range(graph.n):
                    for j in range(graph.n):
                        assert abs(symplectic_form(B[:, i], B[:, j])) <= 1e-10
            # positivity conclusion: -i sigma(X, conj X) > 0 on Lambda^+
            B = plus.basis()
            for i in range(plus.n):
                X = B[:, i] / np.linalg.norm(B[:, i])
                val = -1j * symplectic_form(X, X.conj())
                assert val.real > 1e-12
                assert abs(val.imag) < 1e-12


class TestStraightenKappa:
    def test_identity_case(self):
        assert np.allclose(straighten_kappa(np.array([[-1j]])), np.eye(2))

    def test_davies_formula(self):
        theta = 0.3
        _, minus = stable_manifolds(hamilton_map(davies(theta).form))
        kappa = straighten_kappa(minus)
        c = np.cos(2 * theta)
        expect = np.array([[np.sqrt(c), 0],
                           [-np.sin(2 * theta) / np.sqrt(c), 1 / np.sqrt(c)]])
        assert np.abs(kappa - expect).max() < 1e-12

    def test_kfp_diagonal(self):
        _, minus = stable_manifolds(hamilton_map(kfp().form))
        kappa = straighten_kappa(minus)
        assert np.abs(kappa - np.diag([2 ** -0.5, 1, 2 ** 0.5, 1])).max() < 1e-12

    def test_symplectic_and_straightens(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            R = rng.normal(size=(n, n))
            Wr = rng.normal(size=(n, n))
            A = (R + R.T) - 1j * (Wr @ Wr.T + np.eye(n))
            kappa = straighten_kappa(A)
            assert np.abs(kappa.imag).max() == 0
            J = symplectic_J(n)
            assert np.abs(kappa.T @ J @ kappa - J).max() < 1e-12
            V = kappa @ np.vstack([np.eye(n), A])
            G = V[n:] @ np.linalg.inv(V[:n])
            assert np.abs(G + 1j * np.eye(n)).max() < 1e-10

    def test_rejects_positive_plane(self):
        with pytest.raises(NotNegative):
            straighten_kappa(np.array([[1j]]))


class TestCayleyMaps:
    def test_aplus_identity(self):
        C = cplus_from_aplus(1j * np.eye(2))
        assert np.abs(C).max() < 1e-14

    def test_davies_values(self):
        theta = np.pi / 8
        A = np.array([[1j - 2 * np.tan(2 * theta)]])
        C = cplus_from_aplus(A)
        assert C[0, 0] == pytest.approx(0.5 * (-1 + np.exp(-4j * theta)), abs=1e-12)
        back = aplus_from_cplus(C)
        assert back[0, 0] == pytest.approx(1j - 2.0, abs=1e-12)

    def test_cplus_zero_gives_i(self):
        assert np.abs(aplus_from_cplus(np.zeros((2, 2))) - 1j * np.eye(2)).max() < 1e-14

    def test_round_trips(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            R = rng.normal(size=(n, n))
            A = (R + R.T) + 1j * (B.conj().T @ B + np.eye(n))
            A = 0.5 * (A + A.T)
            C = cplus_from_aplus(A)
            assert np.abs(C - C.T).max() < 1e-10
            S = np.eye(n) - C.conj().T @ C
            assert np.linalg.eigvalsh(0.5 * (S + S.conj().T)).min() > 0
            assert np.abs(aplus_from_cplus(C) - A).max() < 1e-10
            # and the reverse direction
            C2 = random_symmetric_clamped(rng, n, hi=0.9)
            assert np.abs(cplus_from_aplus(aplus_from_cplus(C2)) - C2).max() < 1e-10

    def test_one_minus_abs_cplus_identity(self, rng):
        # 1 - C^* C = (1 + i A^*)^{-1} (4 Im A) (1 - i A)^{-1}
        for form in (davies(0.3).form, kfp().form, jordan(0.5).form):
            nf = reduce(form)
            A, C = nf.A_plus, nf.C_plus
            n = A.shape[0]
            lhs = np.eye(n) - C.conj().T @ C
            rhs = np.linalg.inv(np.eye(n) + 1j * A.conj().T) @ (4 * A.imag) \
                @ np.linalg.inv(np.eye(n) - 1j * A)
            assert np.abs(lhs - rhs).max() <= 1e-11

    def test_rejects_non_positive(self):
        with pytest.raises(NotPositive):
            cplus_from_aplus(np.array([[-1j]]))
        with pytest.raises(NotPositive):
            aplus_from_cplus(np.array([[1.5]]))


class TestJordanReduce:
    def test_distinct_diagonal_passthrough(self):
        M1 = np.diag([2j, 2j + 0.1])
        red = jordan_reduce(M1)
        assert np.abs(red.M - M1).max() < 1e-14
        assert np.abs(np.abs(red.G) - np.eye(2)).max() < 1e-14
        assert not red.ill_conditioned

    def test_split_jordan_eigenvectors(self):
        # M_eps with eps = 0.5 is diagonalized by columns prop to [[1,1],[0,eps]]
        eps = 0.5
        M1 = np.array([[2j, 1.0], [0.0, 2j + eps]])
        red = jordan_reduce(M1)
        resid = np.linalg.solve(red.G, M1 @ red.G) - red.M
        assert np.abs(resid).max() < 1e-12
        assert np.allclose(np.diag(red.M), [2j, 2j + eps])
        # second eigenvector parallel to (1, eps)
        v = red.G[:, 1]
        assert abs(v[1] / v[0] - eps) < 1e-12

    def test_kfp_matches_paper_g_up_to_scaling(self):
        M1 = kfp().M1
        red = jordan_reduce(M1)
        Gp = kfp().canonical_G
        # columns proportional: G_paper ordered by the same (Re, Im) sort?
        # eigenvalues (1+i)/2 at column 0 of Gp, (-1+i)/2 at column 1
        lam = np.diag(red.M)
        order = np.argsort([z.real for z in lam])
        for col_red, col_paper in zip([0, 1], [1, 0]):
            u = red.G[:, col_red]
            v = Gp[:, col_paper]
            ratio = v / u
            assert abs(ratio[0] - ratio[1]) < 1e-10

    def test_pure_jordan_block(self):
        M1 = np.array([[2j, 1.0], [0.0, 2j]])
        red = jordan_reduce(M1)
        assert np.allclose(red.M, M1)
        resid = np.linalg.solve(red.G, M1 @ red.G) - red.M
        assert np.abs(resid).max() < 1e-10

    def test_random_jordan_structure(self, rng):
        # exact structure (2-chain + simple) under a random similarity;
        # eigenvalues split at sqrt(machine eps), so cluster at 1e-6
        J = np.diag([1 + 2j, 1 + 2j, 3.0 + 0j]).astype(complex)
        J[0, 1] = 1.0
        S = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        A = S @ J @ np.linalg.inv(S)
        red = jordan_reduce(A, Tolerance(cluster_tol=1e-6))
        sup = sorted(np.round(np.diag(red.M, 1).real, 6).tolist())
        assert sup == [0.0, 1.0]
        resid = np.linalg.solve(red.G, A @ red.G) - red.M
        assert np.abs(resid).max() < 1e-8 * np.abs(A).max()

    def test_ill_conditioned_flag(self):
        # gap exactly at the tolerance boundary flips the cluster decision
        M1 = np.diag([0.0, 5e-8]).astype(complex)
        red = jordan_reduce(M1, Tolerance(cluster_tol=1e-8))
        assert red.ill_conditioned

    def test_user_supplied_G(self):
        eps = 0.5
        M1 = np.array([[2j, 1.0], [0.0, 2j + eps]])
        G = np.array([[1.0, 1.0], [0.0, eps]])
        red = jordan_reduce(M1, G=G)
        assert np.allclose(red.M, np.diag([2j, 2j + eps]))
        with pytest.raises(InputError):
            jordan_reduce(M1, G=np.array([[1.0, 1.0], [1.0, 0.0]]))


class TestGaussianTransport:
    def test_identity(self, rng):
        F = random_symmetric_clamped(rng, 2) + 1j * np.eye(2)
        F = 0.5 * (F + F.T)
        out = gaussian_transport(F, np.eye(4))
        assert np.abs(out - F).max() < 1e-14

    def test_aplus_maps_to_zero(self, rng):
        for _ in range(5):
            B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            R = rng.normal(size=(2, 2))
            A = (R + R.T) + 1j * (B.conj().T @ B + np.eye(2))
            A = 0.5 * (A + A.T)
            out = gaussian_transport(A, fbi_matrix_inv(A))
            assert np.abs(out).max() < 1e-10

    def test_oscillator_fixed_point(self):
        # kappa = identity when A_- = -i; F = i is untouched
        kappa = straighten_kappa(np.array([[-1j]]))
        out = gaussian_transport(np.array([[1j]]), np.linalg.inv(kappa))
        assert out[0, 0] == pytest.approx(1j, abs=1e-14)

    def test_degenerate(self):
        # through the interchange map J, a flat Gaussian (F = 0) degenerates
        J4 = symplectic_J(2)
        with pytest.raises(DegenerateTransport):
            gaussian_transport(np.zeros((2, 2)), J4)


class TestReduce:
    def test_davies_pi_over_8(self):
        nf = reduce(davies(np.pi / 8).form)
        assert nf.lambdas[0] == pytest.approx(1j, abs=1e-12)
        assert nf.M[0, 0] == pytest.approx(2j, abs=1e-12)
        assert nf.C_plus[0, 0] == pytest.approx(0.5 * (-1 - 1j), abs=1e-12)

    def test_kfp_normal_form(self):
        nf = reduce(kfp().form)
        lam = sorted(np.diag(nf.M), key=lambda z: z.real)
        assert lam[0] == pytest.approx((-1 + 1j) / 2, abs=1e-10)
        assert lam[1] == pytest.approx((1 + 1j) / 2, abs=1e-10)
        assert np.abs(nf.A_plus - 1j * np.eye(2)).max() < 1e-10
        assert np.abs(nf.C_plus).max() < 1e-10
        assert nf.gammas == (0.0,)

    def test_harmonic(self):
        r = (1.0, np.sqrt(2.0))
        nf = reduce(harmonic(*r).form)
        assert np.abs(nf.C_plus).max() < 1e-12
        assert np.allclose(np.diag(nf.M), [2j * r[0], 2j * r[1]], atol=1e-12)
        assert np.abs(nf.Phi2.Pxbx - 0.25 * np.eye(2)).max() < 1e-12

    def test_jordan_fixture_recovers_M(self):
        # eps = 0 is defective: the pipeline's M1 carries ~1e-12 noise that
        # splits the eigenvalue pair by ~sqrt(eps_mach), so the cluster
        # radius must sit above that scale to see the Jordan block
        nf = reduce(jordan(0.0).form, Tolerance(cluster_tol=1e-7))
        assert np.abs(np.diag(nf.M) - 2j).max() < 1e-7
        assert nf.gammas == (1.0,)
        assert nf.ill_conditioned        # decision flips under tol / 10

        nf = reduce(jordan(0.5).form)
        lam = sorted(np.diag(nf.M), key=lambda z: z.real)
        assert abs(lam[0] - 2j) < 1e-9 and abs(lam[1] - (2j + 0.5)) < 1e-9
        assert nf.gammas == (0.0,)

    def test_jordan_defective_at_default_tol_is_flagged(self):
        nf = reduce(jordan(0.0).form)
        assert nf.ill_conditioned

    def test_spectrum_reconstruction(self):
        for form in (davies(0.42).form, kfp().form, jordan(0.3).form):
            nf = reduce(form)
            F = hamilton_map(form).F
            lamF = np.linalg.eigvals(F)
            up = np.sort_complex(2 * lamF[lamF.imag > 0])
            assert np.abs(np.sort_complex(np.linalg.eigvals(nf.M)) - up).max() < 1e-9

    def test_not_covered_rejected(self):
        from quadspec.symplectic import QuadraticForm
        q = QuadraticForm(n=1, Q=np.diag([1.0, 0.0]))
        with pytest.raises(InputError):
            reduce(q)

    def test_lambda_ordering(self):
        nf = reduce(kfp().form)
        res = [(z.real, z.imag) for z in nf.lambdas]
        assert res == sorted(res)


class TestWeightRoundTrips:
    def test_gc_round_trip(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            C = random_symmetric_clamped(rng, n, hi=0.85)
            B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            U, _ = np.linalg.qr(B)
            G = U @ np.diag(rng.uniform(0.5, 2.0, n))
            w = weight_from_gc(G, C)
            G2, C2 = gc_from_weight(w)
            w2 = weight_from_gc(G2, C2)
            assert np.abs(w.Pxx - w2.Pxx).max() < 1e-12
            assert np.abs(w.Pxbx - w2.Pxbx).max() < 1e-12

    def test_trivial_data(self):
        w = weight_from_gc(np.eye(2), np.zeros((2, 2)))
        assert np.abs(w.Pxbx - 0.25 * np.eye(2)).max() == 0
        assert np.abs(w.Pxx).max() == 0

    def test_diagonal_hermitian_part(self):
        from quadspec.weights import QuadraticWeight
        w = QuadraticWeight(2, np.zeros((2, 2)), 0.25 * np.diag([4.0, 1.0]))
        G, C = gc_from_weight(w)
        assert np.abs(G - np.diag([2.0, 1.0])).max() < 1e-14
        assert np.abs(C).max() < 1e-14

    def test_kfp_weight_formula(self):
        nf = reduce(kfp().form)
        # Phi2 = |G x|^2 / 4 for the pipeline G (C_+ = 0)
        assert np.abs(nf.Phi2.Pxbx - 0.25 * nf.G.conj().T @ nf.G).max() < 1e-12
        assert np.abs(nf.Phi2.Pxx).max() < 1e-12

    def test_davies_weight_formula(self):
        theta = 0.3
        nf = reduce(davies(theta).form)
        C = nf.C_plus[0, 0]
        assert nf.Phi2.Pxbx[0, 0] == pytest.approx(0.25, abs=1e-12)
        assert nf.Phi2.Pxx[0, 0] == pytest.approx(-C / 4, abs=1e-12)


class TestGaugeFreedom:
    def test_scaled_gauge_is_valid_and_serializes(self):
        nf = reduce(kfp().form)
        for r in (0.5, 2.0):
            nf_r = nf.with_gauge(r)
            assert np.abs(nf_r.G - r * nf.G).max() < 1e-14
            assert np.abs(nf_r.Phi2.Pxbx - r * r * nf.Phi2.Pxbx).max() < 1e-12
            d = nf_r.to_json_dict()
            assert d["gauge"]["scale"] == r

    def test_lagrangian_graph_validation(self):
        with pytest.raises(NotPositive):
            LagrangianGraph(A=np.array([[-1j]]), sign="positive")
        with pytest.raises(InputError):
            LagrangianGraph(A=np.array([[1j]]), sign="sideways")
