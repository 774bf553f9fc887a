import numpy as np
import pytest
import scipy.linalg as sla

from quadspec.errors import InputError, RealEigenvalue
from quadspec.fixtures import davies, harmonic, kfp
from quadspec.symplectic import (Kind, QuadraticForm, classify, evaluate,
                                 form_from_coefficients, hamilton_map,
                                 symplectic_J, symplectic_form, uhp_count)

F2_PAPER = np.array([[0, 0.5j, 0, 0],
                     [-0.25j, 0, 0, 0.5],
                     [0, 0, 0, 0.25j],
                     [0, -0.5, -0.5j, 0]])


def random_real_symplectic(rng, n):
    """exp(J S) for S real symmetric is real symplectic."""
    S = rng.normal(size=(2 * n, 2 * n))
    S = 0.5 * (S + S.T)
    return sla.expm(symplectic_J(n) @ S)


class TestHamiltonMap:
    def test_davies(self):
        theta = 0.37
        F = hamilton_map(davies(theta).form).F
        expect = np.array([[0, np.exp(-2j * theta)],
                           [-np.exp(2j * theta), 0]])
        assert np.abs(F - expect).max() < 1e-14

    def test_kfp_matches_display(self):
        F = hamilton_map(kfp().form).F
        assert np.abs(F - F2_PAPER).max() < 1e-14

    def test_xi_squared(self):
        q = QuadraticForm(n=1, Q=np.diag([0.0, 1.0]))
        assert np.allclose(hamilton_map(q).F, [[0, 1], [0, 0]])

    def test_sigma_antisymmetry_on_basis(self):
        for form in (davies(0.3).form, kfp().form, harmonic(1, np.sqrt(2)).form):
            F = hamilton_map(form).F
            d = F.shape[0]
            for i in range(d):
                for j in range(d):
                    ei = np.eye(d)[i]
                    ej = np.eye(d)[j]
                    r = symplectic_form(ei, F @ ej) + symplectic_form(F @ ei, ej)
                    assert abs(r) <= 1e-12

    def test_evaluate_matches_sigma(self, rng):
        for form in (davies(0.21).form, kfp().form):
            F = hamilton_map(form).F
            d = F.shape[0]
            for _ in range(100):
                X = rng.normal(size=d) + 1j * rng.normal(size=d)
                lhs = evaluate(form, X)
                rhs = symplectic_form(X, F @ X)
                assert abs(lhs - rhs) <= 1e-12 * (np.linalg.norm(X) ** 2)


class TestEvaluate:
    def test_davies_at_unit_x(self):
        theta = 0.3
        assert evaluate(davies(theta).form, [1, 0]) == \
            pytest.approx(np.exp(2j * theta), abs=1e-14)

    def test_zero(self):
        assert evaluate(kfp().form, [0, 0, 0, 0]) == 0

    def test_kfp_at_unit_v(self):
        assert evaluate(kfp().form, [0, 1, 0, 0]) == pytest.approx(0.5)


class TestClassify:
    def test_davies_elliptic(self):
        c = classify(davies(0.3).form)
        assert c.kind is Kind.ELLIPTIC
        assert c.k0 == 0
        assert c.singular_space_dim == 0

    def test_davies_not_elliptic_beyond_quarter_pi(self):
        c = classify(davies(1.0).form)   # theta outside (-pi/4, pi/4)
        assert c.kind is Kind.NOT_COVERED

    def test_kfp_partially_elliptic(self):
        c = classify(kfp().form)
        assert c.kind is Kind.PARTIALLY_ELLIPTIC
        assert c.k0 == 1            # kernel iteration becomes trivial at K=1
        assert c.singular_space_dim == 0

    def test_x_squared_not_covered(self):
        q = QuadraticForm(n=1, Q=np.diag([1.0, 0.0]))
        c = classify(q)
        assert c.kind is Kind.NOT_COVERED
        # S is the xi-axis: Im F = 0, so S = ker(Re F)
        F = hamilton_map(q).F
        assert np.abs(F.imag).max() == 0
        assert c.singular_space_dim == 1

    def test_invariance_under_real_symplectic(self, rng):
        for form in (davies(0.3).form, kfp().form):
            c0 = classify(form)
            for _ in range(5):
                kappa = random_real_symplectic(rng, form.n)
                q2 = QuadraticForm(n=form.n, Q=kappa.T @ form.Q @ kappa)
                c = classify(q2)
                assert c.kind is c0.kind
                assert c.k0 == c0.k0


class TestUhpCount:
    def test_davies(self):
        assert uhp_count(hamilton_map(davies(0.3).form)) == (1, 1)

    def test_kfp(self):
        F = hamilton_map(kfp().form)
        assert uhp_count(F) == (2, 2)
        key = lambda z: (round(z.real, 9), round(z.imag, 9))
        lam = sorted(np.linalg.eigvals(F.F), key=key)
        expect = sorted([0.25 + 0.25j, 0.25 - 0.25j, -0.25 + 0.25j,
                         -0.25 - 0.25j], key=key)
        assert np.abs(np.array(lam) - np.array(expect)).max() < 1e-12

    def test_diagonal(self):
        from quadspec.symplectic import HamiltonMap
        assert uhp_count(HamiltonMap(np.diag([1j, 1j, -1j, -1j]))) == (2, 2)

    def test_real_eigenvalue_raises(self):
        from quadspec.symplectic import HamiltonMap
        with pytest.raises(RealEigenvalue):
            uhp_count(HamiltonMap(np.diag([1.0 + 0j, -1.0 + 0j])))


class TestSerialization:
    def test_json_round_trip(self):
        q = kfp().form
        q2 = QuadraticForm.from_json_dict(q.to_json_dict())
        assert np.abs(q.Q - q2.Q).max() == 0

    def test_malformed_json(self):
        with pytest.raises(InputError):
            QuadraticForm.from_json('{"n": 1}')
        with pytest.raises(InputError):
            QuadraticForm.from_json("not json")

    def test_symmetry_validated_on_load(self):
        bad = {"n": 1, "Q": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}
        with pytest.raises(InputError):
            QuadraticForm.from_json_dict(bad)


class TestFromCoefficients:
    def test_davies_coefficients(self):
        theta = 0.4
        q = form_from_coefficients(1, {
            ((2,), (0,)): np.exp(2j * theta),
            ((0,), (2,)): np.exp(-2j * theta),
        })
        assert np.abs(q.Q - davies(theta).form.Q).max() < 1e-15

    def test_cross_term(self):
        # q = x xi on R^2: F = diag(1/2, -1/2)
        q = form_from_coefficients(1, {((1,), (1,)): 1.0})
        F = hamilton_map(q).F
        assert np.allclose(F, np.diag([0.5, -0.5]))
