import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepesn import numerics as nm
from deepesn.errors import ConvergenceError, DegenerateSystemError, DimensionError

from oracles import (companion_spectral_radius, jacobi_svd_values,
                     normal_equation_weights)


class TestValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            nm.as_matrix([[1.0, np.nan]])

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionError):
            nm.as_matrix([1.0, 2.0])
        with pytest.raises(DimensionError):
            nm.as_vector([[1.0]])

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            nm.as_matrix(np.zeros((0, 3)))


class TestSpectralRadius:
    def test_identity(self):
        assert nm.spectral_radius(np.eye(3)) == pytest.approx(1.0, rel=1e-12)

    def test_diagonal(self):
        assert nm.spectral_radius(np.diag([2.0, -3.0])) == pytest.approx(3.0, rel=1e-12)

    def test_random_4x4_against_characteristic_polynomial(self):
        a = np.random.default_rng(11).uniform(-1, 1, (4, 4))
        assert nm.spectral_radius(a) == pytest.approx(companion_spectral_radius(a), rel=1e-6)

    def test_rotation_block_complex_pair(self):
        th = 0.7
        a = np.zeros((3, 3))
        a[:2, :2] = 1.5 * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        a[2, 2] = 0.4
        assert nm.spectral_radius(a) == pytest.approx(1.5, rel=1e-10)

    def test_nilpotent_and_zero(self):
        assert nm.spectral_radius(np.zeros((4, 4))) == 0.0
        assert nm.spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(0.0, abs=1e-12)

    def test_rank_one(self):
        assert nm.spectral_radius(np.ones((3, 3))) == pytest.approx(3.0, rel=1e-10)

    def test_1x1(self):
        assert nm.spectral_radius([[-2.5]]) == 2.5

    def test_non_square(self):
        with pytest.raises(DimensionError):
            nm.spectral_radius(np.ones((2, 3)))

    def test_non_convergence_carries_estimate(self):
        a = np.random.default_rng(0).uniform(-1, 1, (60, 60))
        with pytest.raises(ConvergenceError) as info:
            nm.spectral_radius(a, tol=1e-14, max_iter=3)
        assert info.value.estimate > 0

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            nm.spectral_radius(np.eye(2), tol=0)
        with pytest.raises(ValueError):
            nm.spectral_radius(np.eye(2), max_iter=0)

    @pytest.mark.parametrize("n", [10, 50, 100])
    def test_reservoir_sized_matrices(self, n):
        rng = np.random.default_rng(n)
        for _ in range(5):
            a = rng.uniform(-1, 1, (n, n))
            ref = np.max(np.abs(np.linalg.eigvals(a)))
            got = nm.spectral_radius(a, tol=1e-8, max_iter=1_000_000)
            assert got == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("c", [-3.0, -0.5, 0.25, 2.0, 7.3])
    def test_homogeneity(self, c):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = rng.uniform(-1, 1, (6, 6))
            base = nm.spectral_radius(a, tol=1e-10, max_iter=100_000)
            assert nm.spectral_radius(c * a, tol=1e-10, max_iter=100_000) == pytest.approx(
                abs(c) * base, rel=1e-8)

    def test_relative_error_within_default_tol(self):
        rng = np.random.default_rng(13)
        for n in (2, 3, 4, 6):
            for _ in range(100):
                a = rng.uniform(-1, 1, (n, n))
                ref = np.max(np.abs(np.linalg.eigvals(a)))
                got = nm.spectral_radius(a, max_iter=1_000_000)
                assert abs(got - ref) <= nm.DEFAULT_TOL * ref

    def test_bounded_by_operator_norm(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            a = rng.uniform(-1, 1, (7, 7))
            assert nm.spectral_radius(a) <= nm.operator_norm_2(a) * (1 + 1e-6)


class TestOperatorNorm:
    def test_diagonal(self):
        assert nm.operator_norm_2(np.diag([0.5, 2.0])) == pytest.approx(2.0, rel=1e-12)

    def test_zero(self):
        assert nm.operator_norm_2(np.zeros((3, 2))) == 0.0

    def test_random_against_gram_eigen(self):
        a = np.random.default_rng(3).uniform(-1, 1, (5, 3))
        lam, _ = nm.symmetric_eigen(a.T @ a)
        assert nm.operator_norm_2(a, tol=1e-12) == pytest.approx(np.sqrt(lam[0]), rel=1e-8)

    def test_start_vector_orthogonal_to_top_direction(self):
        # ones is in the null space; the alternating start recovers the norm
        a = np.array([[1.0, -1.0]])
        assert nm.operator_norm_2(a) == pytest.approx(np.sqrt(2.0), rel=1e-12)

    def test_column_vector(self):
        v = np.array([[3.0], [4.0]])
        assert nm.operator_norm_2(v) == pytest.approx(5.0, rel=1e-12)


class TestSymmetricEigen:
    def test_diagonal(self):
        lam, v = nm.symmetric_eigen(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(lam, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(np.abs(v), np.eye(3)[:, [0, 2, 1]])

    def test_exchange(self):
        lam, _ = nm.symmetric_eigen([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(lam, [1.0, -1.0], atol=1e-15)

    def test_random_reconstruction(self):
        b = np.random.default_rng(6).uniform(-1, 1, (6, 6))
        s = b + b.T
        lam, v = nm.symmetric_eigen(s)
        scale = np.linalg.norm(s, 2)
        np.testing.assert_allclose(v @ np.diag(lam) @ v.T, s, atol=1e-8 * scale)
        np.testing.assert_allclose(v.T @ v, np.eye(6), atol=1e-8)
        assert np.all(np.diff(lam) <= 0)

    def test_trace_preserved(self):
        rng = np.random.default_rng(8)
        for n in (2, 5, 20, 60):
            b = rng.normal(size=(n, n))
            s = b @ b.T - 0.5 * np.eye(n)
            lam, _ = nm.symmetric_eigen(s)
            assert abs(lam.sum() - np.trace(s)) <= 1e-10 * np.linalg.norm(s, 2)

    def test_matches_lapack(self):
        b = np.random.default_rng(1).normal(size=(40, 40))
        s = b + b.T
        lam, _ = nm.symmetric_eigen(s)
        np.testing.assert_allclose(lam, np.linalg.eigvalsh(s)[::-1], atol=1e-10)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            nm.symmetric_eigen([[1.0, 2.0], [0.0, 1.0]])

    def test_tiny_asymmetry_symmetrized(self):
        s = np.array([[2.0, 1.0], [1.0 + 1e-12, 2.0]])
        lam, _ = nm.symmetric_eigen(s)
        np.testing.assert_allclose(lam, [3.0, 1.0], atol=1e-11)

    def test_non_square(self):
        with pytest.raises(DimensionError):
            nm.symmetric_eigen(np.ones((2, 3)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_property_reconstruction(self, n, seed):
        b = np.random.default_rng(seed).normal(size=(n, n))
        s = b + b.T
        lam, v = nm.symmetric_eigen(s)
        scale = max(np.linalg.norm(s, 2), 1e-300)
        assert np.max(np.abs(v @ np.diag(lam) @ v.T - s)) <= 1e-8 * scale
        assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-8


class TestSingularValues:
    def test_rank_one_row(self):
        np.testing.assert_allclose(nm.singular_values([[1, 1, 1, 1], [0, 0, 0, 0]]), [2.0, 0.0])

    def test_orthonormal_rows(self):
        q, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(9, 3)))
        np.testing.assert_allclose(nm.singular_values(q.T), np.ones(3), rtol=1e-12)

    def test_random_against_jacobi_svd(self):
        x = np.random.default_rng(4).uniform(-1, 1, (4, 50))
        got = nm.singular_values(x)
        ref = jacobi_svd_values(x)
        big = ref > 1e-10
        np.testing.assert_allclose(got[big], ref[big], rtol=1e-8)

    def test_sum_of_squares_is_trace(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            x = rng.normal(size=(6, 30))
            sv = nm.singular_values(x)
            assert np.sum(sv ** 2) == pytest.approx(np.trace(x @ x.T), rel=1e-8)

    def test_non_increasing_non_negative(self):
        sv = nm.singular_values(np.random.default_rng(0).normal(size=(10, 12)))
        assert np.all(sv >= 0) and np.all(np.diff(sv) <= 0)

    def test_tall_rejected(self):
        with pytest.raises(DimensionError):
            nm.singular_values(np.ones((5, 2)))


class TestLeastSquares:
    def test_identity_features(self):
        y = np.array([[0.3, -1.2, 4.0]])
        np.testing.assert_allclose(nm.least_squares_solve(np.eye(3), y), y, atol=1e-14)

    def test_decoupled_scalars(self):
        w = nm.least_squares_solve(np.diag([2.0, 4.0]), np.array([[2.0, 4.0]]))
        np.testing.assert_allclose(w, [[1.0, 1.0]], atol=1e-14)

    def test_overdetermined_against_elimination(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=(5, 40))
        y = rng.normal(size=(2, 40))
        np.testing.assert_allclose(nm.least_squares_solve(x, y),
                                   normal_equation_weights(x, y), atol=1e-8)

    def test_square_reproduces_inverse(self):
        rng = np.random.default_rng(22)
        x = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        y = rng.normal(size=(1, 4))
        ref = normal_equation_weights(x, y)
        np.testing.assert_allclose(nm.least_squares_solve(x, y), ref, atol=1e-8)
        np.testing.assert_allclose(nm.least_squares_solve(x, y) @ x, y, atol=1e-8)

    def test_gradient_vanishes(self):
        rng = np.random.default_rng(23)
        x = rng.normal(size=(6, 200))
        y = rng.normal(size=(1, 200))
        w = nm.least_squares_solve(x, y)
        grad = 2 * (w @ x - y) @ x.T
        assert np.max(np.abs(grad)) <= 1e-6 * np.linalg.norm(y) * np.linalg.norm(x)

    def test_ridge_shrinks(self):
        rng = np.random.default_rng(24)
        x = rng.uniform(-1, 1, (3, 50))
        y = rng.uniform(-1, 1, (1, 50))
        assert np.max(np.abs(nm.least_squares_solve(x, y, ridge=1e12))) <= 1e-6

    def test_rank_deficient_uses_pseudoinverse(self):
        x = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
        y = np.array([[1.0, 2.0, 3.0]])
        w = nm.least_squares_solve(x, y)
        np.testing.assert_allclose(w @ x, y, atol=1e-10)
        np.testing.assert_allclose(w, y @ np.linalg.pinv(x), atol=1e-10)

    def test_errors(self):
        with pytest.raises(DimensionError):
            nm.least_squares_solve(np.ones((2, 3)), np.ones((1, 4)))
        with pytest.raises(DegenerateSystemError):
            nm.least_squares_solve(np.zeros((2, 3)), np.ones((1, 3)))
        with pytest.raises(ValueError):
            nm.least_squares_solve(np.eye(2), np.ones((1, 2)), ridge=-1.0)
