import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdvaw.errors import DegenerateUpdate, DimensionMismatch, NotPositiveDefinite
from kdvaw.linalg import sherman_morrison_inverse_update, solve_spd, sym_eig, sym_matrix


def random_spd(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


class TestSolveSPD:
    def test_identity(self):
        np.testing.assert_allclose(solve_spd(np.eye(2), [3.0, -1.0]), [3.0, -1.0])

    def test_diagonal(self):
        np.testing.assert_allclose(solve_spd(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])

    def test_two_by_two_multiplies_back(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        x = solve_spd(a, [3.0, 3.0])
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(a @ x, [3.0, 3.0], atol=1e-14)

    def test_matrix_rhs(self):
        a = random_spd(6, 0)
        x = solve_spd(a, np.eye(6))
        np.testing.assert_allclose(a @ x, np.eye(6), atol=1e-12)

    def test_singular_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd([[1.0, 1.0], [1.0, 1.0]], [1.0, 0.0])

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd([[1.0, 0.0], [0.0, -1.0]], [1.0, 0.0])

    def test_tiny_pivot_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd(np.diag([1.0, 1e-17]), [1.0, 1.0])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_spd(np.eye(2), [1.0, 2.0, 3.0])

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            sym_matrix([[1.0, 2.0], [0.0, 1.0]])


class TestShermanMorrison:
    def test_rank_one_on_identity(self):
        np.testing.assert_allclose(sherman_morrison_inverse_update(np.eye(2), [1.0, 0.0], 1.0),
                                   np.diag([0.5, 1.0]), atol=1e-15)

    def test_zero_vector_is_pure_discount(self):
        np.testing.assert_allclose(sherman_morrison_inverse_update(np.eye(2), [0.0, 0.0], 2.0),
                                   np.eye(2) / 2, atol=1e-15)

    def test_against_solve(self):
        got = sherman_morrison_inverse_update(np.diag([1.0, 0.5]), [1.0, 1.0], 1.0)
        target = np.array([[2.0, 1.0], [1.0, 3.0]])
        cols = np.column_stack([solve_spd(target, e) for e in np.eye(2)])
        np.testing.assert_allclose(got, cols, atol=1e-14)

    def test_degenerate_denominator(self):
        # indefinite "inverse" drives 1 + v^T B v to zero
        with pytest.raises(DegenerateUpdate):
            sherman_morrison_inverse_update(-np.eye(1), [1.0], 1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10_000), st.floats(0.5, 1.0))
    def test_matches_direct_inverse(self, n, seed, scale):
        a = random_spd(n, seed)
        v = np.random.default_rng(seed + 1).standard_normal(n)
        got = sherman_morrison_inverse_update(np.linalg.inv(a), v, scale)
        want = np.linalg.inv(scale * a + np.outer(v, v))
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-12)


class TestSymEig:
    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_diagonal(self, method):
        e = sym_eig(np.diag([2.0, 1.0]), method)
        np.testing.assert_allclose(e.eigenvalues, [2.0, 1.0])
        np.testing.assert_allclose(np.abs(e.eigenvectors), np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_rank_one(self, method):
        e = sym_eig([[1.0, 1.0], [1.0, 1.0]], method)
        np.testing.assert_allclose(e.eigenvalues, [2.0, 0.0], atol=1e-14)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_reconstruction(self, method):
        a = random_spd(5, 42)
        e = sym_eig(a, method)
        assert np.abs(e.reconstruct() - a).max() < 1e-8
        assert np.all(np.diff(e.eigenvalues) <= 0)
        np.testing.assert_allclose(e.eigenvectors.T @ e.eigenvectors, np.eye(5), atol=1e-10)

    def test_methods_agree(self):
        a = random_spd(30, 7)
        np.testing.assert_allclose(sym_eig(a, "jacobi").eigenvalues, sym_eig(a, "lapack").eigenvalues,
                                   rtol=1e-10)
