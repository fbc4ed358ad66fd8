import math
from itertools import combinations

import numpy as np
import pytest

from kdvaw.errors import EmptyBasis, InvalidParam
from kdvaw.kernels import Domain, Gaussian, Kernel, Matern, pseudometric_matrix
from kdvaw.sections import (build_section_basis, farthest_point_net, load_points_csv, power_function,
                            power_function_many, save_points_csv, section_feature_eval,
                            subspace_error_estimate)


class Euclid(Kernel):
    """Linear kernel on R^1 plus a constant: rho is |x - y|."""

    def matrix(self, X, Y):
        return 1.0 + np.asarray(X) @ np.asarray(Y).T


def covering_radius(spec, pool, idx):
    return pseudometric_matrix(spec, pool, pool[list(idx)]).min(1).max()


class TestNet:
    def test_three_point_pool(self):
        pool = np.array([[0.0], [0.5], [1.0]])
        Z, rep = farthest_point_net(Domain(1), Euclid(), 2, pool=pool)
        assert rep.selected == (1, 0)
        assert rep.covering_radius == pytest.approx(0.5)

    def test_full_pool(self):
        pool = Domain(1).sample(6, np.random.default_rng(0))
        Z, rep = farthest_point_net(Domain(1), Gaussian(1.0), 6, pool=pool)
        assert sorted(rep.selected) == list(range(6)) and rep.covering_radius == 0.0

    def test_duplicates_skipped(self):
        pool = np.array([[0.1], [0.1], [0.9], [0.9], [-0.5]])
        _, rep = farthest_point_net(Domain(1), Gaussian(1.0), 3, pool=pool)
        assert len({tuple(pool[i]) for i in rep.selected}) == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_within_twice_optimal(self, seed):
        pool = Domain(1).sample(12, np.random.default_rng(seed))
        spec = Matern(0.5, 0.5)
        _, rep = farthest_point_net(Domain(1), spec, 3, pool=pool)
        best = min(covering_radius(spec, pool, c) for c in combinations(range(12), 3))
        assert rep.covering_radius <= 2 * best + 1e-12

    def test_seeded_pool_deterministic(self):
        a, _ = farthest_point_net(Domain(2), Gaussian(0.5), 8, seed=3)
        b, _ = farthest_point_net(Domain(2), Gaussian(0.5), 8, seed=3)
        np.testing.assert_array_equal(a, b)

    def test_nested(self):
        pool = Domain(1).sample(200, np.random.default_rng(0))
        a, _ = farthest_point_net(Domain(1), Matern(0.5), 10, pool=pool)
        b, _ = farthest_point_net(Domain(1), Matern(0.5), 5, pool=pool)
        np.testing.assert_array_equal(a[:5], b)

    def test_pool_too_small(self):
        with pytest.raises(InvalidParam):
            farthest_point_net(Domain(1), Gaussian(1.0), 4, pool=np.zeros((2, 1)))


class TestBasis:
    def test_single_point(self):
        b = build_section_basis([[0.2]], Gaussian(1.0))
        assert b.gram.tolist() == [[1.0]] and b.dim == 1
        assert section_feature_eval(b, [0.2])[0] == pytest.approx(1.0)
        assert b([0.9])[0] == pytest.approx(Gaussian(1.0)([0.9], [0.2]))

    def test_identical_points(self):
        assert build_section_basis([[0.3], [0.3]], Gaussian(1.0)).dim == 1

    def test_two_points_by_hand(self):
        b = build_section_basis([[0.0], [2.0]], Gaussian(1.0))
        e = math.exp(-2.0)
        np.testing.assert_allclose(b.gram, [[1, e], [e, 1]])
        np.testing.assert_allclose(b.eigenvalues, [1 + e, 1 - e], rtol=1e-14)
        np.testing.assert_allclose(b.inner_products(), np.eye(2), atol=1e-14)

    def test_projection_norm_identity(self):
        b = build_section_basis([[0.0], [2.0]], Gaussian(1.0))
        k = Gaussian(1.0).matrix([[1.0]], b.points)[0]
        want = k @ np.linalg.inv(b.gram) @ k
        assert (b([1.0]) ** 2).sum() == pytest.approx(want, rel=1e-13)
        assert power_function(b, [1.0]) == pytest.approx(math.sqrt(1 - want), rel=1e-12)

    def test_empty(self):
        class Zero(Kernel):
            def matrix(self, X, Y):
                return np.zeros((len(X), len(Y)))

        with pytest.raises(EmptyBasis):
            build_section_basis([[0.0], [1.0]], Zero())

    def test_jacobi_and_lapack_agree(self):
        Z = Domain(2).sample(15, np.random.default_rng(0))
        a = build_section_basis(Z, Matern(1.5, 0.5), method="lapack")
        b = build_section_basis(Z, Matern(1.5, 0.5), method="jacobi")
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-9)
        X = Domain(2).sample(10, np.random.default_rng(1))
        np.testing.assert_allclose(power_function_many(a, X), power_function_many(b, X), atol=1e-8)


class TestPower:
    def test_nodes(self):
        Z = Domain(1).sample(10, np.random.default_rng(0))
        b = build_section_basis(Z, Matern(0.5))
        assert power_function_many(b, Z).max() <= 1e-7

    def test_far_from_single_point(self):
        b = build_section_basis([[0.0]], Gaussian(1.0))
        assert power_function(b, [40.0]) == pytest.approx(1.0)

    def test_estimate_on_probe_set(self):
        Z = Domain(1).sample(5, np.random.default_rng(0))
        b = build_section_basis(Z, Matern(0.5))
        assert subspace_error_estimate(b, probes=Z) <= 1e-7

    def test_single_gaussian_boundary(self):
        b = build_section_basis([[0.0]], Gaussian(1.0))
        probes = np.linspace(-1, 1, 201)[:, None]
        p = power_function_many(b, probes)
        assert np.argmax(p) in (0, 200)
        assert subspace_error_estimate(b, probes=probes) == pytest.approx(math.sqrt(1 - math.exp(-1)))

    def test_matern_rate(self):
        dom, spec = Domain(1), Matern(0.5)
        probes = dom.sample(2000, np.random.default_rng(9))
        pool = dom.sample(3200, np.random.default_rng(1))
        ms, errs = [4, 8, 16, 32], []
        for m in ms:
            Z, _ = farthest_point_net(dom, spec, m, pool=pool)
            errs.append(subspace_error_estimate(build_section_basis(Z, spec), probes=probes))
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert np.polyfit(np.log(ms), np.log(errs), 1)[0] == pytest.approx(-0.5, abs=0.15)


def test_points_csv_roundtrip(tmp_path):
    Z = Domain(3).sample(7, np.random.default_rng(0))
    save_points_csv(tmp_path / "z.csv", Z)
    np.testing.assert_array_equal(load_points_csv(tmp_path / "z.csv"), Z)
