import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn, kv

from kdvaw.errors import ConfigError, InvalidParam, NegativeDiscriminant, UnsupportedNu
from kdvaw.kernels import (DotProductAnalytic, Domain, Gaussian, Kernel, Matern, Polynomial, kappa,
                           kernel_eval, pseudometric, pseudometric_matrix)


def matern_bessel(nu, ell, h):
    """General Matern formula through the modified Bessel function."""
    z = math.sqrt(2 * nu) * h / ell
    if z == 0:
        return 1.0
    return 2 ** (1 - nu) / gamma_fn(nu) * z ** nu * kv(nu, z)


class TestEval:
    def test_gaussian_diagonal(self):
        assert kernel_eval(Gaussian(1.0), [0.3, -0.2], [0.3, -0.2]) == 1.0

    @pytest.mark.parametrize("r", [0.1, 1.0, 2.0])
    def test_matern_half_is_exponential(self, r):
        k = Matern(0.5, 1.0)
        assert k([0.0], [r]) == pytest.approx(math.exp(-r), rel=1e-14)
        assert k([0.0], [r]) == pytest.approx(matern_bessel(0.5, 1.0, r), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.5, 1.5, 2.5, 3.5])
    @pytest.mark.parametrize("h", [1e-3, 0.2, 1.0, 3.0])
    def test_matern_against_bessel(self, nu, h):
        assert Matern(nu, 0.7).radial(h) == pytest.approx(matern_bessel(nu, 0.7, h), rel=1e-10)

    def test_matern_three_halves_closed_form(self):
        h = np.linspace(0, 4, 41)
        want = (1 + math.sqrt(3) * h / 0.8) * np.exp(-math.sqrt(3) * h / 0.8)
        assert np.abs(Matern(1.5, 0.8).radial(h) - want).max() <= 1e-12

    def test_polynomial_substitution(self):
        assert kernel_eval(Polynomial(2, 1.0), [1.0, 0.0], [1.0, 0.0]) == 4.0

    def test_dot_product_rules(self):
        assert DotProductAnalytic("geometric", 0.5)([1.0], [1.0]) == pytest.approx(2.0)
        assert DotProductAnalytic("exponential", 1.0, 2.0)([1.0], [2.0]) == pytest.approx(math.exp(0.5))

    @pytest.mark.parametrize("nu", [1.0, 0.3, 2.0])
    def test_unsupported_nu(self, nu):
        with pytest.raises(UnsupportedNu):
            Matern(nu)

    def test_invalid_params(self):
        for bad in (lambda: Gaussian(0.0), lambda: Polynomial(0), lambda: Polynomial(1.5),
                    lambda: DotProductAnalytic("cubic"), lambda: Domain(0)):
            with pytest.raises(InvalidParam):
                bad()

    @pytest.mark.parametrize("k", [Gaussian(0.7), Polynomial(3, 1.3), Matern(2.5, 0.4),
                                   DotProductAnalytic("geometric", 0.4)])
    def test_gram_is_symmetric_psd(self, k):
        X = Domain(2).sample(40, np.random.default_rng(0))
        G = k.gram(X)
        assert np.array_equal(G, G.T)
        assert np.linalg.eigvalsh(G).min() > -1e-10 * np.abs(G).max()
        np.testing.assert_allclose(np.diag(G), k.diag(X), rtol=1e-14)


class TestKappa:
    def test_values(self):
        dom = Domain(2, 1.0)
        assert kappa(Gaussian(1.0), dom) == 1.0
        assert kappa(Polynomial(2, 1.0), dom) == pytest.approx(2.0)
        assert kappa(DotProductAnalytic("exponential", 1.0, 1.0), dom) == pytest.approx(math.exp(0.5))

    def test_dominates_diagonal(self):
        dom = Domain(3, 1.5)
        X = dom.sample(500, np.random.default_rng(0))
        for k in (Polynomial(3, 0.8), DotProductAnalytic("exponential", 1.0, 1.2)):
            assert np.sqrt(k.diag(X)).max() <= kappa(k, dom) + 1e-12

    def test_geometric_convergence_radius(self):
        with pytest.raises(ConfigError):
            DotProductAnalytic("geometric", 1.0).check_domain(Domain(1, 1.0))


class TestPseudometric:
    @pytest.mark.parametrize("k", [Gaussian(1.0), Matern(0.5), Polynomial(2)])
    def test_zero_on_diagonal(self, k):
        assert pseudometric(k, [0.2, 0.4], [0.2, 0.4]) == 0.0

    def test_gaussian_limit(self):
        assert pseudometric(Gaussian(1.0), [0.0], [50.0]) == pytest.approx(math.sqrt(2.0))

    def test_matern_value(self):
        assert pseudometric(Matern(0.5), [0.0], [1.0]) == pytest.approx(math.sqrt(2 - 2 * math.exp(-1)))

    def test_matern_small_h_scaling(self):
        # rho ~ h^nu for nu = 1/2: slope 1/2 on a log-log fit
        h = np.logspace(-4, -2, 9)
        rho = [pseudometric(Matern(0.5), [0.0], [v]) for v in h]
        slope = np.polyfit(np.log(h), np.log(rho), 1)[0]
        assert slope == pytest.approx(0.5, abs=0.02)

    def test_matrix_matches_pointwise(self):
        k = Gaussian(0.6)
        X = Domain(2).sample(7, np.random.default_rng(1))
        M = pseudometric_matrix(k, X, X[:3])
        for i in range(7):
            for j in range(3):
                assert M[i, j] == pytest.approx(pseudometric(k, X[i], X[j]), abs=1e-7)

    def test_negative_radicand_detected(self):
        class NotPSD(Kernel):
            def matrix(self, X, Y):
                return np.where(np.abs(np.asarray(X)[:, :1] - np.asarray(Y)[:, 0]) < 1e-15, 0.0, 1.0)

        with pytest.raises(NegativeDiscriminant):
            pseudometric(NotPSD(), [0.0], [1.0])


def test_domain_sampling_stays_inside():
    dom = Domain(4, 2.0)
    X = dom.sample(1000, np.random.default_rng(0))
    assert dom.contains(X)
    assert not dom.contains([[2.1, 0, 0, 0]])


@pytest.mark.parametrize("k", [Gaussian(0.7), Matern(0.5, 0.5), Matern(2.5), Polynomial(3, 1.2)])
def test_extended_matrix_agrees(k):
    X = Domain(2).sample(20, np.random.default_rng(4))
    np.testing.assert_allclose(k.matrix_ext(X, X[:5]).astype(float), k.matrix(X, X[:5]), rtol=1e-14)
    np.testing.assert_allclose(k.diag_ext(X).astype(float), k.diag(X), rtol=1e-14)
