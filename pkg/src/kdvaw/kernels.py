"""Kernel evaluations, the induced pseudometric, and input domains."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError, InvalidParam, NegativeDiscriminant, UnsupportedNu

RADICAND_CLAMP = 1e-12
EXT = np.longdouble  # 80-bit on x86; plain float64 elsewhere


def _as_points(x):
    x = np.asarray(x, dtype=np.float64)
    return x.reshape(1, -1) if x.ndim <= 1 else x


def _sqdist(X, Y):
    # direct differences: the expanded form leaves ~1e-17 residue at x == y
    return cdist(X, Y, "sqeuclidean")


def _sqdist_ext(X, Y):
    X, Y = _as_points(X).astype(EXT), _as_points(Y).astype(EXT)
    return ((X[:, None, :] - Y[None, :, :]) ** 2).sum(-1)


@dataclass(frozen=True)
class Domain:
    """``X`` inside the ball of radius ``radius`` in R^d.

    Sampling is uniform on the axis-aligned cube inscribed in that ball.
    """

    d: int
    radius: float = 1.0

    def __post_init__(self):
        if self.d < 1 or not self.radius > 0:
            raise InvalidParam(f"bad domain d={self.d}, radius={self.radius}")

    @property
    def half_width(self):
        return self.radius / math.sqrt(self.d)

    def sample(self, n, rng):
        h = self.half_width
        return rng.uniform(-h, h, size=(int(n), self.d))

    def contains(self, x, rtol=1e-12):
        x = _as_points(x)
        return bool(np.all(np.linalg.norm(x, axis=1) <= self.radius * (1 + rtol)))


class Kernel:
    """Common vectorised interface. Subclasses implement ``matrix``."""

    def __call__(self, x, y):
        return float(self.matrix(_as_points(x), _as_points(y))[0, 0])

    def diag(self, X):
        X = _as_points(X)
        return np.array([self.matrix(X[i:i + 1], X[i:i + 1])[0, 0] for i in range(len(X))])

    def gram(self, X):
        K = self.matrix(_as_points(X), _as_points(X))
        return 0.5 * (K + K.T)

    # Extended-precision evaluation. Only used where float64 rounding gets
    # amplified (square roots of tiny differences); the default just casts.
    def matrix_ext(self, X, Y):
        return self.matrix(X, Y).astype(EXT)

    def diag_ext(self, X):
        return self.diag(X).astype(EXT)


@dataclass(frozen=True)
class Gaussian(Kernel):
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParam("sigma must be positive")

    def matrix(self, X, Y):
        return np.exp(-_sqdist(_as_points(X), _as_points(Y)) / (2.0 * self.sigma ** 2))

    def matrix_ext(self, X, Y):
        return np.exp(-_sqdist_ext(X, Y) / (2 * EXT(self.sigma) ** 2))

    def diag(self, X):
        return np.ones(len(_as_points(X)))

    def kappa(self, domain):
        return 1.0


@dataclass(frozen=True)
class Polynomial(Kernel):
    """``(1 + <x, y> / sigma^2)^q``."""

    q: int = 2
    sigma: float = 1.0

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1 or not self.sigma > 0:
            raise InvalidParam("need integer q >= 1 and sigma > 0")

    def matrix(self, X, Y):
        return (1.0 + _as_points(X) @ _as_points(Y).T / self.sigma ** 2) ** int(self.q)

    def matrix_ext(self, X, Y):
        X, Y = _as_points(X).astype(EXT), _as_points(Y).astype(EXT)
        return (1 + X @ Y.T / EXT(self.sigma) ** 2) ** int(self.q)

    def diag(self, X):
        X = _as_points(X)
        return (1.0 + (X * X).sum(1) / self.sigma ** 2) ** int(self.q)

    def diag_ext(self, X):
        X = _as_points(X).astype(EXT)
        return (1 + (X * X).sum(1) / EXT(self.sigma) ** 2) ** int(self.q)

    def kappa(self, domain):
        return (1.0 + domain.radius ** 2 / self.sigma ** 2) ** (self.q / 2.0)


@dataclass(frozen=True)
class DotProductAnalytic(Kernel):
    """``f(<x, y>)`` with nonnegative Maclaurin coefficients given by a rule.

    rule="geometric": ``f(t) = 1 / (1 - scale * t)``, ``a_n = scale^n``.
    rule="exponential": ``f(t) = exp(t / sigma^2)``, ``a_n = 1 / (n! sigma^(2n))``.

    ``tail_ratio`` is the ``q < 1`` with ``a_n r^(2n) <= q^n`` used by the
    truncation bound; for the geometric rule it defaults to ``scale * r^2``.
    """

    rule: str = "exponential"
    scale: float = 1.0
    sigma: float = 1.0
    tail_ratio: float = None

    def __post_init__(self):
        if self.rule not in ("geometric", "exponential"):
            raise InvalidParam(f"unknown dot-product rule {self.rule!r}")
        if not self.scale > 0 or not self.sigma > 0:
            raise InvalidParam("scale and sigma must be positive")
        if self.tail_ratio is not None and not 0 < self.tail_ratio < 1:
            raise InvalidParam("tail_ratio must lie in (0, 1)")

    @property
    def convergence_radius(self):
        return 1.0 / self.scale if self.rule == "geometric" else math.inf

    def f(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.rule == "geometric":
            return 1.0 / (1.0 - self.scale * t)
        return np.exp(t / self.sigma ** 2)

    def log_coefficient(self, n):
        """``log a_n``."""
        if self.rule == "geometric":
            return n * math.log(self.scale)
        return -math.lgamma(n + 1) - 2.0 * n * math.log(self.sigma)

    def matrix(self, X, Y):
        return self.f(_as_points(X) @ _as_points(Y).T)

    def diag(self, X):
        X = _as_points(X)
        return self.f((X * X).sum(1))

    def kappa(self, domain):
        return math.sqrt(float(self.f(domain.radius ** 2)))

    def check_domain(self, domain):
        if not self.convergence_radius > domain.radius ** 2:
            raise ConfigError(
                f"convergence radius {self.convergence_radius} must exceed r^2 = {domain.radius ** 2}",
                "kernel")


@dataclass(frozen=True)
class Matern(Kernel):
    """Matern kernel for half-integer ``nu = p + 1/2`` via its closed form."""

    nu: float = 0.5
    ell: float = 1.0

    def __post_init__(self):
        if not self.nu > 0 or not self.ell > 0:
            raise InvalidParam("nu and ell must be positive")
        twice = 2.0 * self.nu
        if abs(twice - round(twice)) > 1e-12 or round(twice) % 2 != 1:
            raise UnsupportedNu(f"only half-integer nu is supported, got {self.nu}")

    @property
    def p(self):
        return int(round(self.nu - 0.5))

    def radial(self, h):
        """Kernel value as a function of the distance ``h``."""
        h = np.asarray(h)
        t = h.dtype.type if h.dtype == EXT else np.float64  # keeps extended inputs extended
        h = h.astype(t)
        p = self.p
        z = np.sqrt(t(2 * self.nu)) * h / t(self.ell)
        poly = np.zeros_like(z)
        scale = t(math.factorial(p)) / t(math.factorial(2 * p))
        for i in range(p + 1):
            c = math.factorial(p + i) // (math.factorial(i) * math.factorial(p - i))
            poly = poly + t(c) * (2 * z) ** (p - i)
        return scale * poly * np.exp(-z)

    def matrix(self, X, Y):
        return self.radial(np.sqrt(_sqdist(_as_points(X), _as_points(Y))))

    def matrix_ext(self, X, Y):
        return self.radial(np.sqrt(_sqdist_ext(X, Y)))

    def diag(self, X):
        return np.ones(len(_as_points(X)))

    def kappa(self, domain):
        return 1.0


def kernel_eval(spec, x, y):
    return spec(x, y)


def kappa(spec, domain):
    """``sup_x sqrt(k(x, x))`` over the domain ball."""
    return float(spec.kappa(domain))


def _rho_from_radicand(r2):
    r2 = np.asarray(r2, dtype=np.float64)
    if np.any(r2 < -RADICAND_CLAMP):
        raise NegativeDiscriminant(f"pseudometric radicand {r2.min():.3e} < 0; kernel is not PSD")
    return np.sqrt(np.maximum(r2, 0.0))


def pseudometric(spec, x, y):
    """``|k(., x) - k(., y)|_H``."""
    x, y = _as_points(x), _as_points(y)
    if isinstance(spec, Matern):
        # stationary form avoids cancelling k(x,x) against k(x,y) twice
        h = float(np.linalg.norm(x[0] - y[0]))
        return float(_rho_from_radicand(2.0 * (1.0 - spec.radial(h))))
    r2 = spec(x, x) - 2.0 * spec(x, y) + spec(y, y)
    return float(_rho_from_radicand(r2))


def pseudometric_matrix(spec, X, Y):
    """Pairwise pseudometric between rows of ``X`` and ``Y``."""
    X, Y = _as_points(X), _as_points(Y)
    r2 = spec.diag(X)[:, None] - 2.0 * spec.matrix(X, Y) + spec.diag(Y)[None, :]
    return _rho_from_radicand(r2)
