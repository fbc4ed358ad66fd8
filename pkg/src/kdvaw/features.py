"""Explicit orthonormal feature maps obtained by truncating kernel expansions.

Each kernel with an explicit expansion ``k(x, y) = sum_alpha g_alpha(x) g_alpha(y)``
is truncated to the first ``m`` multi-indices in graded order; the
``g_alpha`` are orthonormal in the RKHS, so the feature map is the coordinate
map of the subspace they span.
"""
import math
import sys
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainViolation, InvalidParam, Overflow, PartialLayer
from .kernels import DotProductAnalytic, Gaussian, Polynomial


def layer_dimension(d, M):
    """Number of multi-indices in N_0^d with degree at most ``M``."""
    if d < 1 or M < 0:
        raise InvalidParam("need d >= 1 and M >= 0")
    n = math.comb(d + M, M)
    if n > sys.maxsize:
        raise Overflow(f"binom({d + M}, {M}) exceeds the platform integer")
    return n


def degree_for_dimension(d, m):
    """The unique ``M`` with ``layer_dimension(d, M) <= m < layer_dimension(d, M + 1)``."""
    if m < 1:
        raise InvalidParam("m must be >= 1")
    M = 0
    while layer_dimension(d, M + 1) <= m:
        M += 1
    return M


def enumerate_indices(d, m):
    """First ``m`` multi-indices ordered by degree, then lexicographically
    (largest exponent on the first coordinate first)."""
    if m < 1:
        raise InvalidParam("m must be >= 1")
    out = []
    degree = 0
    while len(out) < m:
        for combo in combinations_with_replacement(range(d), degree):
            alpha = [0] * d
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
            if len(out) == m:
                break
        degree += 1
    return out


@dataclass(frozen=True)
class ExplicitFeatureMap:
    """Truncated orthonormal feature map ``x -> (g_alpha(x))`` for the first
    ``m`` multi-indices.  ``radius`` bounds admissible inputs."""

    kernel: object
    d: int
    m: int
    radius: float = 1.0
    indices: tuple = field(init=False)
    _exponents: np.ndarray = field(init=False, repr=False)
    _log_coef: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = self.kernel
        if not isinstance(k, (Polynomial, Gaussian, DotProductAnalytic)):
            raise InvalidParam(f"no explicit expansion for {type(k).__name__}")
        if isinstance(k, Polynomial) and self.m > layer_dimension(self.d, k.q):
            raise InvalidParam(
                f"polynomial RKHS has dimension {layer_dimension(self.d, k.q)}, requested m={self.m}")
        idx = enumerate_indices(self.d, self.m)
        exps = np.array(idx, dtype=np.int64).reshape(self.m, self.d)
        log_coef = np.array([self._log_coefficient(a) for a in idx])
        object.__setattr__(self, "indices", tuple(idx))
        object.__setattr__(self, "_exponents", exps)
        object.__setattr__(self, "_log_coef", log_coef)

    def _log_coefficient(self, alpha):
        k = self.kernel
        n = sum(alpha)
        log_alpha_fact = sum(math.lgamma(a + 1) for a in alpha)
        if isinstance(k, Polynomial):
            # q! / ((q - n)! alpha!) sigma^(-2n), square-rooted
            return 0.5 * (math.lgamma(k.q + 1) - math.lgamma(k.q - n + 1) - log_alpha_fact) - n * math.log(k.sigma)
        if isinstance(k, Gaussian):
            return -n * math.log(k.sigma) - 0.5 * log_alpha_fact
        return 0.5 * (k.log_coefficient(n) + math.lgamma(n + 1) - log_alpha_fact)

    @property
    def dim(self):
        return self.m

    @property
    def degree(self):
        """Largest complete degree layer contained in the map."""
        return degree_for_dimension(self.d, self.m)

    @property
    def is_full_layer(self):
        return layer_dimension(self.d, self.degree) == self.m

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.d:
            raise InvalidParam(f"expected a point in R^{self.d}")
        if np.linalg.norm(x) > self.radius * (1 + 1e-12):
            raise DomainViolation(f"|x| = {np.linalg.norm(x):.6g} exceeds radius {self.radius}")
        return self.transform(x[None, :])[0]

    def transform(self, X):
        """Vectorised evaluation on the rows of ``X`` (no domain check)."""
        X = np.asarray(X, dtype=np.float64).reshape(-1, self.d)
        e = self._exponents
        with np.errstate(divide="ignore", invalid="ignore"):
            logabs = np.log(np.abs(X))
            # 0^0 = 1; 0^k = 0 handled through -inf
            terms = np.where(e[None, :, :] == 0, 0.0, e[None, :, :] * logabs[:, None, :])
        log_mag = terms.sum(2) + self._log_coef[None, :]
        negatives = ((X[:, None, :] < 0) & (e[None, :, :] % 2 == 1)).sum(2)
        sign = np.where(negatives % 2 == 1, -1.0, 1.0)
        if isinstance(self.kernel, Gaussian):
            log_mag = log_mag - (X * X).sum(1)[:, None] / (2.0 * self.kernel.sigma ** 2)
        return sign * np.exp(log_mag)

    def truncated_kernel(self, X, Y):
        return self.transform(X) @ self.transform(Y).T


def truncation_error_bound(fmap, domain):
    """Uniform bound on ``|k - k_M|`` over the domain for a full-layer map."""
    if not fmap.is_full_layer:
        raise PartialLayer(f"m={fmap.m} is not a full-layer dimension in d={fmap.d}")
    M = fmap.degree
    k = fmap.kernel
    r2 = domain.radius ** 2
    if isinstance(k, Polynomial):
        # exact tail of the binomial expansion; zero once M reaches q
        return float(sum(math.comb(k.q, n) * (r2 / k.sigma ** 2) ** n for n in range(M + 1, k.q + 1)))
    if isinstance(k, Gaussian):
        b = r2 / k.sigma ** 2
        return math.exp((M + 1) * math.log(b) - math.lgamma(M + 2)) if b > 0 else 0.0
    q = dot_product_tail_ratio(k, domain, M)
    return q ** (M + 1) / (1.0 - q)


def dot_product_tail_ratio(kernel, domain, M=0):
    """Ratio ``q < 1`` with ``a_n r^(2n) <= q^n`` for every ``n > M``."""
    kernel.check_domain(domain)
    r2 = domain.radius ** 2
    q = kernel.tail_ratio
    if q is None:
        if kernel.rule == "geometric":
            q = kernel.scale * r2
        else:
            raise InvalidParam("exponential dot-product kernels need an explicit tail_ratio")
    if not 0 < q < 1:
        raise InvalidParam(f"tail ratio {q} must lie in (0, 1)")
    log_r2 = math.log(r2)
    if kernel.rule == "geometric":
        ok = math.log(kernel.scale) + log_r2 <= math.log(q) + 1e-15
    else:
        # (b/q)^n / n! is unimodal in n: checking up to its peak suffices
        b = r2 / kernel.sigma ** 2
        peak = max(M + 1, int(math.ceil(b / q)) + 1)
        ok = all(kernel.log_coefficient(n) + n * log_r2 <= n * math.log(q) + 1e-12
                 for n in range(M + 1, peak + 1))
    if not ok:
        raise InvalidParam(f"tail ratio {q} does not dominate a_n r^(2n) beyond degree {M}")
    return q


def gaussian_rate_constant(d):
    return math.log(2.0) / 4.0 * math.factorial(d) ** (1.0 / d)


def dot_product_rate_constant(q, d):
    return math.log(1.0 / q) / 4.0 * math.factorial(d) ** (1.0 / d)


def fast_regime_dimension(alpha, C2, T, d, round_to_layer=True):
    """``ceil((ln T / C2)^(1/alpha))``, rounded up to a full degree layer."""
    if T < 2 or not C2 > 0 or not alpha > 0:
        raise InvalidParam("need T >= 2, C2 > 0, alpha > 0")
    m = max(1, math.ceil((math.log(T) / C2) ** (1.0 / alpha) - 1e-12))
    if not round_to_layer:
        return m
    M = 0
    while layer_dimension(d, M) < m:
        M += 1
    return layer_dimension(d, M)
