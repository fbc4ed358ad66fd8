"""Nonstationary regression streams with an exactly known comparator path."""
import csv
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, RepresentationError
from ..features import ExplicitFeatureMap
from ..kernels import Domain, kappa
from ..sections import SectionBasis

REPRESENTATIONS = ("coefficients", "kernel", "zero")


@dataclass
class ComparatorConfig:
    representation: str = "coefficients"
    dim: int = 4  # basis size for coefficients, anchor count for kernel
    segments: int = 1
    step: float = 0.0
    initial_norm: float = 1.0


@dataclass
class EnvironmentConfig:
    T: int
    domain: Domain
    kernel: object
    comparator: ComparatorConfig = field(default_factory=ComparatorConfig)
    noise: str = "uniform"
    noise_level: float = 0.1
    Y: float = None
    seed: int = 0

    def validate(self):
        if self.T < 2:
            raise ConfigError("T must be >= 2", "environment.T")
        c = self.comparator
        if c.representation not in REPRESENTATIONS:
            raise ConfigError(f"unknown representation {c.representation!r}",
                              "environment.comparator.representation")
        if not 1 <= c.segments <= self.T:
            raise ConfigError("segments must lie in [1, T]", "environment.comparator.segments")
        if c.step < 0 or c.initial_norm < 0:
            raise ConfigError("step and initial_norm must be nonnegative", "environment.comparator")
        if c.dim < 1:
            raise ConfigError("dim must be >= 1", "environment.comparator.dim")
        if self.noise not in ("none", "uniform"):
            raise ConfigError(f"unknown noise {self.noise!r}", "environment.noise")
        if self.noise_level < 0:
            raise ConfigError("noise level must be nonnegative", "environment.noise_level")


@dataclass
class ComparatorSequence:
    """Piecewise-constant ``f_t``: one coefficient vector per segment.

    ``coefficients`` rows are coordinates in ``basis`` (orthonormal, so the
    RKHS norm is the Euclidean norm) or weights on kernel sections at
    ``anchors`` (norm ``sqrt(a^T G a)``).
    """

    representation: str
    starts: np.ndarray  # 0-based first round of each segment
    coefficients: np.ndarray
    T: int
    basis: object = None
    anchors: np.ndarray = None
    kernel: object = None
    gram: np.ndarray = None

    def segment_index(self, t):
        """Segment of the 0-based round ``t``."""
        return int(np.searchsorted(self.starts, t, side="right") - 1)

    def segment_ids(self):
        return np.searchsorted(self.starts, np.arange(self.T), side="right") - 1

    def hnorm(self, c):
        if self.representation == "kernel":
            return float(np.sqrt(max(c @ self.gram @ c, 0.0)))
        return float(np.linalg.norm(c))

    @property
    def norms(self):
        return np.array([self.hnorm(c) for c in self.coefficients])

    @property
    def R_f(self):
        return float(self.norms.max()) if len(self.coefficients) else 0.0

    @property
    def path_length(self):
        c = self.coefficients
        return float(sum(self.hnorm(c[k + 1] - c[k]) for k in range(len(c) - 1)))

    def segment_values(self, X):
        """``f_k(x)`` for every segment k (rows) and point x (columns)."""
        X = np.atleast_2d(X)
        if self.representation == "zero":
            return np.zeros((len(self.coefficients), len(X)))
        if self.representation == "coefficients":
            return self.coefficients @ self.basis.transform(X).T
        return self.coefficients @ self.kernel.matrix(self.anchors, X)

    def values(self, xs):
        """``f_t(x_t)`` along a stream of T points."""
        seg = self.segment_ids()
        vals = self.segment_values(xs)
        return vals[seg, np.arange(self.T)]

    def projected_coordinates(self, fmap):
        """Coordinates of ``Pi_V f_k`` in the orthonormal basis of ``fmap``, per segment."""
        if self.representation == "zero":
            return np.zeros((len(self.coefficients), fmap.dim))
        if isinstance(fmap, SectionBasis):
            # <f, g_j> = sum_i coeffs[i, j] f(z_i) by the reproducing property
            return self.segment_values(fmap.points) @ fmap.coeffs
        if isinstance(fmap, ExplicitFeatureMap):
            if self.representation == "kernel":
                return self.coefficients @ fmap.transform(self.anchors)
            b = self.basis
            if b.kernel != fmap.kernel or b.d != fmap.d:
                raise RepresentationError("comparator basis differs from the forecaster features")
            out = np.zeros((len(self.coefficients), fmap.dim))
            k = min(fmap.dim, b.dim)
            out[:, :k] = self.coefficients[:, :k]
            return out
        raise RepresentationError(f"cannot project onto {type(fmap).__name__}")

    def coordinate_path(self, fmap):
        """``u_{1:T}``: projected coordinates for every round (T x dim)."""
        return self.projected_coordinates(fmap)[self.segment_ids()]


@dataclass
class Environment:
    xs: np.ndarray
    ys: np.ndarray
    fvals: np.ndarray
    comparator: ComparatorSequence
    Y: float
    kappa: float
    config: EnvironmentConfig = None

    @property
    def T(self):
        return len(self.ys)


def _unit(rng, n):
    v = rng.standard_normal(n)
    nrm = np.linalg.norm(v)
    while nrm == 0:
        v = rng.standard_normal(n)
        nrm = np.linalg.norm(v)
    return v / nrm


def build_comparator(cfg, rng):
    c = cfg.comparator
    K = c.segments
    starts = np.array([(k * cfg.T) // K for k in range(K)], dtype=np.int64)
    if c.representation == "zero":
        return ComparatorSequence("zero", starts[:1], np.zeros((1, 1)), cfg.T)
    if c.representation == "coefficients":
        basis = ExplicitFeatureMap(cfg.kernel, cfg.domain.d, c.dim, cfg.domain.radius)
        coef = [c.initial_norm * _unit(rng, c.dim)]
        for _ in range(K - 1):
            coef.append(coef[-1] + c.step * _unit(rng, c.dim))
        return ComparatorSequence("coefficients", starts, np.array(coef), cfg.T, basis=basis)
    anchors = cfg.domain.sample(c.dim, rng)
    G = cfg.kernel.gram(anchors)

    def scaled(size):
        v = rng.standard_normal(c.dim)
        nrm = np.sqrt(max(v @ G @ v, 0.0))
        return v * (size / nrm) if nrm > 0 else np.zeros(c.dim)

    coef = [scaled(c.initial_norm)]
    for _ in range(K - 1):
        coef.append(coef[-1] + scaled(c.step))
    return ComparatorSequence("kernel", starts, np.array(coef), cfg.T,
                              anchors=anchors, kernel=cfg.kernel, gram=G)


def generate_environment(cfg):
    """Sample ``(x_t, y_t)`` with ``y_t = clip(f_t(x_t) + noise, -Y, Y)``."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    comparator = build_comparator(cfg, rng)
    xs = cfg.domain.sample(cfg.T, rng)
    fvals = comparator.values(xs)
    kap = kappa(cfg.kernel, cfg.domain)
    Y = cfg.Y if cfg.Y is not None else kap * comparator.R_f + 0.5
    if cfg.noise == "uniform":
        noise = rng.uniform(-cfg.noise_level, cfg.noise_level, size=cfg.T)
    else:
        noise = np.zeros(cfg.T)
    ys = np.clip(fvals + noise, -Y, Y)
    return Environment(xs, ys, fvals, comparator, float(Y), kap, cfg)


def load_csv_stream(path, Y=None):
    """Read a ``features..., label`` CSV into an environment with the zero comparator."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        data = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    except ValueError:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    xs, ys = data[:, :-1], data[:, -1]
    T = len(ys)
    Yb = float(np.max(np.abs(ys))) if Y is None else float(Y)
    comp = ComparatorSequence("zero", np.array([0]), np.zeros((1, 1)), T)
    return Environment(xs, np.clip(ys, -Yb, Yb), np.zeros(T), comp, Yb, float("nan"))
