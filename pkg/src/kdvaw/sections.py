"""Subspaces spanned by kernel sections ``k(., z)``.

Point sets are chosen greedily (farthest-point traversal in the kernel
pseudometric) from a seeded candidate pool; the span of their sections gets
an orthonormal basis from the eigendecomposition of the Gram matrix.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBasis, InvalidParam, NegativeDiscriminant
from .kernels import EXT as _EXT, pseudometric_matrix
from .linalg import sym_eig

POWER_CLAMP = 1e-10
MEDOID_CHUNK = 2048
REFINE_STEPS = 2


@dataclass(frozen=True)
class NetReport:
    covering_radius: float
    candidate_pool_size: int
    pool: np.ndarray = None
    selected: tuple = ()


def _medoid(pool, spec):
    n = len(pool)
    totals = np.empty(n)
    for start in range(0, n, MEDOID_CHUNK):
        block = pseudometric_matrix(spec, pool[start:start + MEDOID_CHUNK], pool)
        totals[start:start + MEDOID_CHUNK] = block.sum(1)
    return int(np.argmin(totals))


def farthest_point_net(domain, spec, m, pool_size=None, seed=0, pool=None):
    """Greedy farthest-point net of ``m`` points from a candidate pool.

    The first point is the pool medoid (smallest total pseudometric distance
    to the pool); every next point maximises the distance to those already
    chosen, ties resolved towards the lower pool index.  Returns the points
    and a ``NetReport`` whose ``covering_radius`` is measured on the pool.
    """
    m = int(m)
    if m < 1:
        raise InvalidParam("m must be >= 1")
    if pool is None:
        pool_size = 50 * m if pool_size is None else int(pool_size)
        pool = domain.sample(pool_size, np.random.default_rng(seed))
    pool = np.asarray(pool, dtype=np.float64).reshape(len(pool), -1)
    if len(pool) < m:
        raise InvalidParam(f"pool of {len(pool)} points cannot supply {m} net points")
    first = _medoid(pool, spec)
    chosen = [first]
    mind = pseudometric_matrix(spec, pool, pool[first:first + 1])[:, 0]
    mind[first] = 0.0
    while len(chosen) < m:
        nxt = int(np.argmax(mind))
        chosen.append(nxt)
        mind = np.minimum(mind, pseudometric_matrix(spec, pool, pool[nxt:nxt + 1])[:, 0])
        mind[nxt] = 0.0
    report = NetReport(float(mind.max()), len(pool), pool, tuple(chosen))
    return pool[chosen], report


@dataclass(frozen=True)
class SectionBasis:
    """Orthonormal basis ``g_j = sum_i coeffs[i, j] k(., z_i)`` of span{k(., z)}."""

    kernel: object
    points: np.ndarray
    gram: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    coeffs: np.ndarray
    rank_tol: float
    coeffs_ext: np.ndarray = None  # refined against the extended-precision Gram

    @property
    def dim(self):
        return self.rank

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64).reshape(-1, self.points.shape[1])
        return self.kernel.matrix(X, self.points) @ self.coeffs

    def __call__(self, x):
        return self.transform(x)[0]

    def inner_products(self):
        """``coeffs^T G coeffs``: the Gram matrix of the g_j in the RKHS.

        Evaluated in extended precision: in float64 the product alone carries
        rounding of order eps * |G| / lambda_min.
        """
        return _ext_inner(self.gram, self.coeffs).astype(np.float64)


def _ext_inner(G, C):
    Ce = C.astype(_EXT)
    return Ce.T @ (G.astype(_EXT) @ Ce)


def _reorthonormalize(G, C, steps=REFINE_STEPS):
    """Polish ``C`` so that ``C^T G C = I`` to near working precision.

    The eigensolver's backward error leaves ``C^T G C - I`` of order
    eps * |G| / lambda_min; a truncated series for ``M^(-1/2)`` evaluated in
    extended precision removes it. Returns extended-precision coefficients.
    """
    C = C.astype(_EXT)
    eye = np.eye(C.shape[1], dtype=_EXT)
    for _ in range(steps):
        E = _ext_inner(G, C) - eye
        C = C @ (eye - E / 2 + 3 * (E @ E) / 8)
    return C


def build_section_basis(Z, spec, rank_tol_rel=1e-10, method="lapack"):
    Z = np.asarray(Z, dtype=np.float64)
    Z = Z.reshape(len(Z), -1)
    if len(Z) < 1:
        raise InvalidParam("need at least one point")
    G = spec.gram(Z)
    eig = sym_eig(G, method=method)
    lam = eig.eigenvalues
    tol = rank_tol_rel * max(lam[0], 0.0)
    keep = lam > tol
    if lam[0] <= 0 or not keep.any():
        raise EmptyBasis("Gram matrix has no eigenvalue above the rank tolerance")
    C0 = eig.eigenvectors[:, keep] / np.sqrt(lam[keep])
    coeffs = _reorthonormalize(G, C0).astype(np.float64)
    Gx = spec.matrix_ext(Z, Z)
    coeffs_ext = _reorthonormalize(0.5 * (Gx + Gx.T), C0, REFINE_STEPS + 1)
    return SectionBasis(spec, Z, G, lam, eig.eigenvectors, int(keep.sum()), coeffs, tol, coeffs_ext)


def section_feature_eval(basis, x):
    return basis(x)


def _power_from(kxx, feats):
    rad = kxx - (feats * feats).sum(1)
    if np.any(rad < -POWER_CLAMP * np.maximum(1.0, kxx)):
        raise NegativeDiscriminant(f"power function radicand {rad.min():.3e} < 0")
    return np.sqrt(np.maximum(rad, 0.0))


def power_function(basis, x):
    """``|(I - P_V) k(., x)|_H = sqrt(k(x, x) - |Psi(x)|^2)``."""
    return float(power_function_many(basis, np.atleast_2d(x))[0])


def power_function_many(basis, X):
    # Evaluated in extended precision: near the nodes the radicand is a
    # difference of O(1) numbers, and float64 rounding there shows up as
    # sqrt(eps) ~ 1e-8 in the result.
    X = np.asarray(X, dtype=np.float64).reshape(-1, basis.points.shape[1])
    C = basis.coeffs_ext if basis.coeffs_ext is not None else basis.coeffs.astype(_EXT)
    feats = basis.kernel.matrix_ext(X, basis.points) @ C
    return _power_from(basis.kernel.diag_ext(X), feats).astype(np.float64)


def subspace_error_estimate(basis, domain=None, probe_count=1000, seed=0, probes=None):
    """Largest power function over a probe set.

    This is a Monte-Carlo lower bound on the supremum over the domain.  Pass
    ``probes`` (for example the candidate pool of the net) to evaluate on a
    fixed set instead of sampling ``probe_count`` points from ``domain``.
    """
    if probes is None:
        if probe_count < 1:
            raise InvalidParam("probe_count must be >= 1")
        probes = domain.sample(probe_count, np.random.default_rng(seed))
    return float(power_function_many(basis, probes).max())


def save_points_csv(path, Z):
    Z = np.asarray(Z, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(Z.shape[1])])
        for row in Z:
            w.writerow([f"{v:.17g}" for v in row])


def load_points_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
