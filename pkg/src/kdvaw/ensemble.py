"""VAW aggregation of DVAW experts.

``VEDVAW`` runs one DVAW expert per discount of a geometric grid plus the
hint expert, and combines their predictions with an undiscounted VAW.
``DyadicAggregator`` stacks one VE-DVAW per feature dimension 2^j and
combines those with a top-level VAW.
"""
import math
from dataclasses import dataclass

import numpy as np

from .dvaw import DVAW
from .errors import DimensionMismatch, HorizonExceeded, InvalidParam, ProtocolError


@dataclass(frozen=True)
class DiscountGrid:
    b: float
    eta_min: float
    eta_max: float
    etas: tuple
    gammas: tuple
    includes_hint_expert: bool = True

    @property
    def N(self):
        """Number of meta-coordinates (experts plus hint slot)."""
        return len(self.gammas) + int(self.includes_hint_expert)


def build_grid(m, T, b=2.0, include_hint_expert=True):
    """Geometric eta grid ``eta_i = min(2m * b^i, mT)`` stopped at saturation."""
    if m < 1 or T < 2 or not b > 1:
        raise InvalidParam(f"need m >= 1, T >= 2, b > 1 (got m={m}, T={T}, b={b})")
    eta_min = 2.0 * m
    eta_max = float(m) * T
    etas = []
    i = 0
    while True:
        eta = min(eta_min * b ** i, eta_max)
        etas.append(eta)
        if eta >= eta_max:
            break
        i += 1
    gammas = tuple(e / (1.0 + e) for e in etas)
    return DiscountGrid(float(b), eta_min, eta_max, tuple(etas), gammas, include_hint_expert)


class VEDVAW:
    """VAW-ensembled DVAW over a discount grid.

    Call ``predict(z, hint)`` and then ``update(y)``; the label is never seen
    before the prediction for the round has been returned.
    """

    def __init__(self, m, grid, lam=1.0, lam_meta=1.0, mode="direct", horizon=None):
        self.m = int(m)
        self.grid = grid
        self.lam = float(lam)
        self.experts = [DVAW(self.m, lam, g, mode) for g in grid.gammas]
        self.N = grid.N
        if self.N < 1:
            raise InvalidParam("ensemble needs at least one expert")
        self.meta = DVAW(self.N, lam_meta, 1.0, mode)
        self.horizon = horizon
        self.t = 0
        self.expert_losses = np.zeros(self.N)
        self.loss = 0.0
        self.meta_energy = 0.0  # W = sum_t |meta-features|^2
        self._round = None

    @classmethod
    def for_horizon(cls, m, T, b=2.0, lam=1.0, lam_meta=1.0, mode="direct"):
        return cls(m, build_grid(m, T, b), lam, lam_meta, mode, horizon=T)

    def meta_features(self, z, hint):
        preds = [e.predict(z, hint)[0] for e in self.experts]
        if self.grid.includes_hint_expert:
            preds.insert(0, float(hint))
        return np.asarray(preds)

    def predict(self, z, hint=0.0):
        z = np.asarray(z, dtype=np.float64).reshape(-1)
        if z.shape[0] != self.m:
            raise DimensionMismatch(f"expected {self.m} features, got {z.shape[0]}")
        if self.horizon is not None and self.t >= self.horizon:
            raise HorizonExceeded(f"grid was built for T={self.horizon}")
        zeta = self.meta_features(z, hint)
        yhat, _ = self.meta.predict(zeta, 0.0)
        self._round = (z, zeta, yhat)
        return yhat

    def update(self, y):
        if self._round is None:
            raise ProtocolError("update() called before predict()")
        z, zeta, yhat = self._round
        y = float(y)
        for e in self.experts:
            e.update(z, y)
        self.meta.update(zeta, y)
        self.expert_losses += 0.5 * (y - zeta) ** 2
        self.loss += 0.5 * (y - yhat) ** 2
        self.meta_energy += float(zeta @ zeta)
        self.t += 1
        self._round = None
        return self

    def round(self, z, hint, y_after):
        yhat = self.predict(z, hint)
        self.update(y_after)
        return yhat


def meta_regret_bound(N, Y, W, lam_meta=1.0):
    """VAW regret against any single meta-coordinate:
    ``lam/2 + (N Y^2 / 2) ln(1 + W / (lam N))``."""
    return 0.5 * lam_meta + 0.5 * N * Y * Y * math.log1p(W / (lam_meta * N))


def dyadic_dims(T, max_dim=None):
    """``{2^j : 0 <= j <= floor(log2 T)}``, optionally capped at ``max_dim``."""
    if T < 1:
        raise InvalidParam("T must be >= 1")
    top = int(T).bit_length() - 1
    dims = [2 ** j for j in range(top + 1)]
    if max_dim is not None:
        dims = [d for d in dims if d <= max_dim]
    return dims


class DyadicAggregator:
    """Top-level VAW over VE-DVAW children of dimensions 2^j.

    ``feature_maps`` is a list aligned with ``dims``; each maps a raw input
    point to the child's feature vector (its length may fall below the
    nominal dimension when a section basis is rank deficient).
    """

    def __init__(self, T, feature_maps, dims, b=2.0, lam=1.0, lam_meta=1.0, mode="direct"):
        if len(feature_maps) != len(dims):
            raise InvalidParam("one feature map per dimension is required")
        self.T = int(T)
        self.dims = list(dims)
        self.feature_maps = list(feature_maps)
        self.children = [VEDVAW.for_horizon(fm.dim, T, b, lam, lam_meta, mode) for fm in feature_maps]
        self.K = len(self.children)
        self.top = DVAW(self.K, lam_meta, 1.0, mode)
        self.t = 0
        self.child_losses = np.zeros(self.K)
        self.loss = 0.0
        self.meta_energy = 0.0
        self._round = None

    def predict(self, x, hint=0.0):
        if self.t >= self.T:
            raise HorizonExceeded(f"aggregator was built for T={self.T}")
        xi = np.array([c.predict(fm(x), hint) for c, fm in zip(self.children, self.feature_maps)])
        yhat, _ = self.top.predict(xi, 0.0)
        self._round = (xi, yhat)
        return yhat

    def update(self, y):
        if self._round is None:
            raise ProtocolError("update() called before predict()")
        xi, yhat = self._round
        y = float(y)
        for c in self.children:
            c.update(y)
        self.top.update(xi, y)
        self.child_losses += 0.5 * (y - xi) ** 2
        self.loss += 0.5 * (y - yhat) ** 2
        self.meta_energy += float(xi @ xi)
        self.t += 1
        self._round = None
        return self

    def round(self, x, hint, y_after):
        yhat = self.predict(x, hint)
        self.update(y_after)
        return yhat
