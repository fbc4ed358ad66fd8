"""Discounted Vovk-Azoury-Warmuth forecaster in FTRL form.

The state keeps the quadratic representation of the discounted objective

    F_t(w) = gamma^t * lam/2 * |w|^2 + sum_s gamma^(t-s) * 1/2 (y_s - <w, z_s>)^2
           = 1/2 w^T Sigma_t w - theta_t^T w + label_energy_t

and predicts with ``w_t = argmin 1/2 (hint - <z, w>)^2 + gamma * F_{t-1}(w)``.
``gamma = 1`` with a zero hint is the classical (undiscounted) VAW forecaster.
"""
import numpy as np
from scipy import linalg as sla

from .errors import DimensionMismatch, InvalidParam, NotPositiveDefinite
from .linalg import PIVOT_REL_TOL, sherman_morrison_inverse_update, solve_spd

RECERTIFY_EVERY = 1000
RECERTIFY_TOL = 1e-7

MODES = ("direct", "inverse")


def _spd_solve(a, b):
    """Cholesky solve; falls back to an eigenvalue-floored solve when the
    discounted regulariser has decayed below double precision."""
    n = a.shape[0]
    floor = PIVOT_REL_TOL * np.trace(a) / n
    try:
        chol, low = sla.cho_factor(a, lower=True, check_finite=False)
        if np.all(np.diag(chol) ** 2 > floor):
            return sla.cho_solve((chol, low), b, check_finite=False), False
    except np.linalg.LinAlgError:
        pass
    w, u = np.linalg.eigh(a)
    return u @ ((u.T @ b) / np.maximum(w, floor)), True


class DVAW:
    """One discounted VAW forecaster (``A_gamma(lam)``).

    Parameters
    ----------
    m : int
        Feature dimension.
    lam : float
        Ridge weight ``lam > 0`` at time zero.
    gamma : float
        Discount factor in ``(0, 1]``.
    mode : {"direct", "inverse"}
        ``"direct"`` does one SPD solve per round; ``"inverse"`` carries
        ``Sigma^{-1}`` with Sherman-Morrison updates (O(m^2) per round).
    """

    def __init__(self, m, lam=1.0, gamma=1.0, mode="direct"):
        m = int(m)
        if m < 1:
            raise InvalidParam(f"dimension must be >= 1, got {m}")
        if not lam > 0 or not np.isfinite(lam):
            raise InvalidParam(f"lambda must be positive, got {lam}")
        if not 0 < gamma <= 1:
            raise InvalidParam(f"gamma must lie in (0, 1], got {gamma}")
        if mode not in MODES:
            raise InvalidParam(f"mode must be one of {MODES}, got {mode!r}")
        self.m = m
        self.lam = float(lam)
        self.gamma = float(gamma)
        self.mode = mode
        self.Sigma = self.lam * np.eye(m)
        self.theta = np.zeros(m)
        self.label_energy = 0.0
        self.t = 0
        self.Sigma_inv = np.eye(m) / self.lam if mode == "inverse" else None
        self.fallback_solves = 0
        self._pending = None  # (z, (z z^T + gamma Sigma)^{-1}) from the last predict

    def __repr__(self):
        return f"DVAW(m={self.m}, lam={self.lam}, gamma={self.gamma}, mode={self.mode!r}, t={self.t})"

    def _check(self, v):
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        if v.shape[0] != self.m:
            raise DimensionMismatch(f"expected a vector of length {self.m}, got {v.shape[0]}")
        return v

    def predict(self, z, hint=0.0):
        """Return ``(prediction, weights)`` for features ``z`` and hint."""
        z = self._check(z)
        hint = float(hint)
        rhs = hint * z + self.gamma * self.theta
        if self.mode == "direct":
            a = np.outer(z, z) + self.gamma * self.Sigma
            w, fell_back = _spd_solve(a, rhs)
            self.fallback_solves += fell_back
        else:
            next_inv = sherman_morrison_inverse_update(self.Sigma_inv, z, self.gamma)
            self._pending = (z.copy(), next_inv)
            w = next_inv @ rhs
        return float(w @ z), w

    def update(self, z, y):
        """Absorb the revealed label ``y`` for features ``z``."""
        z = self._check(z)
        y = float(y)
        g = self.gamma
        self.Sigma = g * self.Sigma + np.outer(z, z)
        self.theta = g * self.theta + y * z
        self.label_energy = g * self.label_energy + 0.5 * y * y
        self.t += 1
        if self.mode == "inverse":
            pending = self._pending
            if pending is not None and np.array_equal(pending[0], z):
                self.Sigma_inv = pending[1]
            else:
                self.Sigma_inv = sherman_morrison_inverse_update(self.Sigma_inv, z, g)
            self._pending = None
            if self.t % RECERTIFY_EVERY == 0:
                self.recertify()
        return self

    def recertify(self):
        """Rebuild ``Sigma_inv`` from ``Sigma`` if the product drifted from I."""
        if self.mode != "inverse":
            return False
        drift = np.max(np.abs(self.Sigma @ self.Sigma_inv - np.eye(self.m)))
        if drift > RECERTIFY_TOL:
            try:
                self.Sigma_inv = solve_spd(self.Sigma, np.eye(self.m))
            except NotPositiveDefinite:
                w, u = np.linalg.eigh(self.Sigma)
                floor = PIVOT_REL_TOL * np.trace(self.Sigma) / self.m
                self.Sigma_inv = (u / np.maximum(w, floor)) @ u.T
            self.Sigma_inv = 0.5 * (self.Sigma_inv + self.Sigma_inv.T)
            return True
        return False

    def objective(self, w):
        """Discounted FTRL objective ``F_t(w)`` for the data seen so far."""
        w = self._check(w)
        return float(0.5 * w @ self.Sigma @ w - self.theta @ w + self.label_energy)
