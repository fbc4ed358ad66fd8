"""Exact regret bounds, assembled term by term from a finished run."""
import math
from dataclasses import dataclass, field

import numpy as np

from ..dvaw import DVAW
from ..ensemble import meta_regret_bound
from ..errors import ExtendedSenseViolation, InvalidParam, RepresentationError
from .prequential import run_prequential

REL_TOL = 1e-6


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    terms: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.lhs <= self.rhs + REL_TOL * (1.0 + abs(self.rhs))

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


class FTRLHistory:
    """Observer collecting ``[F_t(u_{t+1}) - F_t(u_t)]_+`` and ``sum gamma^(T-t) |z_t|^2``.

    F_t is read off the forecaster's running (Sigma, theta, label_energy),
    so no per-round matrices are stored.
    """

    def __init__(self, u_path):
        self.u = np.asarray(u_path, dtype=np.float64)
        self.increments = []
        self.z_energy = 0.0

    def __call__(self, t, z, model):
        self.z_energy = model.gamma * self.z_energy + float(z @ z)
        if t + 1 < len(self.u):
            u0, u1 = self.u[t], self.u[t + 1]
            if not np.array_equal(u0, u1):
                self.increments.append(max(model.objective(u1) - model.objective(u0), 0.0))

    @property
    def positive_part_sum(self):
        return float(sum(self.increments))


def path_length(u_path):
    u = np.asarray(u_path, dtype=np.float64)
    return float(np.linalg.norm(np.diff(u, axis=0), axis=1).sum()) if len(u) > 1 else 0.0


def dvaw_bound(trace, history, u_path, lam, gamma, m):
    """Discounted-VAW dynamic regret bound for comparator ``u_{1:T}``."""
    u = np.asarray(u_path, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] != m or len(u) != trace.T:
        raise RepresentationError(f"comparator must be a {trace.T} x {m} coordinate path")
    terms = {
        "init": gamma * lam / 2.0 * float(u[0] @ u[0]),
        "logdet": m / 2.0 * trace.delta_sq_max * math.log1p(history.z_energy / (lam * m)),
        "movement": gamma * history.positive_part_sum,
        "discount": m / 2.0 * -math.log(gamma) * trace.delta_sq_total,
    }
    return BoundCheck(trace.final_regret, sum(terms.values()), terms)


def path_length_bound(trace, a, Y, R, m, gamma, lam, P_T):
    """Simplified bound with ``eta = gamma / (1 - gamma)``."""
    if not 0 < gamma <= 1:
        raise InvalidParam("gamma must lie in (0, 1]")
    T = trace.T
    if gamma == 1.0:
        if P_T > 0:
            raise ExtendedSenseViolation("gamma = 1 with a moving comparator makes the bound infinite")
        eta_terms = 0.0
    else:
        eta = gamma / (1.0 - gamma)
        eta_terms = eta * a * (a * R + Y) * P_T + m / (2.0 * eta) * trace.delta_sq_total
    terms = {
        "eta": eta_terms,
        "ridge_path": lam * R * P_T,
        "logdet": m / 2.0 * trace.delta_sq_max * math.log1p(a * a * T / (lam * m)),
        "init": lam / 2.0 * R * R,
    }
    return BoundCheck(trace.final_regret, sum(terms.values()), terms)


def ensemble_bound(trace, a, Y, R, m, lam, lam_meta, N, b, P_T, meta_energy):
    """Explicit VE-DVAW bound with the run-measured meta-feature energy."""
    T = trace.T
    terms = {
        "meta": meta_regret_bound(N, Y, meta_energy, lam_meta),
        "tuning": (1.0 + b) * math.sqrt(m / 2.0 * a * (a * R + Y) * P_T * trace.delta_sq_total),
        "ridge_path": lam * R * P_T,
        "init": lam / 2.0 * R * R,
        "logdet": m / 2.0 * trace.delta_sq_max * math.log1p(a * a * T / (lam * m)),
    }
    return BoundCheck(trace.final_regret, sum(terms.values()), terms)


@dataclass
class MetaCheck:
    excess: np.ndarray  # ensemble loss minus each meta-coordinate's loss
    bound: float

    @property
    def holds(self):
        return bool(np.all(self.excess <= self.bound + REL_TOL * (1.0 + abs(self.bound))))


def check_meta_regret(ensemble, Y, lam_meta=1.0):
    """Aggregator loss against every meta-coordinate (experts and hint)."""
    losses = getattr(ensemble, "expert_losses", None)
    if losses is None:
        losses = ensemble.child_losses
    N = len(losses)
    return MetaCheck(ensemble.loss - losses, meta_regret_bound(N, Y, ensemble.meta_energy, lam_meta))


def approximation_loss_bound(env, fmap, E):
    """Extra comparator loss from projecting onto the forecaster subspace.

    Returns (measured sum of l(Pi f) - l(f), T (R_f (Y + kappa R_f) E + R_f^2 E^2 / 2)).
    """
    comp = env.comparator
    u = comp.coordinate_path(fmap)
    Z = fmap.transform(env.xs)
    proj = (u * Z).sum(1)
    lhs = float(np.sum(0.5 * (env.ys - proj) ** 2 - 0.5 * (env.ys - env.fvals) ** 2))
    R = comp.R_f
    rhs = env.T * (R * (env.Y + env.kappa * R) * E + 0.5 * R * R * E * E)
    return BoundCheck(lhs, rhs, {"E": E})


@dataclass
class CertifiedRun:
    trace: object
    dvaw: BoundCheck
    simplified: BoundCheck = None


def certify_dvaw(zs, ys, u_path, lam, gamma, hint_policy="previous_label", mode="direct",
                 a=None, Y=None):
    """Run DVAW on a finite-dimensional stream and check both bounds."""
    from .environment import Environment

    zs = np.asarray(zs, dtype=np.float64)
    u = np.asarray(u_path, dtype=np.float64)
    m = zs.shape[1]
    model = DVAW(m, lam, gamma, mode)
    hist = FTRLHistory(u)
    env = Environment(zs, np.asarray(ys, dtype=np.float64), (u * zs).sum(1), None, Y, a)
    trace = run_prequential(model, env, None, hint_policy, observer=hist)
    thm = dvaw_bound(trace, hist, u, lam, gamma, m)
    simp = None
    if a is not None and Y is not None:
        R = float(np.linalg.norm(u, axis=1).max())
        simp = path_length_bound(trace, a, Y, R, m, gamma, lam, path_length(u))
    return CertifiedRun(trace, thm, simp)
