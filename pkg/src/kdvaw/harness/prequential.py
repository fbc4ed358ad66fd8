"""Predict-then-reveal evaluation loop and regret traces."""
import json
from dataclasses import dataclass, field

import numpy as np

from ..dvaw import DVAW
from ..ensemble import DyadicAggregator
from ..errors import ConfigError, DimensionMismatch, ProtocolError

TRACE_COLUMNS = ("t", "y", "hint", "yhat", "inst_loss", "comp_loss", "cum_regret")
HINT_POLICIES = ("previous_label", "zero", "previous_prediction")


class PrequentialStream:
    """Hands out ``x_t`` and discloses ``y_t`` only once a prediction is committed."""

    def __init__(self, xs, ys):
        self.xs = np.asarray(xs, dtype=np.float64)
        self.ys = np.asarray(ys, dtype=np.float64)
        if len(self.xs) != len(self.ys):
            raise DimensionMismatch("xs and ys differ in length")
        self.t = 0
        self._open = False

    def __len__(self):
        return len(self.ys)

    def has_next(self):
        return self.t < len(self.ys)

    def next_point(self):
        if self._open:
            raise ProtocolError("previous round has no committed prediction")
        if not self.has_next():
            raise ProtocolError("stream exhausted")
        self._open = True
        return self.xs[self.t]

    def commit(self, prediction):
        """Record the prediction for the open round and return its label."""
        if not self._open:
            raise ProtocolError("no open round")
        if not np.isfinite(prediction):
            raise ProtocolError(f"non-finite prediction at round {self.t + 1}")
        y = float(self.ys[self.t])
        self._open = False
        self.t += 1
        return y


class HintPolicy:
    def __init__(self, name="previous_label"):
        if name not in HINT_POLICIES:
            raise ConfigError(f"unknown hint policy {name!r}", "forecaster.hint_policy")
        self.name = name
        self._last = 0.0

    def hint(self):
        return 0.0 if self.name == "zero" else self._last

    def observe(self, y, yhat):
        if self.name == "previous_label":
            self._last = float(y)
        elif self.name == "previous_prediction":
            self._last = float(yhat)


class _Learner:
    """Uniform predict(x, hint) / update(y) view over the three forecasters."""

    def __init__(self, forecaster, feature_map=None):
        self.f = forecaster
        self.fmap = feature_map
        self.z = None
        dim = getattr(forecaster, "m", None)
        if not isinstance(forecaster, DyadicAggregator) and feature_map is not None and dim is not None:
            if feature_map.dim != dim:
                raise DimensionMismatch(
                    f"forecaster dimension {dim} differs from feature map dimension {feature_map.dim}")

    def features(self, x):
        if self.fmap is None or isinstance(self.f, DyadicAggregator):
            return np.asarray(x, dtype=np.float64).reshape(-1)
        return self.fmap.transform(x)[0]

    def predict(self, x, hint):
        if isinstance(self.f, DyadicAggregator):
            self.z = x
            return float(self.f.predict(x, hint))
        self.z = self.features(x)
        if isinstance(self.f, DVAW):
            return self.f.predict(self.z, hint)[0]
        return float(self.f.predict(self.z, hint))

    def update(self, y):
        if isinstance(self.f, DVAW):
            self.f.update(self.z, y)
        else:
            self.f.update(y)


@dataclass
class RegretTrace:
    t: np.ndarray
    y: np.ndarray
    hint: np.ndarray
    yhat: np.ndarray
    inst_loss: np.ndarray
    comp_loss: np.ndarray
    cum_regret: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def T(self):
        return len(self.t)

    @property
    def final_regret(self):
        return float(self.cum_regret[-1]) if self.T else 0.0

    @property
    def delta_sq(self):
        return (self.y - self.hint) ** 2

    @property
    def delta_sq_total(self):
        return float(self.delta_sq.sum())

    @property
    def delta_sq_max(self):
        return float(self.delta_sq.max()) if self.T else 0.0

    def summary(self, **extra):
        out = {
            "final_regret": self.final_regret,
            "P_T": self.meta.get("P_T"),
            "R_f": self.meta.get("R_f"),
            "delta_sq_total": self.delta_sq_total,
            "delta_sq_max": self.delta_sq_max,
            "m": self.meta.get("m"),
            "N": self.meta.get("N"),
            "T": self.T,
            "seed": self.meta.get("seed"),
            "config_hash": self.meta.get("config_hash"),
        }
        out.update(extra)
        return out

    def to_csv(self, path):
        cols = [self.y, self.hint, self.yhat, self.inst_loss, self.comp_loss, self.cum_regret]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for i in range(self.T):
                fh.write(str(int(self.t[i])) + "," + ",".join("%.17g" % c[i] for c in cols) + "\n")

    def write_summary(self, path, **extra):
        with open(path, "w") as fh:
            json.dump(self.summary(**extra), fh, indent=2, sort_keys=True)
            fh.write("\n")


def run_prequential(forecaster, env, feature_map=None, hint_policy="previous_label",
                    comparator_values=None, observer=None):
    """Run the strict per-round protocol and account dynamic regret.

    ``comparator_values`` overrides ``env.fvals`` as the comparator's
    predictions (for example ``<u_t, z_t>`` in feature coordinates).
    ``observer(t, z, forecaster)`` is called after every update.
    """
    learner = _Learner(forecaster, feature_map)
    policy = hint_policy if isinstance(hint_policy, HintPolicy) else HintPolicy(hint_policy)
    stream = PrequentialStream(env.xs, env.ys)
    fvals = env.fvals if comparator_values is None else np.asarray(comparator_values, dtype=np.float64)
    T = len(stream)
    ys, hints, yhats = np.empty(T), np.empty(T), np.empty(T)
    for i in range(T):
        x = stream.next_point()
        h = policy.hint()
        yhat = learner.predict(x, h)
        y = stream.commit(yhat)
        learner.update(y)
        policy.observe(y, yhat)
        ys[i], hints[i], yhats[i] = y, h, yhat
        if observer is not None:
            observer(i, learner.z, forecaster)
    inst = 0.5 * (ys - yhats) ** 2
    comp = 0.5 * (ys - fvals[:T]) ** 2
    cum = np.cumsum(inst - comp)
    comparator = getattr(env, "comparator", None)
    meta = {}
    if comparator is not None:
        meta = {"P_T": comparator.path_length, "R_f": comparator.R_f}
    return RegretTrace(np.arange(1, T + 1), ys, hints, yhats, inst, comp, cum, meta)
