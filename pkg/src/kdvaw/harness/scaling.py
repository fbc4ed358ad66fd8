"""Log-log rate fits of regret against horizon and path length."""
import copy
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..errors import InvalidParam
from .runner import execute


@dataclass
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    n: int


def fit_exponent(x, y):
    """OLS slope of log y on log x, with its standard error."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParam("need >= 2 points with positive coordinates")
    if len(x) == 2:
        s = (np.log(y[1]) - np.log(y[0])) / (np.log(x[1]) - np.log(x[0]))
        return ExponentFit(float(s), float("nan"), float(np.log(y[0]) - s * np.log(x[0])), 2)
    r = stats.linregress(np.log(x), np.log(y))
    return ExponentFit(float(r.slope), float(r.stderr), float(r.intercept), len(x))


@dataclass
class ScalingReport:
    rows: list = field(default_factory=list)  # (T, P_T, mean regret, seeds)
    T_fit: ExponentFit = None
    P_fit: ExponentFit = None

    def table(self):
        lines = ["T,P_T,mean_regret,seeds"]
        for T, P, reg, n in self.rows:
            lines.append(f"{T},{P:.17g},{reg:.17g},{n}")
        for name, f in (("T", self.T_fit), ("P", self.P_fit)):
            if f is not None:
                lines.append(f"# exponent vs {name}: {f.slope:.4f} +/- {f.stderr:.4f} ({f.n} points)")
        return "\n".join(lines)


def summarize(summaries):
    """Group run summaries by (T, P_T nominal) and fit exponents where a
    coordinate varies over >= 3 values with the other fixed."""
    groups = {}
    for s in summaries:
        key = (int(s["T"]), round(float(s.get("P_nominal", s["P_T"])), 12))
        groups.setdefault(key, []).append(float(s["final_regret"]))
    rep = ScalingReport()
    for (T, P), regs in sorted(groups.items()):
        rep.rows.append((T, P, float(np.mean(regs)), len(regs)))
    Ts = sorted({r[0] for r in rep.rows})
    Ps = sorted({r[1] for r in rep.rows})
    if len(Ts) >= 3 and len(Ps) == 1:
        rep.T_fit = fit_exponent([r[0] for r in rep.rows], [r[2] for r in rep.rows])
    if len(Ps) >= 3 and len(Ts) == 1 and Ps[0] > 0:
        rep.P_fit = fit_exponent([r[1] for r in rep.rows], [r[2] for r in rep.rows])
    return rep


def regret_scaling_report(base, T_list=None, P_list=None, seeds=(0,), jump_size=None, on_run=None):
    """Run ``base`` over horizons and/or path lengths and fit exponents.

    Exactly one of ``T_list`` / ``P_list`` may hold several values; the
    other axis stays at the base config's value.  With ``jump_size`` the
    path length is realised by the number of equal jumps.
    """
    T_list = T_list or [base["environment"]["T"]]
    P_list = P_list if P_list is not None else [None]
    summaries = []
    for T in T_list:
        for P in P_list:
            for seed in seeds:
                cfg = copy.deepcopy(base)
                env = cfg["environment"]
                env["T"], env["seed"] = int(T), int(seed)
                comp = env.setdefault("comparator", {})
                if P is not None:
                    comp["path_length"] = float(P)
                    if jump_size is not None:
                        comp["jump_size"] = float(jump_size)
                res = execute(cfg)
                if on_run is not None:
                    on_run(res)
                s = res.summary()
                s["P_nominal"] = float(P) if P is not None else s["P_T"]
                summaries.append(s)
    return summarize(summaries)
