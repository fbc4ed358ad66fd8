"""Run-config parsing: JSON document -> kernel, environment, scheme, forecaster."""
import copy
import hashlib
import json
from dataclasses import dataclass, field

from ..errors import ConfigError, KDVAWError
from ..kernels import DotProductAnalytic, Domain, Gaussian, Matern, Polynomial
from .environment import ComparatorConfig, EnvironmentConfig

SCHEMES = ("explicit", "sections", "dyadic")
FORECASTERS = ("ve-dvaw", "dvaw")


def canonical_json(cfg):
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg):
    """sha256 of the key-sorted, whitespace-free JSON encoding."""
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found", "--config") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "--config") from None


def _section(cfg, name, required=True):
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError("missing section", name)
        return {}
    return sec


def _num(sec, key, path, default=None, kind=float):
    v = sec.get(key, default)
    if v is None:
        if default is None and key not in sec:
            raise ConfigError("missing field", f"{path}.{key}")
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", f"{path}.{key}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"expected an integer, got {v!r}", f"{path}.{key}")
        return int(v)
    return float(v)


def kernel_from_config(sec):
    kind = sec.get("type")
    try:
        if kind == "gaussian":
            return Gaussian(_num(sec, "sigma", "kernel", 1.0))
        if kind == "polynomial":
            return Polynomial(_num(sec, "q", "kernel", 2, int), _num(sec, "sigma", "kernel", 1.0))
        if kind == "dot_product":
            tr = sec.get("tail_ratio")
            return DotProductAnalytic(sec.get("rule", "exponential"), _num(sec, "scale", "kernel", 1.0),
                                      _num(sec, "sigma", "kernel", 1.0),
                                      None if tr is None else float(tr))
        if kind == "matern":
            return Matern(_num(sec, "nu", "kernel", 0.5), _num(sec, "ell", "kernel", 1.0))
    except ConfigError:
        raise
    except KDVAWError as exc:
        raise ConfigError(str(exc), "kernel") from None
    raise ConfigError(f"unknown kernel type {kind!r}", "kernel.type")


@dataclass
class SchemeConfig:
    kind: str = "explicit"
    m: int = None
    pool_size: int = None
    seed: int = None
    child: str = "sections"
    max_dim: int = 64


@dataclass
class ForecasterConfig:
    kind: str = "ve-dvaw"
    lam: float = 1.0
    lam_meta: float = 1.0
    grid_base: float = 2.0
    gamma: float = 1.0
    hint_policy: str = "previous_label"
    mode: str = "direct"


@dataclass
class OutputConfig:
    trace: str = "trace.csv"
    summary: str = "summary.json"


@dataclass
class RunConfig:
    raw: dict
    kernel: object
    environment: EnvironmentConfig
    scheme: SchemeConfig
    forecaster: ForecasterConfig
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def hash(self):
        return config_hash(self.raw)


def parse_config(cfg):
    """Validate a config dict; raise ConfigError naming the failing field."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kernel = kernel_from_config(_section(cfg, "kernel"))

    e = _section(cfg, "environment")
    T = _num(e, "T", "environment", kind=int)
    try:
        domain = Domain(_num(e, "d", "environment", 1, int), _num(e, "radius", "environment", 1.0))
    except KDVAWError as exc:
        raise ConfigError(str(exc), "environment.domain") from None
    c = e.get("comparator", {})
    path = "environment.comparator"
    segments = _num(c, "segments", path, 1, int)
    step = _num(c, "step", path, 0.0)
    if c.get("path_length") is not None:
        P = _num(c, "path_length", path)
        if c.get("jump_size") is not None:
            # fixed jump size: the number of jumps carries the path length
            jump = _num(c, "jump_size", path)
            if not jump > 0:
                raise ConfigError("jump_size must be positive", path + ".jump_size")
            segments = int(round(P / jump)) + 1
        if P > 0 and segments < 2:
            raise ConfigError("a positive path length needs at least 2 segments", path + ".segments")
        step = P / (segments - 1) if segments > 1 else 0.0
    comp = ComparatorConfig(c.get("representation", "coefficients"), _num(c, "dim", path, 4, int),
                            segments, step, _num(c, "initial_norm", path, 1.0))
    env = EnvironmentConfig(T, domain, kernel, comp, e.get("noise", "uniform"),
                            _num(e, "noise_level", "environment", 0.1),
                            e.get("Y"), _num(e, "seed", "environment", 0, int))
    if env.Y is not None and not (isinstance(env.Y, (int, float)) and env.Y > 0):
        raise ConfigError("Y must be a positive number", "environment.Y")
    env.validate()
    if comp.representation == "coefficients" and isinstance(kernel, Matern):
        raise ConfigError("Matern kernels have no explicit basis; use representation 'kernel'", path + ".representation")

    s = _section(cfg, "scheme", required=False) or {"type": "explicit"}
    if isinstance(s, str):
        s = {"type": s}
    kind = s.get("type", "explicit")
    if kind not in SCHEMES:
        raise ConfigError(f"unknown scheme {kind!r}", "scheme.type")
    scheme = SchemeConfig(kind, _num(s, "m", "scheme", None, int) if s.get("m") is not None else None,
                          s.get("pool_size"), s.get("seed"), s.get("child", "sections"),
                          _num(s, "max_dim", "scheme", 64, int))
    if kind == "sections" and scheme.m is None:
        raise ConfigError("sections scheme needs m", "scheme.m")
    if kind == "explicit" and isinstance(kernel, Matern):
        raise ConfigError("Matern kernels have no explicit feature map", "scheme.type")
    if scheme.child not in ("sections", "explicit"):
        raise ConfigError(f"unknown child scheme {scheme.child!r}", "scheme.child")
    if scheme.m is not None and scheme.m < 1:
        raise ConfigError("m must be >= 1", "scheme.m")

    f = _section(cfg, "forecaster", required=False)
    fc = ForecasterConfig(f.get("type", "ve-dvaw"), _num(f, "lambda", "forecaster", 1.0),
                          _num(f, "lambda_meta", "forecaster", 1.0), _num(f, "grid_base", "forecaster", 2.0),
                          _num(f, "gamma", "forecaster", 1.0), f.get("hint_policy", "previous_label"),
                          f.get("mode", "direct"))
    if fc.kind not in FORECASTERS:
        raise ConfigError(f"unknown forecaster {fc.kind!r}", "forecaster.type")
    if not fc.lam > 0 or not fc.lam_meta > 0:
        raise ConfigError("lambda must be positive", "forecaster.lambda")
    if not fc.grid_base > 1:
        raise ConfigError("grid_base must exceed 1", "forecaster.grid_base")
    if not 0 < fc.gamma <= 1:
        raise ConfigError("gamma must lie in (0, 1]", "forecaster.gamma")
    if fc.hint_policy not in ("previous_label", "zero", "previous_prediction"):
        raise ConfigError(f"unknown hint policy {fc.hint_policy!r}", "forecaster.hint_policy")
    if fc.mode not in ("direct", "inverse"):
        raise ConfigError(f"unknown mode {fc.mode!r}", "forecaster.mode")
    if fc.kind == "dvaw" and kind == "dyadic":
        raise ConfigError("dyadic scheme aggregates VE-DVAW children", "forecaster.type")

    o = _section(cfg, "output", required=False)
    out = OutputConfig(o.get("trace", "trace.csv"), o.get("summary", "summary.json"))
    return RunConfig(cfg, kernel, env, scheme, fc, out)


def expand_sweep(cfg):
    """Cross-product over list-valued leaves. Returns a list of plain configs."""
    leaves = []

    def walk(node, path):
        if isinstance(node, dict):
            for k in sorted(node):
                walk(node[k], path + (k,))
        elif isinstance(node, list):
            leaves.append((path, node))

    walk(cfg, ())
    combos = [copy.deepcopy(cfg)]
    for path, values in leaves:
        if not values:
            raise ConfigError("empty list", ".".join(path))
        nxt = []
        for base in combos:
            for v in values:
                c = copy.deepcopy(base)
                node = c
                for k in path[:-1]:
                    node = node[k]
                node[path[-1]] = v
                nxt.append(c)
        combos = nxt
    return combos


