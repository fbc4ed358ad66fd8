"""Bind a parsed run config to an environment, a feature map and a forecaster."""
import logging
import os
from dataclasses import dataclass

from ..dvaw import DVAW
from ..ensemble import VEDVAW, DyadicAggregator, build_grid, dyadic_dims
from ..errors import ConfigError
from ..features import (ExplicitFeatureMap, dot_product_rate_constant, dot_product_tail_ratio,
                        fast_regime_dimension, gaussian_rate_constant, layer_dimension)
from ..kernels import DotProductAnalytic, Gaussian, Polynomial
from ..sections import build_section_basis, farthest_point_net
from .bounds import check_meta_regret
from .config import parse_config
from .environment import generate_environment
from .prequential import run_prequential

log = logging.getLogger("kdvaw")


def auto_dimension(kernel, domain, T):
    """Fast-regime dimension for kernels with an explicit expansion."""
    d = domain.d
    if isinstance(kernel, Gaussian):
        return fast_regime_dimension(1.0 / d, gaussian_rate_constant(d), T, d)
    if isinstance(kernel, DotProductAnalytic):
        q = dot_product_tail_ratio(kernel, domain)
        return fast_regime_dimension(1.0 / d, dot_product_rate_constant(q, d), T, d)
    if isinstance(kernel, Polynomial):
        return layer_dimension(d, kernel.q)
    raise ConfigError(f"no automatic dimension for {type(kernel).__name__}", "scheme.m")


def section_maps(kernel, domain, dims, pool_size=None, seed=0):
    """Nested farthest-point nets: the first k greedy points form the k-net."""
    top = max(dims)
    Z, _ = farthest_point_net(domain, kernel, top, pool_size, seed)
    return [build_section_basis(Z[:k], kernel) for k in dims]


@dataclass
class RunResult:
    config: object
    env: object
    forecaster: object
    feature_map: object
    trace: object
    m: int
    N: int

    def summary(self):
        return self.trace.summary()

    def meta_check(self):
        if isinstance(self.forecaster, DVAW):
            return None
        return check_meta_regret(self.forecaster, self.env.Y, self.config.forecaster.lam_meta)


def build_forecaster(rc, env):
    """Return (forecaster, feature_map, m, N)."""
    k, dom, T = rc.kernel, rc.environment.domain, rc.environment.T
    s, f = rc.scheme, rc.forecaster
    seed = rc.environment.seed if s.seed is None else int(s.seed)
    if s.kind == "dyadic":
        dims = dyadic_dims(T, s.max_dim)
        if s.child == "explicit":
            maps = [ExplicitFeatureMap(k, dom.d, m, dom.radius) for m in dims]
        else:
            maps = section_maps(k, dom, dims, s.pool_size, seed)
        agg = DyadicAggregator(T, maps, dims, f.grid_base, f.lam, f.lam_meta, f.mode)
        return agg, None, max(fm.dim for fm in maps), agg.K
    if s.kind == "explicit":
        m = s.m if s.m is not None else auto_dimension(k, dom, T)
        fmap = ExplicitFeatureMap(k, dom.d, m, dom.radius)
    else:
        fmap = section_maps(k, dom, [s.m], s.pool_size, seed)[0]
    m = fmap.dim
    if f.kind == "dvaw":
        return DVAW(m, f.lam, f.gamma, f.mode), fmap, m, 1
    grid = build_grid(m, T, f.grid_base)
    return VEDVAW(m, grid, f.lam, f.lam_meta, f.mode, horizon=T), fmap, m, grid.N


def execute(cfg):
    """Run one config dict (or parsed RunConfig) end to end in memory."""
    rc = cfg if hasattr(cfg, "raw") else parse_config(cfg)
    env = generate_environment(rc.environment)
    model, fmap, m, N = build_forecaster(rc, env)
    log.info("run T=%d m=%d N=%d scheme=%s", env.T, m, N, rc.scheme.kind)
    trace = run_prequential(model, env, fmap, rc.forecaster.hint_policy)
    trace.meta.update(m=int(m), N=int(N), seed=rc.environment.seed, config_hash=rc.hash)
    return RunResult(rc, env, model, fmap, trace, m, N)


def write_outputs(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    o = result.config.output
    result.trace.to_csv(os.path.join(out_dir, o.trace))
    result.trace.write_summary(os.path.join(out_dir, o.summary))
