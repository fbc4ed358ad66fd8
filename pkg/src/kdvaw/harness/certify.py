"""Seeded certification suites: bound checks and numerical invariants."""
from dataclasses import dataclass, field

import numpy as np

from ..dvaw import DVAW
from ..ensemble import build_grid
from ..errors import ExtendedSenseViolation
from ..features import ExplicitFeatureMap, layer_dimension
from ..kernels import Domain, Gaussian, Matern, Polynomial
from ..sections import build_section_basis, farthest_point_net, power_function_many
from .bounds import certify_dvaw, path_length, path_length_bound
from .prequential import RegretTrace

SUITES = ("thm31", "lemma31", "invariants")


@dataclass
class Instance:
    seed: int
    zs: np.ndarray
    ys: np.ndarray
    u: np.ndarray
    gamma: float
    a: float
    Y: float


def random_instance(seed):
    """Bounded stream with a random piecewise-constant comparator.

    m in {1, 2, 3}, T in {50, 100, 200}, gamma drawn from the discount grid.
    """
    rng = np.random.default_rng(seed)
    m = int(rng.choice([1, 2, 3]))
    T = int(rng.choice([50, 100, 200]))
    gammas = build_grid(m, T).gammas
    gamma = float(gammas[rng.integers(len(gammas))])
    a = float(rng.uniform(0.5, 2.0))
    z = rng.standard_normal((T, m))
    z *= (a * rng.uniform(0, 1, T) / np.linalg.norm(z, axis=1))[:, None]
    K = int(rng.integers(1, 6))
    U = rng.standard_normal((K, m)) * rng.uniform(0.2, 2.0)
    seg = (np.arange(T) * K) // T
    u = U[seg]
    Y = float(rng.uniform(0.5, 3.0))
    ys = np.clip((u * z).sum(1) + rng.uniform(-0.5, 0.5, T), -Y, Y)
    return Instance(seed, z, ys, u, gamma, a, Y)


@dataclass
class SuiteResult:
    suite: str
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def record(self, name, ok, detail=""):
        if ok:
            self.passed += 1
        else:
            self.failures.append(f"{name}: {detail}")


def _certify_instances(suite, seeds, which):
    res = SuiteResult(suite)
    for s in range(seeds):
        inst = random_instance(s)
        run = certify_dvaw(inst.zs, inst.ys, inst.u, 1.0, inst.gamma, a=inst.a, Y=inst.Y)
        chk = run.dvaw if which == "dvaw" else run.simplified
        res.record(f"seed {s}", chk.holds, f"lhs={chk.lhs:.6g} rhs={chk.rhs:.6g}")
    return res


def suite_thm31(seeds=100):
    return _certify_instances("thm31", seeds, "dvaw")


def suite_lemma31(seeds=100):
    res = _certify_instances("lemma31", seeds, "simplified")
    # gamma = 1 with a moving comparator has no finite simplified bound
    inst = random_instance(0)
    u = inst.u.copy()
    u[len(u) // 2:] += 1.0
    run = certify_dvaw(inst.zs, inst.ys, u, 1.0, 1.0)
    R = float(np.linalg.norm(u, axis=1).max())
    try:
        path_length_bound(run.trace, inst.a, inst.Y, R, u.shape[1], 1.0, 1.0, path_length(u))
        res.record("extended sense", False, "gamma=1 with P>0 was not rejected")
    except ExtendedSenseViolation:
        res.record("extended sense", True)
    return res


def suite_invariants(seeds=10):
    res = SuiteResult("invariants")
    for s in range(seeds):
        rng = np.random.default_rng(1000 + s)
        # direct and inverse DVAW agree
        m, T = 5, 200
        g = float(rng.uniform(0.9, 1.0))
        a, b = DVAW(m, 1.0, g, "direct"), DVAW(m, 1.0, g, "inverse")
        worst = 0.0
        for _ in range(T):
            z = rng.uniform(-1, 1, m)
            h = float(rng.uniform(-1, 1))
            worst = max(worst, abs(a.predict(z, h)[0] - b.predict(z, h)[0]))
            y = float(rng.uniform(-1, 1))
            a.update(z, y)
            b.update(z, y)
        res.record(f"modes seed {s}", worst <= 1e-6, f"max gap {worst:.3g}")

        # section basis is orthonormal and the power function vanishes on the net
        kern = Matern(0.5 + int(rng.integers(0, 3)), float(rng.uniform(0.3, 1.5)))
        dom = Domain(int(rng.integers(1, 3)))
        Z, _ = farthest_point_net(dom, kern, int(rng.integers(2, 20)), seed=s)
        basis = build_section_basis(Z, kern)
        err = np.abs(basis.inner_products() - np.eye(basis.dim)).max()
        res.record(f"orthonormal seed {s}", err <= 1e-8, f"max err {err:.3g}")
        # at a node the residual is exactly the discarded part of the spectrum
        pw = power_function_many(basis, Z)
        dropped = basis.eigenvalues[basis.rank:]
        resid = np.sqrt(np.maximum((basis.eigenvectors[:, basis.rank:] ** 2 * dropped).sum(1), 0.0))
        gap = np.abs(pw - resid).max()
        res.record(f"power at nodes seed {s}", gap <= 1e-7, f"max gap {gap:.3g}")

        # polynomial explicit map reproduces its kernel
        q, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        pk = Polynomial(q, float(rng.uniform(0.5, 2.0)))
        fm = ExplicitFeatureMap(pk, d, layer_dimension(d, q), 1.0)
        X = Domain(d).sample(20, rng)
        K = pk.matrix(X, X)
        rel = np.abs(fm.truncated_kernel(X, X) - K).max() / np.abs(K).max()
        res.record(f"polynomial seed {s}", rel <= 1e-10, f"rel err {rel:.3g}")

        # Gaussian features: the truncated kernel never exceeds the full one
        gk = Gaussian(1.0)
        fm = ExplicitFeatureMap(gk, 1, 8, 1.0)
        X = Domain(1).sample(20, rng)
        diag_gap = (gk.diag(X) - (fm.transform(X) ** 2).sum(1)).min()
        res.record(f"gaussian residual seed {s}", diag_gap >= -1e-12, f"min {diag_gap:.3g}")

        # trace cumulative regret is a prefix sum
        n = 30
        ys, yh, fv = rng.normal(size=n), rng.normal(size=n), rng.normal(size=n)
        inst, comp = 0.5 * (ys - yh) ** 2, 0.5 * (ys - fv) ** 2
        tr = RegretTrace(np.arange(1, n + 1), ys, np.zeros(n), yh, inst, comp, np.cumsum(inst - comp))
        res.record(f"prefix sums seed {s}", tr.final_regret == float(np.cumsum(inst - comp)[-1]))
    return res


def run_suite(name, seeds=100):
    if name == "thm31":
        return suite_thm31(seeds)
    if name == "lemma31":
        return suite_lemma31(seeds)
    return suite_invariants(seeds)
