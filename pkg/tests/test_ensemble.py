import math

import numpy as np
import pytest

from kdvaw.dvaw import DVAW
from kdvaw.ensemble import VEDVAW, DyadicAggregator, build_grid, dyadic_dims, meta_regret_bound
from kdvaw.errors import DimensionMismatch, HorizonExceeded, InvalidParam, ProtocolError
from kdvaw.features import ExplicitFeatureMap
from kdvaw.kernels import Gaussian


class TestGrid:
    def test_small(self):
        g = build_grid(2, 8, 2.0)
        assert g.etas == (4.0, 8.0, 16.0)
        assert g.gammas == pytest.approx((4 / 5, 8 / 9, 16 / 17))
        assert g.N == 4

    def test_saturated_immediately(self):
        g = build_grid(1, 2, 2.0)
        assert g.etas == (2.0,) and g.gammas == pytest.approx((2 / 3,)) and g.N == 2

    def test_count_by_enumeration(self):
        # i with 6 * 2^i < 3000, plus the saturated entry
        expected = sum(1 for i in range(64) if 6 * 2 ** i < 3000) + 1
        assert expected == 10
        g = build_grid(3, 1000, 2.0)
        assert len(g.gammas) == expected
        assert g.etas[-1] == 3000.0 and g.etas[-2] < 3000.0

    def test_without_hint_expert(self):
        assert build_grid(2, 8, include_hint_expert=False).N == 3

    @pytest.mark.parametrize("args", [(0, 10, 2.0), (1, 1, 2.0), (1, 10, 1.0)])
    def test_invalid(self, args):
        with pytest.raises(InvalidParam):
            build_grid(*args)

    def test_monotone_gammas(self):
        g = build_grid(5, 5000, 1.5)
        assert all(0 < a < b < 1 for a, b in zip(g.gammas, g.gammas[1:]))


class TestVEDVAW:
    def test_first_prediction_zero(self):
        e = VEDVAW.for_horizon(2, 10)
        assert e.predict([0.3, -0.2], 0.7) == 0.0

    def test_linearity_of_meta(self):
        e = VEDVAW.for_horizon(1, 30)
        rng = np.random.default_rng(0)
        for _ in range(10):
            e.predict([rng.uniform(-1, 1)], 0.5)
            e.update(0.5)
        p = 0.37
        alpha = e.meta.predict(np.full(e.N, p), 0.0)[1]
        assert alpha @ np.full(e.N, p) == pytest.approx(p * alpha.sum(), rel=1e-12)

    def test_single_expert_composition(self):
        # one discount, no hint slot: the ensemble is a VAW on one DVAW's predictions
        grid = build_grid(1, 2)  # one gamma
        grid = type(grid)(grid.b, grid.eta_min, grid.eta_max, grid.etas, grid.gammas, False)
        ens = VEDVAW(1, grid, 1.0, 1.0)
        inner, outer = DVAW(1, 1.0, grid.gammas[0]), DVAW(1, 1.0, 1.0)
        rng = np.random.default_rng(5)
        for _ in range(40):
            z, h, y = rng.uniform(-1, 1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)
            p = inner.predict(z, h)[0]
            want = outer.predict([p], 0.0)[0]
            ens.horizon = None
            assert ens.predict(z, h) == pytest.approx(want, abs=1e-13)
            ens.update(y)
            inner.update(z, y)
            outer.update([p], y)

    def test_hint_expert_is_first(self):
        e = VEDVAW.for_horizon(1, 10)
        zeta = e.meta_features([0.5], 0.9)
        assert zeta[0] == 0.9 and len(zeta) == e.N

    def test_protocol(self):
        e = VEDVAW.for_horizon(1, 2)
        with pytest.raises(ProtocolError):
            e.update(1.0)
        with pytest.raises(DimensionMismatch):
            e.predict([1.0, 2.0])
        e.round([0.1], 0.0, 0.2)
        e.round([0.1], 0.0, 0.2)
        with pytest.raises(HorizonExceeded):
            e.predict([0.1])

    def test_meta_regret_bound_holds(self):
        rng = np.random.default_rng(9)
        T = 300
        e = VEDVAW.for_horizon(2, T)
        prev = 0.0
        for _ in range(T):
            z = rng.uniform(-1, 1, 2)
            y = float(np.clip(np.sin(3 * z[0]) + 0.1 * rng.standard_normal(), -1.5, 1.5))
            e.round(z, prev, y)
            prev = y
        bound = meta_regret_bound(e.N, 1.5, e.meta_energy)
        assert np.all(e.loss - e.expert_losses <= bound)


def test_meta_regret_bound_formula():
    assert meta_regret_bound(4, 2.0, 0.0) == 0.5
    assert meta_regret_bound(3, 1.0, 30.0) == pytest.approx(0.5 + 1.5 * math.log(11.0))


class TestDyadic:
    def test_dims(self):
        assert dyadic_dims(2) == [1, 2]
        assert dyadic_dims(1000) == [2 ** j for j in range(10)]
        assert dyadic_dims(1000, max_dim=16) == [1, 2, 4, 8, 16]

    def test_first_round_zero_and_bound(self):
        T = 64
        dims = dyadic_dims(T, 8)
        maps = [ExplicitFeatureMap(Gaussian(1.0), 1, m) for m in dims]
        agg = DyadicAggregator(T, maps, dims)
        rng = np.random.default_rng(1)
        x = rng.uniform(-1, 1, 1)
        assert agg.predict(x, 0.4) == 0.0
        agg.update(0.3)
        for _ in range(T - 1):
            x = rng.uniform(-1, 1, 1)
            agg.round(x, 0.0, float(np.cos(2 * x[0])))
        assert np.all(agg.loss - agg.child_losses <= meta_regret_bound(agg.K, 1.0, agg.meta_energy))
        with pytest.raises(HorizonExceeded):
            agg.predict(x)

    def test_needs_aligned_maps(self):
        with pytest.raises(InvalidParam):
            DyadicAggregator(4, [], [1])
