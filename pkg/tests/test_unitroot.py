from __future__ import annotations

import numpy as np
import pytest

from longrun.series import MonthIndex, TimeSeries
from longrun.unitroot import adf_test, mackinnon_critical_values, pp_test

START = MonthIndex(2002, 7)


def ts(values, id="y"):
    return TimeSeries(id, START, np.asarray(values, dtype=float))


def ar1(rng, n, rho, scale=1.0):
    e = rng.normal(size=n, scale=scale)
    y = np.zeros(n)
    y[0] = e[0]
    for t in range(1, n):
        y[t] = rho * y[t - 1] + e[t]
    return y


class TestMacKinnonTable:
    def test_matches_statsmodels(self):
        from statsmodels.tsa.adfvalues import mackinnoncrit

        for spec, reg in (("c", "c"), ("ct", "ct")):
            for nobs in (50, 100, 158, 400):
                mine = mackinnon_critical_values(spec, nobs)
                ref = mackinnoncrit(N=1, regression=reg, nobs=nobs)
                assert np.isclose(mine[1], ref[0], atol=1e-6)
                assert np.isclose(mine[5], ref[1], atol=1e-6)
                assert np.isclose(mine[10], ref[2], atol=1e-6)

    def test_ordering(self):
        cvs = mackinnon_critical_values("c", 160)
        assert cvs[1] < cvs[5] < cvs[10] < 0


class TestAdf:
    def test_matches_statsmodels_with_constant(self, rng):
        from statsmodels.tsa.stattools import adfuller

        y = ar1(rng, 180, 0.9)
        for k in (0, 3):
            mine = adf_test(ts(y), spec="c", lags=k)
            ref = adfuller(y, maxlag=k, regression="c", autolag=None)
            assert np.isclose(mine.stat, ref[0], atol=1e-8)

    def test_matches_statsmodels_selection_and_trend(self, rng):
        from statsmodels.tsa.stattools import adfuller

        from longrun.cointegration import default_adf_max_lags

        kmax = default_adf_max_lags(200)
        for _ in range(5):
            e = rng.normal(size=200)
            y = np.zeros(200)
            for t in range(1, 200):
                y[t] = 0.95 * y[t - 1] + e[t] + 0.35 * e[t - 1]
            for spec in ("c", "ct"):
                for method in ("aic", "bic"):
                    mine = adf_test(ts(y), spec=spec, method=method)
                    ref = adfuller(y, maxlag=kmax, regression=spec, autolag=method.upper())
                    assert mine.lags == ref[2], (spec, method)
                    assert np.isclose(mine.stat, ref[0], atol=1e-8), (spec, method)
                    assert mine.nobs == ref[3]

    def test_affine_invariance(self, rng):
        y = ar1(rng, 160, 0.95)
        a = adf_test(ts(y), spec="c")
        b = adf_test(ts(4.0 * y - 100.0), spec="c")
        assert np.isclose(a.stat, b.stat, atol=1e-9)
        assert a.lags == b.lags
        c = adf_test(ts(y), spec="ct")
        d = adf_test(ts(4.0 * y - 100.0), spec="ct")
        assert np.isclose(c.stat, d.stat, atol=1e-9)

    def test_stationary_series_rejects(self, rng):
        y = ar1(rng, 400, 0.5)
        res = adf_test(ts(y), spec="c")
        assert res.reject_at == 1
        assert res.stars == "***"

    def test_random_walk_does_not_reject(self):
        walk = np.cumsum(np.random.default_rng(4).normal(size=200))
        res = adf_test(ts(walk), spec="c")
        assert res.reject_at is None

    def test_short_series_raises(self):
        with pytest.raises(ValueError, match="too short"):
            adf_test(ts(np.arange(20.0)))


class TestPp:
    def test_white_noise_rejects_at_one_percent(self, rng):
        res = pp_test(ts(rng.normal(size=200)), spec="c")
        assert res.reject_at == 1

    def test_random_walk_does_not_reject(self):
        walk = np.cumsum(np.random.default_rng(11).normal(size=200))
        res = pp_test(ts(walk), spec="c")
        assert res.reject_at is None

    def test_reduces_to_t_stat_with_zero_bandwidth(self, rng):
        # with bandwidth 0 the correction vanishes and Z_t is the plain
        # autoregression t-statistic
        import statsmodels.api as sm

        y = ar1(rng, 150, 0.8)
        res = pp_test(ts(y), spec="c", bandwidth=0)
        X = sm.add_constant(y[:-1])
        ref = sm.OLS(y[1:], X[:, ::-1]).fit()  # [level, const] ordering
        t_rho = (ref.params[0] - 1.0) / ref.bse[0]
        assert np.isclose(res.stat, t_rho, atol=1e-8)

    def test_affine_invariance(self, rng):
        y = ar1(rng, 160, 0.9)
        a = pp_test(ts(y), spec="c")
        b = pp_test(ts(0.25 * y + 3.0), spec="c")
        assert np.isclose(a.stat, b.stat, atol=1e-9)

    def test_default_bandwidth_recorded(self, rng):
        res = pp_test(ts(ar1(rng, 160, 0.9)))
        assert res.lags == 4  # floor(4*(159/100)^(2/9))

    def test_size_under_null_quick(self):
        # 400 seeded replications: rejection rate at 5% within 2-8%
        hits = 0
        for rep in range(400):
            gen = np.random.default_rng(900 + rep)
            walk = np.cumsum(gen.normal(size=160))
            res = pp_test(ts(walk), spec="c")
            if res.stat < res.critical_values[5]:
                hits += 1
        assert 0.02 <= hits / 400 <= 0.08
