from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longrun.cointegration import (
    GH_MODELS,
    SingularDesignError,
    adf_on_residuals,
    bartlett_bandwidth,
    build_design,
    candidate_positions,
    decide,
    default_adf_max_lags,
    fit_break_regression,
    gh_critical_values,
    gh_stats_at_break,
    gh_test,
    long_run_variance,
    ols,
    phillips_stats,
    wald_test,
)
from longrun.series import MonthIndex, TimeSeries

START = MonthIndex(2002, 7)


def ts(values, id="y", start=START):
    return TimeSeries(id, start, np.asarray(values, dtype=float))


class TestOls:
    def test_matches_normal_equations(self, rng):
        X = np.column_stack([np.ones(80), rng.normal(size=(80, 3))])
        y = rng.normal(size=80)
        fit = ols(y, X)
        beta_ne = np.linalg.solve(X.T @ X, X.T @ y)
        assert np.allclose(fit.beta, beta_ne, atol=1e-10)
        assert np.allclose(fit.resid, y - X @ beta_ne, atol=1e-10)

    def test_matches_statsmodels_inference(self, rng):
        import statsmodels.api as sm

        X = np.column_stack([np.ones(60), rng.normal(size=(60, 2))])
        y = X @ np.array([1.0, 2.0, -0.5]) + rng.normal(size=60)
        fit = ols(y, X)
        ref = sm.OLS(y, X).fit()
        assert np.allclose(fit.beta, ref.params, atol=1e-10)
        assert np.allclose(fit.se, ref.bse, atol=1e-10)
        assert np.allclose(fit.cov, ref.cov_params(), atol=1e-10)
        assert np.isclose(fit.r_squared, ref.rsquared, atol=1e-10)

    def test_duplicate_column_raises_and_names_it(self, rng):
        x = rng.normal(size=50)
        X = np.column_stack([np.ones(50), x, x])
        with pytest.raises(SingularDesignError, match="rank deficient"):
            ols(rng.normal(size=50), X, names=("const", "a", "a_copy"))

    def test_exact_fit_has_zero_residuals(self):
        X = np.column_stack([np.ones(20), np.arange(20.0)])
        y = 3.0 + 2.0 * np.arange(20.0)
        fit = ols(y, X)
        assert np.allclose(fit.resid, 0.0, atol=1e-10)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_normal_equations_property(self, seed):
        gen = np.random.default_rng(seed)
        n, k = 40, 4
        X = np.column_stack([np.ones(n), gen.normal(size=(n, k - 1))])
        y = gen.normal(size=n)
        fit = ols(y, X)
        assert np.allclose(X.T @ (y - X @ fit.beta), 0.0, atol=1e-8)


class TestBuildDesign:
    def test_column_counts_per_model(self, rng):
        x = rng.normal(size=(40, 2))
        for model, k in (("LS", 4), ("LST", 5), ("RS", 6), ("RST", 8)):
            X, names = build_design(x, model, 20)
            assert X.shape == (40, k)
            assert len(names) == k

    def test_dummy_is_zero_through_break_position(self, rng):
        X, names = build_design(rng.normal(size=(10, 1)), "LS", 4)
        phi = X[:, names.index("break")]
        assert np.array_equal(phi, np.array([0, 0, 0, 0, 1, 1, 1, 1, 1, 1], dtype=float))

    def test_column_order(self, rng):
        x = rng.normal(size=(30, 2))
        X, names = build_design(x, "RST", 15, names=("a", "b"))
        assert names == ("const", "break", "trend", "trend_break", "a", "b", "a_break", "b_break")
        assert np.array_equal(X[:, 2], np.arange(1.0, 31.0))
        assert np.array_equal(X[:, 6], x[:, 0] * X[:, 1])

    def test_break_position_bounds(self, rng):
        x = rng.normal(size=(20, 1))
        with pytest.raises(ValueError):
            build_design(x, "LS", 0)
        with pytest.raises(ValueError):
            build_design(x, "LS", 20)


class TestLongRunVariance:
    def test_bandwidth_zero_reduces_to_variance(self, rng):
        v = rng.normal(size=300)
        gamma0, lam, sigma2 = long_run_variance(v, 0)
        assert lam == 0.0
        assert np.isclose(sigma2, gamma0, atol=1e-14)
        assert np.isclose(gamma0, np.mean(v**2), atol=1e-14)

    def test_ma1_long_run_variance(self, rng):
        # v_t = e_t + 0.6 e_{t-1} has long-run variance (1 + 0.6)^2
        theta = 0.6
        e = rng.normal(size=60_000)
        v = e[1:] + theta * e[:-1]
        _, _, sigma2 = long_run_variance(v, 20)
        assert abs(sigma2 - (1 + theta) ** 2) < 0.12

    def test_default_bandwidth_rule(self):
        assert bartlett_bandwidth(160) == 4
        assert bartlett_bandwidth(100) == 4
        assert bartlett_bandwidth(25) == 2

    def test_default_lag_ceiling_rule(self):
        assert default_adf_max_lags(160) == 13
        assert default_adf_max_lags(100) == 12


class TestPhillipsStats:
    def test_geometric_decay_recovers_rho(self):
        eps = 0.9 ** np.arange(1, 101)
        ph = phillips_stats(eps)
        assert np.isclose(ph.rho, 0.9, atol=1e-12)
        assert abs(ph.lam) < 1e-12
        assert np.isclose(ph.rho_star, ph.rho, atol=1e-9)

    def test_matches_hand_computation(self, rng):
        eps = rng.normal(size=200).cumsum()
        bw = 5
        ph = phillips_stats(eps, bandwidth=bw)
        n = eps.size
        den = sum(eps[t] * eps[t] for t in range(n - 1))
        num = sum(eps[t] * eps[t + 1] for t in range(n - 1))
        rho = num / den
        v = np.array([eps[t] - rho * eps[t - 1] for t in range(1, n)])
        gamma0 = np.mean(v * v)
        lam = sum(
            (1 - j / (bw + 1)) * np.mean(v[j:] * v[:-j]) * (len(v) - j) / len(v)
            for j in range(1, bw + 1)
        )
        rho_star = (num - n * lam) / den
        assert np.isclose(ph.rho, rho, atol=1e-10)
        assert np.isclose(ph.rho_star, rho_star, atol=1e-10)
        assert np.isclose(ph.z_alpha, n * (rho_star - 1), atol=1e-8)
        assert np.isclose(
            ph.z_t, (rho_star - 1) / np.sqrt((gamma0 + 2 * lam) / den), atol=1e-8
        )

    def test_bias_correction_identity(self, rng):
        # rho_star reassembled from the reported parts
        eps = rng.normal(size=150).cumsum()
        ph = phillips_stats(eps)
        n = eps.size
        num = float(eps[:-1] @ eps[1:])
        den = float(eps[:-1] @ eps[:-1])
        assert abs(ph.rho_star - (num - n * ph.lam) / den) < 1e-10

    def test_zero_series_is_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            phillips_stats(np.zeros(50))


class TestAdfOnResiduals:
    def test_matches_statsmodels_fixed_lag(self, rng):
        from statsmodels.tsa.stattools import adfuller

        eps = rng.normal(size=180).cumsum()
        for k in (0, 2, 5):
            mine = adf_on_residuals(eps, lags=k)
            ref = adfuller(eps, maxlag=k, regression="n", autolag=None)
            assert np.isclose(mine.stat, ref[0], atol=1e-8)

    def test_matches_statsmodels_bic_selection(self, rng):
        from statsmodels.tsa.stattools import adfuller

        for _ in range(6):
            e = rng.normal(size=200)
            u = np.zeros(200)
            for t in range(1, 200):
                u[t] = 0.97 * u[t - 1] + e[t] + 0.4 * e[t - 1]
            kmax = default_adf_max_lags(200)
            mine = adf_on_residuals(u, max_lags=kmax)
            ref = adfuller(u, maxlag=kmax, regression="n", autolag="BIC")
            assert mine.lags == ref[2]
            assert np.isclose(mine.stat, ref[0], atol=1e-8)

    def test_white_noise_strongly_rejects(self, rng):
        eps = rng.normal(size=200)
        res = adf_on_residuals(eps)
        assert res.stat < -6.0

    def test_too_short_raises(self):
        with pytest.raises(ValueError, match="too short"):
            adf_on_residuals(np.arange(12.0))


class TestGhTest:
    @staticmethod
    def cointegrated_pair(rng, n=160, break_at=None, noise=0.5):
        x = np.cumsum(rng.normal(size=n))
        u = np.zeros(n)
        e = rng.normal(size=n, scale=noise)
        for t in range(1, n):
            u[t] = 0.3 * u[t - 1] + e[t]
        shift = np.zeros(n)
        if break_at is not None:
            shift[break_at:] = 2.0
        y = 1.0 + shift + 2.0 * x + u
        return ts(y, "y"), [ts(x, "x")]

    def test_trace_matches_from_scratch_recomputation(self, rng):
        y, xs = self.cointegrated_pair(rng, break_at=80)
        for model in GH_MODELS:
            res = gh_test(y, xs, model)
            tr = res.trace
            picks = rng.choice(tr.break_positions.size, size=5, replace=False)
            x = np.column_stack([s.values for s in xs])
            for i in picks:
                b = int(tr.break_positions[i])
                adf, ph = gh_stats_at_break(y.values, x, model, b)
                assert np.isclose(tr.adf[i], adf.stat, atol=1e-8), (model, b)
                assert tr.adf_lags[i] == adf.lags, (model, b)
                assert np.isclose(tr.z_t[i], ph.z_t, atol=1e-8), (model, b)
                assert np.isclose(tr.z_alpha[i], ph.z_alpha, atol=1e-8), (model, b)

    def test_minima_are_consistent_with_trace(self, rng):
        y, xs = self.cointegrated_pair(rng, break_at=70)
        res = gh_test(y, xs, "RS")
        assert res.adf_stat == res.trace.adf.min()
        assert res.zt_stat == res.trace.z_t.min()
        assert res.za_stat == res.trace.z_alpha.min()

    def test_detects_break_in_level_relation(self, rng):
        y, xs = self.cointegrated_pair(rng, break_at=80, noise=0.4)
        res = gh_test(y, xs, "LS")
        cvs = gh_critical_values("LS", 1)
        assert res.adf_stat < cvs.cv("ADF", 5)
        assert res.zt_stat < cvs.cv("Zt", 5)
        # reported break is the last pre-shift month, within a few months
        assert abs(res.zt_break.months_since(START) - 79) <= 6

    def test_scale_and_shift_invariance(self, rng):
        y, xs = self.cointegrated_pair(rng, break_at=90)
        base = gh_test(y, xs, "RST")
        y2 = ts(5.0 * y.values - 7.0, "y")
        xs2 = [ts(3.0 * xs[0].values + 1.0, "x")]
        other = gh_test(y2, xs2, "RST")
        assert np.isclose(base.adf_stat, other.adf_stat, atol=1e-7)
        assert np.isclose(base.zt_stat, other.zt_stat, atol=1e-7)
        assert np.isclose(base.za_stat, other.za_stat, atol=1e-6)
        assert base.zt_break == other.zt_break

    def test_unaligned_inputs_raise(self, rng):
        y = ts(rng.normal(size=60).cumsum(), "y")
        x = ts(rng.normal(size=60).cumsum(), "x", start=START.shift(1))
        with pytest.raises(ValueError, match="not aligned"):
            gh_test(y, [x], "LS")

    def test_tiny_sample_raises(self, rng):
        y = ts(rng.normal(size=20).cumsum(), "y")
        x = ts(rng.normal(size=20).cumsum(), "x")
        with pytest.raises(ValueError):
            gh_test(y, [x], "LS")

    def test_candidate_positions_trimming(self):
        cands = candidate_positions(160)
        assert cands[0] == 24
        assert cands[-1] == 136
        with pytest.raises(ValueError, match="candidate"):
            candidate_positions(10)


class TestCriticalValues:
    def test_levels_are_ordered(self):
        for model in GH_MODELS:
            for m in (1, 2, 3, 4):
                cvs = gh_critical_values(model, m)
                for stat in ("ADF", "Za"):
                    assert cvs.cv(stat, 1) < cvs.cv(stat, 5) < cvs.cv(stat, 10) < 0

    def test_more_regressors_push_left(self):
        for model in GH_MODELS:
            for lvl in (1, 5, 10):
                vals = [gh_critical_values(model, m).cv("ADF", lvl) for m in (1, 2, 3, 4)]
                assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_richer_models_push_left(self):
        # at fixed m, adding break terms deepens the lower-tail quantile
        for m in (1, 2, 3, 4):
            for lvl in (1, 5, 10):
                ls = gh_critical_values("LS", m).cv("ADF", lvl)
                rs = gh_critical_values("RS", m).cv("ADF", lvl)
                rst = gh_critical_values("RST", m).cv("ADF", lvl)
                assert rst < rs < ls

    def test_missing_cell_points_to_simulation(self):
        with pytest.raises(KeyError, match="simulate_critical_values"):
            gh_critical_values("LS", 9)

    def test_provenance_flag(self):
        assert gh_critical_values("LS", 2).provenance == "published"
        assert gh_critical_values("RST", 1).provenance == "published"
        for m in (2, 3, 4):
            assert gh_critical_values("RST", m).provenance == "simulated"


class TestDecide:
    @staticmethod
    def fake_result(model, adf, zt, za, m=2):
        from longrun.cointegration import GhResult, GhTrace

        tr = GhTrace(np.array([50]), np.array([adf]), np.array([0]), np.array([zt]), np.array([za]))
        mo = MonthIndex(2008, 1)
        return GhResult(
            y_id="y", x_ids=("a", "b"), model=model, m=m, nobs=160,
            adf_stat=adf, adf_lags=0, adf_break=mo,
            zt_stat=zt, zt_break=mo, za_stat=za, za_break=mo, trace=tr,
        )

    def test_two_of_three_rule(self):
        cvs = gh_critical_values("LS", 2)
        below = cvs.cv("ADF", 10) - 0.5
        above = cvs.cv("ADF", 10) + 0.5
        za_above = cvs.cv("Za", 10) + 5.0
        res = self.fake_result("LS", below, below, za_above)
        d = decide([res])
        assert d.per_model["LS"] is True
        assert d.cointegrated

        res1 = self.fake_result("LS", below, above, za_above)
        d1 = decide([res1])
        assert d1.per_model["LS"] is False
        assert not d1.cointegrated

    def test_any_model_passes_overall(self):
        cvs_ls = gh_critical_values("LS", 2)
        cvs_rs = gh_critical_values("RS", 2)
        weak = self.fake_result(
            "LS", cvs_ls.cv("ADF", 10) + 1, cvs_ls.cv("Zt", 10) + 1, cvs_ls.cv("Za", 10) + 9
        )
        strong = self.fake_result(
            "RS", cvs_rs.cv("ADF", 1) - 1, cvs_rs.cv("Zt", 1) - 1, cvs_rs.cv("Za", 10) + 9
        )
        d = decide([weak, strong])
        assert d.cointegrated
        assert d.passing_models == ("RS",)


class TestFitAndWald:
    def test_recovers_known_break_regression(self, rng):
        n = 200
        x = np.cumsum(rng.normal(size=n)) + 50
        phi = np.zeros(n)
        phi[120:] = 1.0
        y = 4.0 + 3.0 * phi + 1.5 * x - 1.0 * phi * x + rng.normal(size=n, scale=0.3)
        fit = fit_break_regression(
            ts(y, "y"), [ts(x, "x")], "RS", START.shift(119)
        )
        assert fit.names == ("const", "break", "x", "x_break")
        assert np.allclose(fit.beta, [4.0, 3.0, 1.5, -1.0], atol=0.25)
        assert fit.break_position == 120
        assert len(fit.resid) == n
        assert fit.resid.start == START

    def test_wald_of_true_zero_combination(self, rng):
        n = 200
        x = np.cumsum(rng.normal(size=n)) + 50
        phi = np.zeros(n)
        phi[100:] = 1.0
        # post-break slope is exactly zero: coef(x) + coef(x_break) = 0
        y = 2.0 + 1.0 * phi + 2.0 * x - 2.0 * phi * x + rng.normal(size=n, scale=0.2)
        fit = fit_break_regression(ts(y, "y"), [ts(x, "x")], "RS", START.shift(99))
        R = np.zeros(4)
        R[fit.names.index("x")] = 1.0
        R[fit.names.index("x_break")] = 1.0
        w = wald_test(fit, R, 0.0)
        assert w.df == 1
        assert w.pvalue > 0.01

        false_r = wald_test(fit, R, 5.0)
        assert false_r.pvalue < 1e-6

    def test_rank_deficient_restriction_raises(self, rng):
        n = 120
        x = np.cumsum(rng.normal(size=n))
        y = 1.0 + x + rng.normal(size=n)
        fit = fit_break_regression(ts(y, "y"), [ts(x, "x")], "LS", START.shift(60))
        R = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        with pytest.raises(ValueError, match="rank deficient"):
            wald_test(fit, R, np.zeros(2))

    def test_break_outside_window_raises(self, rng):
        n = 80
        y, x = ts(rng.normal(size=n).cumsum(), "y"), ts(rng.normal(size=n).cumsum(), "x")
        with pytest.raises(ValueError, match="break month"):
            fit_break_regression(y, [x], "LS", START.shift(-5))
