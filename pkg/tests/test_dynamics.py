"""Tests for the short-run models (error correction and VAR)."""

from __future__ import annotations

import numpy as np
import pytest

from longrun.cointegration import SingularDesignError
from longrun.dynamics import (
    EcmFit,
    VarFit,
    fit_ecm,
    fit_var_diff,
    select_var_order,
    var_stability,
)
from longrun.montecarlo import DgpSpec, generate, substream
from longrun.series import AlignmentError, MonthIndex, TimeSeries, window

START = MonthIndex(2002, 7)


def _ecm_dataset(rng, n=200, rho=0.8, theta=1.0):
    """Levels dataset whose true error-correction loading is rho - 1."""
    x1 = np.cumsum(rng.standard_normal(n))
    x2 = np.cumsum(rng.standard_normal(n))
    u = np.zeros(n)
    e = 0.5 * rng.standard_normal(n)
    u[0] = e[0]
    for t in range(1, n):
        u[t] = rho * u[t - 1] + e[t]
    y = 2.0 + theta * x1 - 0.5 * x2 + u
    return (
        TimeSeries("dj", START, y),
        TimeSeries("i", START, x1),
        TimeSeries("u", START, x2),
        TimeSeries("resid", START, u),
    )


class TestFitEcm:
    def test_names_and_sample_length(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid)
        assert fit.names == ("const", "ecm_lag1", "d_i", "d_u")
        assert fit.nobs == len(dj) - 1
        assert fit.dependent == "d_dj"

    def test_matches_statsmodels(self, rng):
        sm = pytest.importorskip("statsmodels.api")
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid)
        X = np.column_stack(
            [
                np.ones(len(dj) - 1),
                resid.values[:-1],
                np.diff(i.values),
                np.diff(u.values),
            ]
        )
        ref = sm.OLS(np.diff(dj.values), X).fit()
        np.testing.assert_allclose(fit.beta, ref.params, rtol=0, atol=1e-10)
        np.testing.assert_allclose(fit.se, ref.bse, rtol=0, atol=1e-10)
        assert abs(fit.r_squared - ref.rsquared) < 1e-10

    def test_recovers_known_adjustment_speed(self):
        hits = 0
        for rep in range(6):
            rng = substream(910, rep)
            dj, i, u, resid = _ecm_dataset(rng, n=300, rho=0.8)
            fit = fit_ecm(dj, i, u, resid)
            est, se, _ = fit.coefficient("ecm_lag1")
            hits += abs(est - (-0.2)) < 2 * se
        assert hits >= 5

    def test_residual_orthogonal_to_design(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid)
        X = np.column_stack(
            [
                np.ones(len(dj) - 1),
                resid.values[:-1],
                np.diff(i.values),
                np.diff(u.values),
            ]
        )
        assert np.max(np.abs(X.T @ fit.ols_fit.resid)) < 1e-8

    def test_r_squared_definition(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid)
        y = np.diff(dj.values)
        sst = float(np.sum((y - y.mean()) ** 2))
        assert 0.0 <= fit.r_squared <= 1.0
        assert abs(fit.r_squared - (1.0 - fit.ols_fit.ssr / sst)) < 1e-10

    def test_optional_output_regressor(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        ip = TimeSeries("ip", START, np.cumsum(rng.standard_normal(len(dj))))
        fit = fit_ecm(dj, i, u, resid, ip=ip)
        assert fit.names == ("const", "ecm_lag1", "d_i", "d_u", "d_ip")

    def test_lag_augmentation(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid, extra_diff_lags=1)
        assert "d_i_lag1" in fit.names and "d_u_lag1" in fit.names
        assert fit.nobs == len(dj) - 2

    def test_misaligned_residual_rejected(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        shifted = TimeSeries("resid", START.shift(1), resid.values[1:])
        with pytest.raises(AlignmentError):
            fit_ecm(dj, i, u, shifted)

    def test_zero_residual_is_singular(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        flat = resid.with_values(np.zeros(len(resid)))
        with pytest.raises(SingularDesignError):
            fit_ecm(dj, i, u, flat)

    def test_duplicate_ids_rejected(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        with pytest.raises(ValueError, match="distinct"):
            fit_ecm(dj, i, TimeSeries("i", START, u.values), resid)

    def test_coefficient_accessor(self, rng):
        dj, i, u, resid = _ecm_dataset(rng)
        fit = fit_ecm(dj, i, u, resid)
        est, se, t = fit.coefficient("d_i")
        j = fit.names.index("d_i")
        assert (est, se) == (fit.beta[j], fit.se[j])
        assert abs(t - est / se) < 1e-12


def _series_from_levels(levels: np.ndarray) -> list[TimeSeries]:
    return [
        TimeSeries(f"s{j}", START, levels[:, j]) for j in range(levels.shape[1])
    ]


class TestFitVarDiff:
    def test_matches_statsmodels(self, rng):
        tsa = pytest.importorskip("statsmodels.tsa.api")
        data = generate(DgpSpec("var_diff", 300, {"k": 3, "radius": 0.5}), rng)
        series = _series_from_levels(data["levels"])
        fit = fit_var_diff(series, p=2)
        ref = tsa.VAR(np.diff(data["levels"], axis=0)).fit(2, trend="c")
        np.testing.assert_allclose(fit.coef, ref.coefs, rtol=0, atol=1e-8)
        np.testing.assert_allclose(fit.intercept, ref.intercept, rtol=0, atol=1e-8)
        assert fit.stable == ref.is_stable()

    def test_known_radius_recovered(self):
        data = generate(
            DgpSpec("var_diff", 500, {"k": 2, "radius": 0.5}), substream(77, 0)
        )
        fit = fit_var_diff(_series_from_levels(data["levels"]), p=1)
        assert abs(fit.spectral_radius - 0.5) < 0.1
        assert fit.stable

    def test_white_noise_differences(self):
        inside = 0
        total = 0
        for rep in range(5):
            rng = substream(78, rep)
            levels = np.cumsum(rng.standard_normal((250, 2)), axis=0)
            fit = fit_var_diff(_series_from_levels(levels), p=2)
            assert fit.stable
            inside += int(np.sum(np.abs(fit.coef) < 2 * fit.se_coef))
            total += fit.coef.size
        assert inside / total >= 0.90

    def test_coefficient_rmse_shrinks_with_sample(self):
        rmse = {}
        for n in (200, 800):
            errs = []
            for rep in range(8):
                rng = substream(600 + n, rep)
                data = generate(DgpSpec("var_diff", n, {"k": 2, "radius": 0.6}), rng)
                fit = fit_var_diff(_series_from_levels(data["levels"]), p=1)
                errs.append(np.sqrt(np.mean((fit.coef[0] - data["A"]) ** 2)))
            rmse[n] = np.mean(errs)
        assert rmse[800] < rmse[200]

    def test_companion_layout(self, rng):
        data = generate(DgpSpec("var_diff", 200, {"k": 3}), rng)
        fit = fit_var_diff(_series_from_levels(data["levels"]), p=2)
        C = fit.companion()
        assert C.shape == (6, 6)
        np.testing.assert_array_equal(C[3:, :3], np.eye(3))
        np.testing.assert_array_equal(C[3:, 3:], np.zeros((3, 3)))
        np.testing.assert_allclose(C[:3, :3], fit.coef[0])
        np.testing.assert_allclose(C[:3, 3:], fit.coef[1])

    def test_preconditions(self, rng):
        levels = np.cumsum(rng.standard_normal((40, 2)), axis=0)
        series = _series_from_levels(levels)
        with pytest.raises(ValueError, match="at least 2"):
            fit_var_diff(series[:1])
        with pytest.raises(ValueError, match="lag order"):
            fit_var_diff(series, p=0)
        short = [window(s, START, START.shift(8)) for s in series]
        with pytest.raises(ValueError, match="observations"):
            fit_var_diff(short, p=2)
        moved = [series[0], TimeSeries("s1", START.shift(1), levels[1:, 1])]
        with pytest.raises(AlignmentError):
            fit_var_diff(moved)

    def test_perfectly_collinear_series_rejected(self, rng):
        levels = np.cumsum(rng.standard_normal(60))
        a = TimeSeries("a", START, levels)
        b = TimeSeries("b", START, 2.0 * levels)
        with pytest.raises(SingularDesignError):
            fit_var_diff([a, b], p=1)


class TestStability:
    @staticmethod
    def _fake_fit(coef: np.ndarray) -> VarFit:
        p, k, _ = coef.shape
        from longrun.dynamics import _companion

        radius = float(np.max(np.abs(np.linalg.eigvals(_companion(coef)))))
        return VarFit(
            names=tuple(f"s{j}" for j in range(k)),
            p=p,
            intercept=np.zeros(k),
            coef=coef,
            se_intercept=np.ones(k),
            se_coef=np.ones_like(coef),
            r_squared=np.zeros(k),
            nobs=100,
            spectral_radius=radius,
            stable=radius < 1.0 - 1e-10,
            equation_fits=(),
        )

    def test_zero_coefficients_stable(self):
        fit = self._fake_fit(np.zeros((2, 3, 3)))
        assert fit.spectral_radius == 0.0
        assert var_stability(fit)

    def test_identity_var1_unstable(self):
        fit = self._fake_fit(np.eye(2)[None, :, :])
        assert abs(fit.spectral_radius - 1.0) < 1e-12
        assert not var_stability(fit)

    def test_random_stable_dgps_flagged_stable(self):
        flags = []
        for rep in range(20):
            rng = substream(81, rep)
            data = generate(DgpSpec("var_diff", 400, {"k": 2, "radius": 0.4}), rng)
            flags.append(fit_var_diff(_series_from_levels(data["levels"]), p=1).stable)
        assert np.mean(flags) >= 0.99


class TestSelectVarOrder:
    def test_clear_var1_signal(self):
        data = generate(
            DgpSpec("var_diff", 600, {"k": 2, "radius": 0.7}), substream(82, 0)
        )
        assert select_var_order(_series_from_levels(data["levels"]), p_max=4) == 1

    def test_var2_signal(self):
        rng = substream(83, 0)
        n, k = 800, 2
        A1 = np.array([[0.3, 0.0], [0.0, 0.25]])
        A2 = np.array([[0.35, 0.1], [0.05, 0.4]])
        d = np.zeros((n, k))
        e = rng.standard_normal((n, k))
        d[:2] = e[:2]
        for t in range(2, n):
            d[t] = d[t - 1] @ A1.T + d[t - 2] @ A2.T + e[t]
        levels = np.cumsum(d, axis=0)
        assert select_var_order(_series_from_levels(levels), p_max=4) == 2

    def test_invalid_pmax(self, rng):
        levels = np.cumsum(rng.standard_normal((50, 2)), axis=0)
        with pytest.raises(ValueError):
            select_var_order(_series_from_levels(levels), p_max=0)
