"""Tests for the replication machinery, generators, and simulated tables."""

from __future__ import annotations

import numpy as np
import pytest

from longrun.cointegration import gh_test
from longrun.montecarlo import (
    DGP_KINDS,
    DgpSpec,
    ReplicationSummary,
    simulate_critical_values,
    size_power_study,
    substream,
)
from longrun.montecarlo import generate
from longrun.series import MonthIndex, TimeSeries

START = MonthIndex(2002, 7)


class TestSubstream:
    def test_same_rep_is_identical(self):
        a = substream(99, 7).standard_normal(16)
        b = substream(99, 7).standard_normal(16)
        np.testing.assert_array_equal(a, b)

    def test_different_reps_differ(self):
        a = substream(99, 7).standard_normal(16)
        b = substream(99, 8).standard_normal(16)
        assert not np.array_equal(a, b)

    def test_different_masters_differ(self):
        a = substream(99, 7).standard_normal(16)
        b = substream(100, 7).standard_normal(16)
        assert not np.array_equal(a, b)

    def test_streams_look_independent(self):
        draws = np.stack([substream(5, r).standard_normal(4000) for r in range(4)])
        corr = np.corrcoef(draws)
        off = corr[~np.eye(4, dtype=bool)]
        assert np.max(np.abs(off)) < 0.06


class TestDgpSpec:
    def test_kinds_catalogued(self):
        assert set(DGP_KINDS) == {
            "random_walks_null",
            "cointegrated_with_break",
            "ucsv_dgp",
            "stable_regression",
            "var_diff",
        }

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            DgpSpec("brownian_sheet", 100)

    def test_tiny_n_rejected(self):
        with pytest.raises(ValueError):
            DgpSpec("random_walks_null", 0)


class TestGenerate:
    def test_deterministic_per_substream(self):
        spec = DgpSpec("cointegrated_with_break", 120, {"m": 2, "slope_shift": 1.0})
        a = generate(spec, substream(3, 0))
        b = generate(spec, substream(3, 0))
        np.testing.assert_array_equal(a["y"], b["y"])
        np.testing.assert_array_equal(a["x"], b["x"])

    def test_random_walks_shapes(self, rng):
        d = generate(DgpSpec("random_walks_null", 80, {"m": 3}), rng)
        assert d["y"].shape == (80,)
        assert d["x"].shape == (80, 3)

    def test_break_dgp_zero_noise_is_exact(self, rng):
        spec = DgpSpec(
            "cointegrated_with_break",
            60,
            {
                "m": 1, "theta": 2.0, "slope_shift": 1.0, "intercept": 1.0,
                "intercept_shift": 3.0, "break_frac": 0.5, "noise_sd": 0.0,
            },
        )
        d = generate(spec, rng)
        b = d["break_position"]
        assert b == 30
        x = d["x"][:, 0]
        pre = 1.0 + 2.0 * x[:b]
        post = 4.0 + 3.0 * x[b:]
        np.testing.assert_allclose(d["y"][:b], pre, atol=1e-12)
        np.testing.assert_allclose(d["y"][b:], post, atol=1e-12)

    def test_break_dgp_phi_pattern(self, rng):
        d = generate(
            DgpSpec("cointegrated_with_break", 100, {"break_frac": 0.25}), rng
        )
        assert d["phi"][:25].sum() == 0.0
        assert d["phi"][25:].sum() == 75.0

    def test_break_frac_validated(self, rng):
        with pytest.raises(ValueError, match="break_frac"):
            generate(
                DgpSpec("cointegrated_with_break", 100, {"break_frac": 1.5}), rng
            )

    def test_stable_regression_step(self, rng):
        spec = DgpSpec(
            "stable_regression",
            40,
            {"k": 2, "coef_step": 5.0, "step_frac": 0.5, "noise_sd": 0.0},
        )
        d = generate(spec, rng)
        fitted_pre = d["X"][:20] @ d["beta"]
        np.testing.assert_allclose(d["y"][:20], fitted_pre, atol=1e-12)
        np.testing.assert_allclose(
            d["y"][20:], d["X"][20:] @ (d["beta"] + np.array([5.0, 0.0])), atol=1e-12
        )

    def test_var_diff_radius_and_integration(self, rng):
        d = generate(DgpSpec("var_diff", 150, {"k": 3, "radius": 0.7}), rng)
        assert abs(np.max(np.abs(np.linalg.eigvals(d["A"]))) - 0.7) < 1e-10
        np.testing.assert_allclose(
            np.cumsum(d["diffs"], axis=0), d["levels"], atol=1e-10
        )

    def test_ucsv_dgp_keys(self, rng):
        d = generate(DgpSpec("ucsv_dgp", 60), rng)
        assert set(d) == {"pi", "tau", "sigma_eta", "sigma_eps"}
        assert d["pi"].shape == (60,)


class TestSimulateCriticalValues:
    def test_levels_are_nested(self):
        tab = simulate_critical_values("LS", m=1, n=60, reps=150, seed=1)
        for stat in ("ADF", "Zt", "Za"):
            assert tab.cv(stat, 1) <= tab.cv(stat, 5) <= tab.cv(stat, 10)

    def test_chunked_equals_serial(self):
        a = simulate_critical_values("LS", m=1, n=60, reps=120, seed=2)
        b = simulate_critical_values("LS", m=1, n=60, reps=120, seed=2, n_jobs=2)
        for stat in ("ADF", "Zt", "Za"):
            for lv in (1, 5, 10):
                assert a.cv(stat, lv) == b.cv(stat, lv)

    def test_samples_reproduce_quantiles(self):
        tab = simulate_critical_values(
            "LS", m=1, n=60, reps=150, seed=3, keep_samples=True
        )
        for stat in ("ADF", "Zt", "Za"):
            q = np.quantile(tab.samples[stat], 0.05)
            assert abs(q - tab.cv(stat, 5)) < 1e-12

    def test_one_replication_matches_public_test(self):
        # the batch engine must agree with gh_test on the same draw
        tab_seed = 4
        rng = substream(tab_seed, 0)
        n, m = 80, 2
        y = np.cumsum(rng.standard_normal(n))
        x = np.cumsum(rng.standard_normal((n, m)), axis=0)
        res = gh_test(
            TimeSeries("y", START, y),
            [TimeSeries(f"x{j}", START, x[:, j]) for j in range(m)],
            model="RS",
        )
        tab = simulate_critical_values(
            "RS", m=m, n=n, reps=100, seed=tab_seed, keep_samples=True
        )
        assert abs(tab.samples["ADF"][0] - res.stat("ADF")) < 1e-10
        assert abs(tab.samples["Zt"][0] - res.stat("Zt")) < 1e-10
        assert abs(tab.samples["Za"][0] - res.stat("Za")) < 1e-10

    def test_validation(self):
        with pytest.raises(ValueError, match="model"):
            simulate_critical_values("XX", m=1, n=60, reps=150, seed=1)
        with pytest.raises(ValueError, match="reps"):
            simulate_critical_values("LS", m=1, n=60, reps=50, seed=1)
        with pytest.raises(ValueError, match="m"):
            simulate_critical_values("LS", m=0, n=60, reps=150, seed=1)

    def test_metadata_echo(self):
        tab = simulate_critical_values("LST", m=1, n=60, reps=120, seed=9)
        assert (tab.model, tab.m, tab.n, tab.reps, tab.seed) == ("LST", 1, 60, 120, 9)
        assert tab.levels == (1, 5, 10)


class TestSizePowerStudy:
    def test_rates_and_determinism(self):
        null = DgpSpec("stable_regression", 50, {"k": 2})
        alt = DgpSpec("stable_regression", 50, {"k": 2, "coef_step": 8.0})

        def test_fn(data):
            # reject when the second-half mean prediction error is large
            resid = data["y"] - data["X"] @ data["beta"]
            return abs(resid[25:].mean()) > 0.5

        s1, p1 = size_power_study(null, alt, test_fn, reps=60, seed=12)
        s2, p2 = size_power_study(null, alt, test_fn, reps=60, seed=12)
        assert s1.events == s2.events and p1.events == p2.events
        assert s1.rate < p1.rate
        assert 0.0 <= s1.rate <= 1.0

    def test_null_only(self):
        null = DgpSpec("random_walks_null", 40)
        summary, power = size_power_study(null, None, lambda d: True, reps=10, seed=1)
        assert power is None
        assert summary.rate == 1.0

    def test_disjoint_substreams(self):
        # the alternative study must not reuse the null replications
        seen = []
        null = DgpSpec("random_walks_null", 30)

        def capture(data):
            seen.append(data["y"][0])
            return False

        size_power_study(null, null, capture, reps=5, seed=77)
        assert len(set(np.round(seen, 12))) == len(seen)

    def test_summary_rate(self):
        s = ReplicationSummary(
            spec=DgpSpec("random_walks_null", 30), reps=200, seed=1, events=17
        )
        assert s.rate == 17 / 200
