from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longrun.series import (
    AlignmentError,
    MonthIndex,
    TimeSeries,
    align,
    diff,
    log_level,
    window,
    yoy_growth,
)


def mk(values, start=MonthIndex(2002, 7), id="s"):
    return TimeSeries(id, start, np.asarray(values, dtype=float))


class TestMonthIndex:
    def test_parse_and_format_round_trip(self):
        m = MonthIndex.parse("2002-07")
        assert m == MonthIndex(2002, 7)
        assert str(m) == "2002-07"
        assert m.label == "2002M7"
        assert MonthIndex.parse("2009M12").label == "2009M12"

    def test_rejects_bad_month(self):
        with pytest.raises(ValueError):
            MonthIndex(2002, 13)
        with pytest.raises(ValueError):
            MonthIndex.parse("2002/07")

    def test_shift_crosses_year_boundary(self):
        assert MonthIndex(2002, 7).shift(6) == MonthIndex(2003, 1)
        assert MonthIndex(2002, 1).shift(-1) == MonthIndex(2001, 12)

    def test_ordering_follows_calendar(self):
        assert MonthIndex(2001, 12) < MonthIndex(2002, 1)

    @given(
        y=st.integers(min_value=1900, max_value=2100),
        m=st.integers(min_value=1, max_value=12),
        k=st.integers(min_value=-600, max_value=600),
    )
    def test_shift_and_months_since_are_inverse(self, y, m, k):
        base = MonthIndex(y, m)
        assert base.shift(k).months_since(base) == k


class TestTimeSeries:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="2002-09"):
            mk([1.0, 2.0, np.nan])

    def test_values_are_read_only(self):
        s = mk([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_end_and_month_at(self):
        s = mk([1.0, 2.0, 3.0])
        assert s.end == MonthIndex(2002, 9)
        assert s.month_at(-1) == s.end


class TestTransforms:
    def test_yoy_of_constant_level_is_zero(self):
        s = mk(np.full(36, 100.0))
        g = yoy_growth(s)
        assert g.start == MonthIndex(2003, 7)
        assert len(g) == 24
        assert np.allclose(g.values, 0.0)

    def test_yoy_of_steady_monthly_growth(self):
        # s_t = 100 * 1.002^t compounds to the same 12-month rate everywhere
        t = np.arange(40)
        g = yoy_growth(mk(100.0 * 1.002**t))
        expected = 100.0 * (math.pow(1.002, 12) - 1.0)
        assert np.allclose(g.values, expected, atol=1e-9)

    def test_mom_annualized_mode(self):
        t = np.arange(10)
        g = yoy_growth(mk(100.0 * 1.002**t), mode="mom_annualized")
        assert g.start == MonthIndex(2002, 8)
        assert np.allclose(g.values, 100.0 * (1.002**12 - 1.0))

    def test_yoy_needs_more_than_a_year(self):
        with pytest.raises(ValueError, match="12"):
            yoy_growth(mk(np.ones(12)))

    def test_diff_of_linear_ramp_is_constant(self):
        d = diff(mk(np.arange(1.0, 11.0)))
        assert len(d) == 9
        assert d.start == MonthIndex(2002, 8)
        assert np.allclose(d.values, 1.0)

    def test_log_rejects_non_positive_and_names_month(self):
        with pytest.raises(ValueError, match="2002-08"):
            log_level(mk([1.0, 0.0, 2.0]))

    def test_log_of_product_is_sum_of_logs(self, rng):
        a = np.exp(rng.normal(size=30))
        b = np.exp(rng.normal(size=30))
        lhs = log_level(mk(a * b)).values
        rhs = log_level(mk(a)).values + log_level(mk(b)).values
        assert np.allclose(lhs, rhs, atol=1e-12)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=200))
    @settings(max_examples=50)
    def test_diff_cumsum_round_trip(self, values):
        s = mk(values)
        rebuilt = s.values[0] + np.concatenate([[0.0], np.cumsum(diff(s).values)])
        assert np.allclose(rebuilt, s.values, atol=1e-6)


class TestAlign:
    def test_intersection_window(self):
        a = mk(np.arange(24.0), start=MonthIndex(2002, 1), id="a")
        b = mk(np.arange(24.0), start=MonthIndex(2002, 7), id="b")
        out = align([a, b])
        assert all(s.start == MonthIndex(2002, 7) for s in out)
        assert all(s.end == MonthIndex(2003, 12) for s in out)
        assert out[0].values[0] == 6.0

    def test_disjoint_windows_raise(self):
        a = mk(np.ones(6), start=MonthIndex(2001, 1), id="a")
        b = mk(np.ones(6), start=MonthIndex(2002, 1), id="b")
        with pytest.raises(AlignmentError, match="no common window"):
            align([a, b])

    def test_align_is_idempotent(self, rng):
        a = mk(rng.normal(size=20), start=MonthIndex(2002, 1), id="a")
        b = mk(rng.normal(size=30), start=MonthIndex(2001, 7), id="b")
        once = align([a, b])
        twice = align(once)
        for s1, s2 in zip(once, twice):
            assert s1.start == s2.start
            assert np.array_equal(s1.values, s2.values)

    def test_window_outside_span_raises(self):
        s = mk(np.ones(12))
        with pytest.raises(AlignmentError):
            window(s, MonthIndex(2001, 1), MonthIndex(2002, 8))
