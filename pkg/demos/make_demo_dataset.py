"""Generate the synthetic stock-index demo dataset.

Sector index data from commercial providers cannot be redistributed, so
the repository ships synthetic monthly levels with the same shape as
the study sample: ten sector indexes over 2002-07..2015-10 (160
months), plus a synthetic industrial-production level.

Six indexes are built to be cointegrated with year-on-year inflation
and its uncertainty (posterior gap volatility from the trend extractor
run on the committed CPI snapshot), with level or slope shifts placed
around the 2008 crisis for several of them; the remaining four are
independent random walks, so both branches of the pipeline
(error-correction vs. first-differenced VAR) get exercised.

Each index draws from its own seeded substream and is screened before
being written, under three uncertainty paths: the one the committed
pipeline configuration will extract (its seed is fixed, so this is
the exact regressor the demo report uses) plus two independent paths,
so the outcome is also robust if someone edits the seed:

* the pooled break-test decision must match the construction with a
  margin on every critical value (a small share of independent random
  walks would otherwise land in the rejection tail);
* levels must look integrated, as index levels do in monthly data: no
  ADF rejection at 10 percent for anyone; no PP rejection at 10
  percent for the random walks and none at 1 percent for the
  cointegrated indexes (year-on-year growth has moving-average
  dynamics that the kernel correction in the PP test absorbs poorly,
  so series tied to it inherit a mildly left-shifted PP statistic and
  an occasional marginal star is unavoidable);
* for the cointegrated indexes, the break model the pipeline would
  select (deepest Zt exceedance below its own 10 percent critical
  value among the robustly rejecting models) must recover clearly
  negative inflation and uncertainty loadings when its long-run
  equation is fit at the detected break, so the demo report
  reproduces the intended long-run signs.

Rerunning this script reproduces the committed files byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from longrun.cointegration import (
    GH_MODELS,
    fit_break_regression,
    gh_critical_values,
    gh_test,
)
from longrun.ingest import load_csv, save_csv
from longrun.montecarlo import substream
from longrun.series import MonthIndex, TimeSeries, window, yoy_growth
from longrun.ucsv import UcsvConfig, estimate_ucsv, uncertainty_series
from longrun.unitroot import adf_test, pp_test

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "demo"

START = MonthIndex(2002, 7)
END = MonthIndex(2015, 10)
SEED = 20260814
MAX_ATTEMPTS = 200

# name, cointegrated?, inflation loading, uncertainty loading,
# break kind (none | intercept | slope), break month,
# post-break slope change as a fraction of the inflation loading
SPECS = [
    ("idx_basicmat", True, -0.060, -4.0, "intercept", MonthIndex(2008, 9), 0.0),
    ("idx_energy", True, -0.048, -4.5, "slope", MonthIndex(2008, 6), 0.5),
    ("idx_financial", True, -0.080, -5.0, "intercept", MonthIndex(2008, 11), 0.0),
    ("idx_industrial", True, -0.040, -4.0, "slope", MonthIndex(2011, 3), 1.0),
    ("idx_consumergd", True, -0.056, -3.0, "none", None, 0.0),
    ("idx_utilities", True, -0.030, -3.5, "intercept", MonthIndex(2011, 8), 0.0),
    ("idx_tech", False, 0.0, 0.0, "none", None, 0.0),
    ("idx_telecom", False, 0.0, 0.0, "none", None, 0.0),
    ("idx_healthcare", False, 0.0, 0.0, "none", None, 0.0),
    ("idx_consumersv", False, 0.0, 0.0, "none", None, 0.0),
]

# slack applied to critical values and t-statistics during screening;
# the uncertainty regressor is a posterior mean, so statistics move by
# a few hundredths when the pipeline reruns the extractor under its own
# seed, and no committed draw may sit close enough to a threshold for
# that wiggle to flip an outcome
MARGIN_T = 0.20
MARGIN_ZA = 3.0


def ar1(rng: np.random.Generator, n: int, rho: float, sd: float) -> np.ndarray:
    u = np.zeros(n)
    e = sd * rng.standard_normal(n)
    u[0] = e[0] / np.sqrt(1.0 - rho * rho)
    for t in range(1, n):
        u[t] = rho * u[t - 1] + e[t]
    return u


def build_values(
    rng: np.random.Generator,
    spec: tuple,
    infl: TimeSeries,
    unc: TimeSeries,
) -> np.ndarray:
    """Monthly index levels for one spec, rounded as committed."""
    name, coint, b_i, b_u, kind, break_month, slope_mult = spec
    n = len(infl)
    if coint:
        phi = np.zeros(n)
        if kind != "none":
            # the break dummy turns on the month after the stated
            # last pre-break month
            pos = break_month.months_since(START) + 1
            phi[pos:] = 1.0
        level_shift = -0.05 * phi if kind == "intercept" else 0.0
        slope_shift = (slope_mult * b_i * phi) if kind == "slope" else 0.0
        log_level = (
            5.6
            + (b_i + slope_shift) * infl.values
            + b_u * unc.values
            + level_shift
            + ar1(rng, n, rho=0.7, sd=0.008)
        )
    else:
        drift = 0.002 + 0.002 * rng.random()
        log_level = 5.6 + np.cumsum(drift + 0.035 * rng.standard_normal(n))
    return np.round(np.exp(log_level), 2)


def robust_classification(
    y: TimeSeries, infl: TimeSeries, unc: TimeSeries
) -> bool | None:
    """Pooled break-test decision on the log levels, or None if marginal.

    Returns True only if the decision is cointegrated even with every
    critical value deepened by the margin, False only if it is not
    cointegrated even with every critical value relaxed by the margin.
    """
    hits_tight = hits_loose = 0
    for model in GH_MODELS:
        res = gh_test(y, [infl, unc], model)
        cvs = gh_critical_values(model, res.m)
        tight = loose = 0
        for stat_name, value in (("ADF", res.adf_stat), ("Zt", res.zt_stat), ("Za", res.za_stat)):
            margin = MARGIN_ZA if stat_name == "Za" else MARGIN_T
            cv = cvs.cv(stat_name, 10)
            tight += value < cv - margin
            loose += value < cv + margin
        hits_tight = max(hits_tight, tight)
        hits_loose = max(hits_loose, loose)
    if hits_tight >= 2:
        return True
    if hits_loose < 2:
        return False
    return None


def level_looks_integrated(y: TimeSeries, coint: bool) -> bool:
    """No ADF rejection; PP held to 10 percent (random walks) or 1
    percent (series that inherit the year-on-year moving-average
    dynamics), with margin."""
    adf = adf_test(y, spec="c")
    pp = pp_test(y, spec="c")
    pp_level = 1 if coint else 10
    return (
        adf.stat > adf.critical_values[10] + 0.1
        and pp.stat > pp.critical_values[pp_level] + 0.1
    )


def signs_recovered(y: TimeSeries, infl: TimeSeries, unc: TimeSeries) -> bool:
    """The model the pipeline would select must recover clearly
    negative loadings in its long-run fit at the detected break.

    Selection mirrors the report stage: among models that robustly
    reject (two or more statistics beyond their 10 percent critical
    values, with margin), take the one whose Zt statistic sits deepest
    below its own critical value.  Models contending within 1.0 of the
    selected exceedance could become the selection under a different
    extraction seed, so their fits must at least get the signs right.
    """
    passing = []
    for model in GH_MODELS:
        res = gh_test(y, [infl, unc], model)
        cvs = gh_critical_values(model, res.m)
        hits = 0
        for stat_name, value in (("ADF", res.adf_stat), ("Zt", res.zt_stat), ("Za", res.za_stat)):
            margin = MARGIN_ZA if stat_name == "Za" else MARGIN_T
            hits += value < cvs.cv(stat_name, 10) - margin
        if hits >= 2:
            passing.append((res.zt_stat - cvs.cv("Zt", 10), res))
    if not passing:
        return False
    best_gap = min(gap for gap, _ in passing)
    for gap, res in passing:
        if gap > best_gap + 1.0:
            continue
        fit = fit_break_regression(y, [infl, unc], res.model, res.zt_break)
        strict = gap == best_gap
        for term in (infl.id, unc.id):
            i = fit.names.index(term)
            if fit.beta[i] >= 0 or (strict and fit.tstats[i] >= -2.0):
                return False
    return True


def screened(values: np.ndarray, name: str, coint: bool, infl, uncs) -> bool:
    y = TimeSeries(name, START, np.log(values))
    if not level_looks_integrated(y, coint):
        return False
    for unc in uncs:
        if robust_classification(y, infl, unc) != coint:
            return False
        if coint and not signs_recovered(y, infl, unc):
            return False
    return True


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    cpi = load_csv(ROOT / "data" / "cpi_us_monthly.csv", id="cpi")
    infl = window(yoy_growth(cpi), START, END)
    n = len(infl)
    assert n == 160

    # first path: the committed pipeline seed, so the screen covers
    # the exact regressor the demo report will use
    uncs = []
    for seed in (20260814, 11, 12):
        post = estimate_ucsv(infl, UcsvConfig(gamma=0.04, n_draws=30000, burn_in=3000, seed=seed))
        uncs.append(uncertainty_series(post))

    for k, spec in enumerate(SPECS):
        name, coint = spec[0], spec[1]
        for attempt in range(MAX_ATTEMPTS):
            rng = substream(SEED, 1000 * k + attempt)
            values = build_values(rng, spec, infl, uncs[0])
            if screened(values, name, coint, infl, uncs):
                break
        else:
            raise RuntimeError(f"{name}: no draw passed the screen in {MAX_ATTEMPTS} tries")
        save_csv(TimeSeries(name, START, values), OUT / f"{name}.csv")
        print(f"{name}: cointegrated={coint} break={spec[4]} attempt={attempt}")

    # industrial production: smooth trend with a crisis dip, positive level
    rng = substream(SEED, 99999)
    t = np.arange(n)
    dip = -0.12 * np.exp(-0.5 * ((t - 76) / 9.0) ** 2)  # trough near 2008-11
    log_ip = 4.55 + 0.0012 * t + dip + ar1(rng, n, rho=0.8, sd=0.004)
    ip_start = START.shift(-12)  # extra year so yoy growth covers the window
    pre = log_ip[0] - 0.0012 * np.arange(12, 0, -1)
    full = np.concatenate([pre, log_ip])
    save_csv(
        TimeSeries("ip_index", ip_start, np.round(np.exp(full), 3)),
        OUT / "ip_index.csv",
    )
    print("ip_index: trend with mid-sample dip")


if __name__ == "__main__":
    main()
