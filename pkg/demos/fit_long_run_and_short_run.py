"""Fit the long-run level equation with a break dummy, test restrictions
on it, and model the short-run dynamics, using the bundled demo dataset.

For a cointegrated index the long-run equation relates the log index to
inflation and inflation uncertainty with the break the test located;
an error-correction regression then shows how fast monthly changes pull
back toward that equilibrium.  For an index with no cointegration the
fallback is a VAR in first differences, whose companion-matrix spectral
radius certifies stability.

The dataset under data/demo is synthetic (10 sector-style indexes over
160 months) but ingested exactly as user data would be: a manifest maps
ids to CSV files and transforms, and materialization aligns and windows
everything jointly.

Run from the repository root (about 10 seconds, most of it the
uncertainty sampler):

    python3 demos/fit_long_run_and_short_run.py
"""

from __future__ import annotations

import numpy as np

from longrun.cointegration import (
    GH_MODELS,
    decide,
    fit_break_regression,
    gh_critical_values,
    gh_test,
    wald_test,
)
from longrun.dynamics import fit_ecm, fit_var_diff
from longrun.ingest import materialize, read_manifest
from longrun.ucsv import UcsvConfig, estimate_ucsv, uncertainty_series


def main() -> None:
    manifest = read_manifest("data/demo/manifest.toml")
    data = materialize(manifest, base_dir="data/demo")
    i = data["I"]
    ip = data["IP"]
    print(f"dataset: {len(manifest.entries)} series on {i.start}..{i.end} "
          f"({len(i)} months)")

    # same sampler settings as data/demo/pipeline.toml, so the series U
    # (and everything downstream) matches the committed demo artifacts;
    # the manifest also carries output growth (IP), which the pipeline
    # adds to every design when with_output is enabled
    post = estimate_ucsv(i, UcsvConfig(gamma=0.04, n_draws=30000, burn_in=3000,
                                       seed=20260814))
    u = uncertainty_series(post)
    xs = [i, u]

    # --- a cointegrated index: long-run fit, Wald test, error correction
    y = data["idx_financial"]
    results = [gh_test(y, xs, model) for model in GH_MODELS]
    decision = decide(results, level=10, min_statistics=2)
    print(f"\n{y.id}: rejections {decision.rejections} -> "
          f"cointegrated={decision.cointegrated}")
    best = min(
        (r for r in results if r.model in decision.passing_models),
        key=lambda r: r.zt_stat - gh_critical_values(r.model, r.m).cv("Zt", 10),
    )
    print(f"best-supported model {best.model}, break at {best.zt_break}")

    fit = fit_break_regression(y, xs, best.model, best.zt_break)
    print(f"\nlong-run equation (R^2 {fit.r_squared:.4f}):")
    for name, b, se, t in zip(fit.names, fit.beta, fit.se, fit.tstats):
        print(f"  {name:<8} {b:10.4f}  se {se:8.4f}  t {t:8.2f}")
    print("negative loadings on I and U say inflation and its uncertainty")
    print("both depress this index in the long run")

    R = np.zeros((1, len(fit.names)))
    R[0, fit.names.index("break")] = 1.0
    w = wald_test(fit, R, 0.0)
    print(f"Wald test of a zero break intercept: chi2({w.df}) = {w.stat:.1f}, "
          f"p = {w.pvalue:.2e}")

    ecm = fit_ecm(y, i, u, fit.resid)
    est, se, t = ecm.coefficient("ecm_lag1")
    print(f"\nerror-correction regression for d_{y.id} "
          f"(R^2 {ecm.r_squared:.4f}, n {ecm.nobs}):")
    for name, b, s_, t_ in zip(ecm.names, ecm.beta, ecm.se, ecm.tstats):
        print(f"  {name:<10} {b:10.4f}  se {s_:8.4f}  t {t_:8.2f}")
    print(f"the loading {est:.3f} on the lagged equilibrium error means about "
          f"{abs(est) * 100:.0f}%")
    print("of any deviation from the long-run equation unwinds within a month")

    ecm_ip = fit_ecm(y, i, u, fit.resid, ip=ip)
    est_ip = ecm_ip.coefficient("ecm_lag1")[0]
    d_ip = ecm_ip.coefficient(f"d_{ip.id}")
    print(f"adding output growth (the pipeline's with_output option) leaves the")
    print(f"story intact: ecm_lag1 {est_ip:.3f}, d_{ip.id} {d_ip[0]:.4f} "
          f"(t {d_ip[2]:.2f})")

    # --- a non-cointegrated index: VAR in first differences
    y2 = data["idx_tech"]
    results2 = [gh_test(y2, xs, model) for model in GH_MODELS]
    decision2 = decide(results2, level=10, min_statistics=2)
    print(f"\n{y2.id}: rejections {decision2.rejections} -> "
          f"cointegrated={decision2.cointegrated}")
    var = fit_var_diff([y2] + xs, p=2)
    print(f"VAR(2) in differences: variables {var.names}, n {var.nobs}")
    print(f"spectral radius {var.spectral_radius:.4f} -> "
          f"{'stable' if var.stable else 'explosive'}")
    own = var.coef[0][0, 0], var.coef[1][0, 0]
    print(f"own-lag loadings of d_{y2.id}: lag1 {own[0]:.4f}, lag2 {own[1]:.4f}")


if __name__ == "__main__":
    main()
