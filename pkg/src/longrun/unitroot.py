"""Unit-root tests for level series: augmented Dickey-Fuller and
Phillips-Perron.

Both tests share their long-run variance and lag-length conventions
with the cointegration module, so a statistic computed here and one
computed on regression residuals there are directly comparable.
Critical values come from the MacKinnon response surface, evaluated at
the effective sample size of the final test regression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cointegration import (
    bartlett_bandwidth,
    default_adf_max_lags,
    long_run_variance,
    ols,
)
from .series import TimeSeries

__all__ = [
    "UnitRootResult",
    "adf_test",
    "pp_test",
    "mackinnon_critical_values",
]

# Response-surface coefficients for the Dickey-Fuller t distribution:
# cv(N) = b0 + b1/N + b2/N^2 + b3/N^3, keyed by deterministic spec and
# level in percent.  "c" is constant only, "ct" constant plus trend.
_MACKINNON = {
    "c": {
        1: (-3.43035, -6.5393, -16.786, -79.433),
        5: (-2.86154, -2.8903, -4.234, -40.040),
        10: (-2.56677, -1.5384, -2.809, 0.0),
    },
    "ct": {
        1: (-3.95877, -9.0531, -28.428, -134.155),
        5: (-3.41049, -4.3904, -9.036, -45.374),
        10: (-3.12705, -2.5856, -3.925, -22.380),
    },
}


def mackinnon_critical_values(spec: str, nobs: int) -> dict[int, float]:
    """Dickey-Fuller critical values at an effective sample size."""
    if spec not in _MACKINNON:
        raise ValueError(f"unknown deterministic spec {spec!r}, expected 'c' or 'ct'")
    if nobs < 10:
        raise ValueError(f"effective sample too small: {nobs}")
    out = {}
    for level, (b0, b1, b2, b3) in _MACKINNON[spec].items():
        out[level] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return out


@dataclass(frozen=True)
class UnitRootResult:
    """Outcome of one unit-root test on one series."""

    series_id: str
    test: str
    spec: str
    stat: float
    lags: int
    nobs: int
    critical_values: dict[int, float]

    @property
    def reject_at(self) -> int | None:
        """Tightest conventional level (1, 5, 10) at which the null is
        rejected, or None."""
        for level in (1, 5, 10):
            if self.stat < self.critical_values[level]:
                return level
        return None

    @property
    def stars(self) -> str:
        return {1: "***", 5: "**", 10: "*", None: ""}[self.reject_at]


def _det_columns(n_rows: int, offset: int, spec: str) -> list[np.ndarray]:
    cols = [np.ones(n_rows)]
    if spec == "ct":
        cols.append(np.arange(offset + 1.0, offset + n_rows + 1.0))
    return cols


def adf_test(
    s: TimeSeries,
    spec: str = "c",
    lags: int | None = None,
    max_lags: int | None = None,
    method: str = "aic",
) -> UnitRootResult:
    """Augmented Dickey-Fuller test with constant ('c') or constant plus
    trend ('ct').

    When ``lags`` is not supplied the order is chosen over 0..max_lags
    on a common sample by ``method`` ('aic', the usual software default,
    or 'bic'), and the statistic is re-estimated on the longest sample
    available at the chosen order.  The residual-based test inside the
    cointegration module keeps its own BIC rule.
    """
    if spec not in ("c", "ct"):
        raise ValueError(f"unknown deterministic spec {spec!r}, expected 'c' or 'ct'")
    if method not in ("aic", "bic"):
        raise ValueError(f"unknown selection method {method!r}, expected 'aic' or 'bic'")
    y = s.values
    n = len(s)
    if n < 30:
        raise ValueError(f"series {s.id!r} too short for ADF: n={n}")
    kmax = default_adf_max_lags(n) if max_lags is None else max_lags
    if lags is not None and lags < 0:
        raise ValueError("lags must be non-negative")
    ndet = 2 if spec == "ct" else 1
    need = (lags if lags is not None else kmax) + ndet + 9
    if n - 1 <= need:
        raise ValueError(f"series {s.id!r} too short for ADF with up to {kmax} lags: n={n}")

    dy = np.diff(y)

    if lags is None:
        nsel = n - 1 - kmax
        ysel = dy[kmax:]
        cols = [y[kmax : n - 1]]
        for j in range(1, kmax + 1):
            cols.append(dy[kmax - j : n - 1 - j])
        cols.extend(_det_columns(nsel, kmax + 1, spec))
        D = np.column_stack(cols)
        # orthogonalize so that nested models are column prefixes of
        # [det..., level, dlag1..dlagK]
        order = list(range(kmax + 1, kmax + 1 + ndet)) + list(range(kmax + 1))
        Q, _ = np.linalg.qr(D[:, order])
        qty = Q.T @ ysel
        yty = float(ysel @ ysel)
        ssr_prefix = yty - np.cumsum(qty**2)
        ssr = np.maximum(ssr_prefix[ndet:], 1e-300)
        ks = np.arange(kmax + 1)
        penalty = 2.0 if method == "aic" else math.log(nsel)
        crit = nsel * np.log(ssr / nsel) + (ks + 1 + ndet) * penalty
        lags = int(np.argmin(crit))

    rows = n - 1 - lags
    yk = dy[lags:]
    cols = [y[lags : n - 1]]
    names = ["level"]
    for j in range(1, lags + 1):
        cols.append(dy[lags - j : n - 1 - j])
        names.append(f"dlag{j}")
    cols.extend(_det_columns(rows, lags + 1, spec))
    names.append("const")
    if spec == "ct":
        names.append("trend")
    fit = ols(yk, np.column_stack(cols), names=tuple(names))
    stat = float(fit.tstats[0])
    return UnitRootResult(
        series_id=s.id, test="ADF", spec=spec, stat=stat, lags=lags, nobs=rows,
        critical_values=mackinnon_critical_values(spec, rows),
    )


def pp_test(
    s: TimeSeries,
    spec: str = "c",
    bandwidth: int | None = None,
) -> UnitRootResult:
    """Phillips-Perron Z_t test with constant ('c') or constant plus
    trend ('ct').

    Runs the first-order autoregression with deterministic terms, then
    corrects the t-statistic with a Bartlett-kernel long-run variance of
    the residuals (same kernel and default bandwidth as the
    cointegration statistics):

        Z_t = sqrt(g0/s2lr) * t_rho
              - (s2lr - g0) * n * se(rho) / (2 * sqrt(s2lr) * s)
    """
    if spec not in ("c", "ct"):
        raise ValueError(f"unknown deterministic spec {spec!r}, expected 'c' or 'ct'")
    y = s.values
    n = len(s)
    if n < 25:
        raise ValueError(f"series {s.id!r} too short for PP: n={n}")
    rows = n - 1
    cols = [y[:-1]] + _det_columns(rows, 1, spec)
    names = ("level", "const") if spec == "c" else ("level", "const", "trend")
    fit = ols(y[1:], np.column_stack(cols), names=names)

    bw = bartlett_bandwidth(rows) if bandwidth is None else bandwidth
    gamma0, _, s2lr = long_run_variance(fit.resid, bw)
    rho, se_rho = float(fit.beta[0]), float(fit.se[0])
    t_rho = (rho - 1.0) / se_rho
    s_reg = math.sqrt(fit.sigma2)
    stat = (
        math.sqrt(gamma0 / s2lr) * t_rho
        - (s2lr - gamma0) * rows * se_rho / (2.0 * math.sqrt(s2lr) * s_reg)
    )
    return UnitRootResult(
        series_id=s.id, test="PP", spec=spec, stat=stat, lags=bw, nobs=rows,
        critical_values=mackinnon_critical_values(spec, rows),
    )
