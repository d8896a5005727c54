"""Short-run models: error-correction regressions and a first-differenced
vector autoregression with companion-matrix stability verification.

The error-correction regression relates the month-on-month change of a
stock index to the lagged long-run residual (the error-correction term)
and contemporaneous changes of the inflation-side regressors.  A
negative, significant coefficient on the lagged residual indicates
adjustment back toward the long-run relation.

The VAR is estimated on first differences with a fixed lag order
(default 2), one OLS regression per equation on a common regressor
block.  Stability is judged from the companion matrix: the system is
stable when every eigenvalue modulus is below one (with a small margin
so floating-point noise cannot flip the flag).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cointegration import OlsFit, SingularDesignError, ols
from .series import AlignmentError, TimeSeries

__all__ = [
    "EcmFit",
    "VarFit",
    "fit_ecm",
    "fit_var_diff",
    "select_var_order",
    "var_stability",
]

STABILITY_MARGIN = 1e-10


def _require_same_window(series: list[TimeSeries]) -> None:
    ref = series[0]
    for s in series[1:]:
        if s.start != ref.start or len(s) != len(ref):
            raise AlignmentError(
                f"series {s.id!r} covers {s.start}..{s.month_at(len(s) - 1)} "
                f"but {ref.id!r} covers {ref.start}..{ref.month_at(len(ref) - 1)}; "
                "align the inputs first"
            )


@dataclass(frozen=True)
class EcmFit:
    """Error-correction regression output.

    ``names`` orders the regressors as the design matrix does:
    intercept, lagged error-correction term, then the contemporaneous
    differences (and their lags when lag augmentation is on).  The
    regression sample is one month shorter than the aligned input
    window because of differencing.
    """

    names: tuple[str, ...]
    beta: np.ndarray
    se: np.ndarray
    r_squared: float
    nobs: int
    dependent: str
    ols_fit: OlsFit = field(repr=False)

    @property
    def tstats(self) -> np.ndarray:
        return self.beta / self.se

    def coefficient(self, name: str) -> tuple[float, float, float]:
        """(estimate, standard error, t-statistic) for one regressor."""
        i = self.names.index(name)
        return float(self.beta[i]), float(self.se[i]), float(self.tstats[i])


def fit_ecm(
    dj: TimeSeries,
    i: TimeSeries,
    u: TimeSeries,
    ecm_resid: TimeSeries,
    ip: TimeSeries | None = None,
    extra_diff_lags: int = 0,
) -> EcmFit:
    """Regress the index change on the lagged long-run residual and
    contemporaneous regressor changes.

    ``ecm_resid`` must cover exactly the same window as the other
    inputs (it normally comes from a long-run fit on the same aligned
    sample).  ``extra_diff_lags`` optionally augments the design with
    that many lags of each difference, for sensitivity analysis; the
    default matches the baseline specification with contemporaneous
    differences only.
    """
    inputs = [dj, i, u] + ([ip] if ip is not None else []) + [ecm_resid]
    _require_same_window(inputs)
    if extra_diff_lags < 0:
        raise ValueError(f"extra_diff_lags must be >= 0, got {extra_diff_lags}")
    ids = [s.id for s in inputs[:-1]]
    if len(set(ids)) != len(ids):
        raise ValueError(f"series ids must be distinct, got {ids}")

    n = len(dj)
    drop = 1 + extra_diff_lags

    diffs = {"d_" + s.id: np.diff(s.values) for s in inputs[:-1]}
    dep_name = "d_" + dj.id
    y = diffs.pop(dep_name)[extra_diff_lags:]

    cols = [np.ones(y.size), ecm_resid.values[drop - 1 : n - 1]]
    names = ["const", "ecm_lag1"]
    for name, d in diffs.items():
        cols.append(d[extra_diff_lags:])
        names.append(name)
    for lag in range(1, extra_diff_lags + 1):
        for name, d in diffs.items():
            cols.append(d[extra_diff_lags - lag : d.size - lag])
            names.append(f"{name}_lag{lag}")

    X = np.column_stack(cols)
    if X.shape[0] < X.shape[1] + 5:
        raise ValueError(
            f"sample too short for the error-correction fit: "
            f"{X.shape[0]} rows for {X.shape[1]} regressors"
        )
    fit = ols(y, X, names=tuple(names))
    return EcmFit(
        names=tuple(names),
        beta=fit.beta,
        se=fit.se,
        r_squared=fit.r_squared,
        nobs=fit.nobs,
        dependent=dep_name,
        ols_fit=fit,
    )


@dataclass(frozen=True)
class VarFit:
    """First-differenced VAR estimates and stability diagnostics.

    ``coef[l - 1][i, j]`` is the loading of equation ``i`` on lag ``l``
    of variable ``j`` (variables ordered as ``names``); ``intercept``
    holds the per-equation constants.  ``spectral_radius`` is the
    largest companion-eigenvalue modulus.
    """

    names: tuple[str, ...]
    p: int
    intercept: np.ndarray
    coef: np.ndarray
    se_intercept: np.ndarray = field(repr=False)
    se_coef: np.ndarray = field(repr=False)
    r_squared: np.ndarray
    nobs: int
    spectral_radius: float
    stable: bool
    equation_fits: tuple[OlsFit, ...] = field(repr=False)

    def companion(self) -> np.ndarray:
        """Companion matrix of the estimated lag polynomial."""
        return _companion(self.coef)


def _companion(coef: np.ndarray) -> np.ndarray:
    p, k, _ = coef.shape
    top = np.hstack([coef[l] for l in range(p)])
    if p == 1:
        return top
    lower = np.hstack([np.eye(k * (p - 1)), np.zeros((k * (p - 1), k))])
    return np.vstack([top, lower])


def _diff_design(diffs: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked regressor block [1, lag1 of all, .., lagp of all]."""
    rows = diffs.shape[0] - p
    cols = [np.ones(rows)]
    for lag in range(1, p + 1):
        cols.append(diffs[p - lag : p - lag + rows])
    return np.column_stack(cols), diffs[p:]


def fit_var_diff(series: list[TimeSeries], p: int = 2) -> VarFit:
    """Estimate a VAR(p) on the first differences of the given series.

    All series must share a window.  Each equation is an OLS of one
    difference on ``p`` lags of every difference plus an intercept.
    """
    if len(series) < 2:
        raise ValueError(f"need at least 2 series, got {len(series)}")
    if p < 1:
        raise ValueError(f"lag order must be >= 1, got {p}")
    _require_same_window(series)
    k = len(series)
    n = len(series[0])
    if n <= k * p + 5:
        raise ValueError(
            f"need more than {k * p + 5} observations for k={k}, p={p}; got {n}"
        )

    diffs = np.column_stack([np.diff(s.values) for s in series])
    X, Y = _diff_design(diffs, p)
    col_names = ("const",) + tuple(
        f"d_{series[j].id}_lag{lag}" for lag in range(1, p + 1) for j in range(k)
    )

    fits = [ols(Y[:, i], X, names=col_names) for i in range(k)]

    intercept = np.array([f.beta[0] for f in fits])
    se_intercept = np.array([f.se[0] for f in fits])
    coef = np.empty((p, k, k))
    se_coef = np.empty((p, k, k))
    for i, f in enumerate(fits):
        coef[:, i, :] = f.beta[1:].reshape(p, k)
        se_coef[:, i, :] = f.se[1:].reshape(p, k)

    radius = float(np.max(np.abs(np.linalg.eigvals(_companion(coef)))))
    return VarFit(
        names=tuple(s.id for s in series),
        p=p,
        intercept=intercept,
        coef=coef,
        se_intercept=se_intercept,
        se_coef=se_coef,
        r_squared=np.array([f.r_squared for f in fits]),
        nobs=fits[0].nobs,
        spectral_radius=radius,
        stable=radius < 1.0 - STABILITY_MARGIN,
        equation_fits=tuple(fits),
    )


def var_stability(fit: VarFit) -> bool:
    """True when every companion eigenvalue modulus is below one."""
    return fit.spectral_radius < 1.0 - STABILITY_MARGIN


def select_var_order(series: list[TimeSeries], p_max: int = 6) -> int:
    """Lag order minimizing the multivariate BIC over 1..p_max.

    All candidate orders are scored on the common sample implied by
    ``p_max`` so the criteria are comparable.  The fixed default order
    used by :func:`fit_var_diff` is not chosen here; this selector is a
    sensitivity tool.
    """
    if p_max < 1:
        raise ValueError(f"p_max must be >= 1, got {p_max}")
    _require_same_window(series)
    k = len(series)
    diffs = np.column_stack([np.diff(s.values) for s in series])
    rows = diffs.shape[0] - p_max
    if rows <= k * p_max + 1:
        raise ValueError("sample too short for the requested p_max")

    best_p, best_bic = 1, np.inf
    for p in range(1, p_max + 1):
        cols = [np.ones(rows)]
        for lag in range(1, p + 1):
            cols.append(diffs[p_max - lag : p_max - lag + rows])
        X = np.column_stack(cols)
        Y = diffs[p_max:]
        beta, *_ = np.linalg.lstsq(X, Y, rcond=None)
        E = Y - X @ beta
        sigma = (E.T @ E) / rows
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            raise SingularDesignError("degenerate residual covariance")
        bic = logdet + np.log(rows) / rows * (p * k * k + k)
        if bic < best_bic:
            best_p, best_bic = p, bic
    return best_p
