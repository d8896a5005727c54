"""Parameter-stability diagnostics built on recursive residuals.

The cumulative-sum test tracks the scaled running sum of standardized
one-step-ahead forecast errors; under a stable model the path wanders
inside a pair of straight lines, and a coefficient shift pushes it out.
The cumulative-sum-of-squares test tracks the running share of the
squared residual total; it reacts to variance shifts.  Both emit
plot-ready paths with their bounds so a report can chart them directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cointegration import SingularDesignError

__all__ = [
    "CusumPath",
    "recursive_residuals",
    "cusum",
    "cusum_sq",
]

# Straight-line half-width scale for the cumulative-sum band, by
# significance level (percent).
_CUSUM_A = {1: 1.143, 5: 0.948, 10: 0.850}

# Half-width of the squared-sum band by g = n - k, simulated exactly
# under the null (see demos/calibrate_cusum_sq_bounds.py: 300000
# replications per grid point, seed 20260401).  The band is symmetric
# about the diagonal and calibrated so the familywise probability of
# any crossing equals the level.
_CUSUM_SQ_GRID = np.array(
    [10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 125, 150, 175, 200, 250, 300, 400, 500],
    dtype=float,
)
_CUSUM_SQ_C0 = {
    1: np.array([
        0.57279, 0.49541, 0.44549, 0.40462, 0.37586, 0.33125, 0.29885,
        0.27696, 0.24311, 0.21788, 0.19666, 0.17977, 0.16687, 0.15693,
        0.14069, 0.12887, 0.11204, 0.10054,
    ]),
    5: np.array([
        0.47355, 0.41026, 0.36676, 0.33476, 0.31052, 0.27370, 0.24734,
        0.22862, 0.20059, 0.18072, 0.16283, 0.14913, 0.13881, 0.13048,
        0.11708, 0.10695, 0.09319, 0.08365,
    ]),
    10: np.array([
        0.42261, 0.36612, 0.32725, 0.29891, 0.27726, 0.24488, 0.22145,
        0.20453, 0.17936, 0.16185, 0.14593, 0.13375, 0.12451, 0.11699,
        0.10521, 0.09613, 0.08375, 0.07515,
    ]),
}


@dataclass(frozen=True)
class CusumPath:
    """A stability-test path with its significance band.

    ``r`` indexes observations k+1..n; ``breached`` is true when any
    path value leaves [lower, upper], and ``first_breach`` is the first
    such r (None when the path stays inside).
    """

    kind: str
    level: int
    r: np.ndarray
    statistics: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    breached: bool
    first_breach: int | None


def recursive_residuals(y: np.ndarray, design: np.ndarray) -> np.ndarray:
    """Standardized one-step-ahead forecast errors.

    Starting from the first k rows, each subsequent observation is
    predicted from the coefficients fitted to everything before it:

        w_r = (y_r - x_r' b_{r-1}) / sqrt(1 + x_r' (X'X)^{-1}_{r-1} x_r)

    for r = k+1..n, with the inverse Gram matrix updated by rank-one
    steps.  Under a correct homoskedastic model the w are iid with the
    error variance.
    """
    y = np.asarray(y, dtype=float)
    X = np.atleast_2d(np.asarray(design, dtype=float))
    n, k = X.shape
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if n <= k:
        raise ValueError(f"need more observations than regressors: n={n}, k={k}")

    X0 = X[:k]
    gram = X0.T @ X0
    if np.linalg.matrix_rank(X0) < k:
        raise SingularDesignError(
            f"initial {k}-row block of the design is singular"
        )
    P = np.linalg.inv(gram)
    beta = P @ (X0.T @ y[:k])

    w = np.empty(n - k)
    for r in range(k, n):
        x = X[r]
        Px = P @ x
        denom = 1.0 + float(x @ Px)
        err = y[r] - float(x @ beta)
        w[r - k] = err / np.sqrt(denom)
        gain = Px / denom
        beta = beta + gain * err
        P = P - np.outer(gain, Px)
    return w


def _band_level(level: int, table: dict) -> None:
    if level not in table:
        raise ValueError(
            f"no band tabulated at the {level}% level; choose from {sorted(table)}"
        )


def cusum(w: np.ndarray, k: int, n: int, level: int = 5) -> CusumPath:
    """Cumulative-sum path of the standardized recursive residuals.

    The path is Sum_{j<=r} w_j divided by the sample standard deviation
    of w (denominator n - k - 1); the band is the usual pair of straight
    lines +-a [sqrt(n-k) + 2 (r-k)/sqrt(n-k)].
    """
    w = np.asarray(w, dtype=float)
    _band_level(level, _CUSUM_A)
    if w.shape != (n - k,):
        raise ValueError(f"w has shape {w.shape}, expected ({n - k},)")

    sd = float(np.std(w, ddof=1))
    path = np.cumsum(w) / sd if sd > 0 else np.zeros(n - k)
    r = np.arange(k + 1, n + 1)
    g = n - k
    half = _CUSUM_A[level] * (np.sqrt(g) + 2.0 * (r - k) / np.sqrt(g))
    return _assemble("cusum", level, r, path, -half, half)


def cusum_sq(w: np.ndarray, k: int, n: int, level: int = 5) -> CusumPath:
    """Cumulative share of squared recursive residuals.

    The path is Sum_{j<=r} w_j^2 / Sum_{j<=n} w_j^2, nondecreasing from
    near 0 to exactly 1; the band is the diagonal (r-k)/(n-k) plus and
    minus a half-width interpolated from the embedded simulated table.
    """
    w = np.asarray(w, dtype=float)
    _band_level(level, _CUSUM_SQ_C0)
    if w.shape != (n - k,):
        raise ValueError(f"w has shape {w.shape}, expected ({n - k},)")

    total = float(np.sum(w * w))
    if total <= 0.0:
        raise ValueError("all recursive residuals are zero; the squared-sum "
                         "path is undefined")
    path = np.cumsum(w * w) / total
    r = np.arange(k + 1, n + 1)
    g = n - k
    c0 = _interp_c0(g, level)
    mean_line = (r - k) / g
    return _assemble("cusum_sq", level, r, path, mean_line - c0, mean_line + c0)


def _interp_c0(g: int, level: int) -> float:
    grid = _CUSUM_SQ_GRID
    vals = _CUSUM_SQ_C0[level]
    if g < grid[0]:
        raise ValueError(f"band tabulated for n - k >= {int(grid[0])}, got {g}")
    if g > grid[-1]:
        # beyond the grid the half-width shrinks like 1/sqrt(g)
        return float(vals[-1] * np.sqrt(grid[-1] / g))
    return float(np.interp(g, grid, vals))


def _assemble(
    kind: str,
    level: int,
    r: np.ndarray,
    path: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
) -> CusumPath:
    outside = (path < lower) | (path > upper)
    breached = bool(outside.any())
    first = int(r[np.argmax(outside)]) if breached else None
    return CusumPath(
        kind=kind, level=level, r=r, statistics=path,
        lower=lower, upper=upper, breached=breached, first_breach=first,
    )
