"""Calibrate the half-width of the cumulative-sum-of-squares band.

Under the null (correct linear model, Gaussian errors) the recursive
residuals are iid normal, so the squared-sum path is the normalized
cumulative sum of g = n - k chi-square(1) variables regardless of the
design or the noise scale.  The band statistic is the maximum absolute
deviation of that path from its diagonal mean line, and the half-width
c0 for a given significance level is the matching upper quantile of
that maximum.  This script computes c0 by direct simulation on a grid
of g; the library embeds the resulting table and interpolates.
"""

from __future__ import annotations

import numpy as np

GRID = (10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 125, 150, 175, 200, 250, 300, 400, 500)
LEVELS = (1, 5, 10)
REPS = 300_000
CHUNK = 25_000
SEED = 20260401


def max_abs_deviation(g: int, reps: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(reps)
    done = 0
    mean_line = np.arange(1, g + 1) / g
    while done < reps:
        b = min(CHUNK, reps - done)
        z = rng.standard_normal((b, g))
        s = np.cumsum(z * z, axis=1)
        s /= s[:, -1:]
        out[done : done + b] = np.max(np.abs(s - mean_line), axis=1)
        done += b
    return out


def main() -> None:
    rng = np.random.default_rng(SEED)
    print(f"# reps={REPS} seed={SEED}")
    print("g " + " ".join(f"c0_{lv}" for lv in LEVELS))
    for g in GRID:
        dev = max_abs_deviation(g, REPS, rng)
        qs = np.quantile(dev, [1.0 - lv / 100.0 for lv in LEVELS])
        print(f"{g} " + " ".join(f"{q:.5f}" for q in qs), flush=True)


if __name__ == "__main__":
    main()
