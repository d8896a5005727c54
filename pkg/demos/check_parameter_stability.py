"""Check regression-coefficient stability with recursive residuals and
the CUSUM and CUSUM-of-squares paths.

Recursive residuals are one-step-ahead forecast errors from refitting
the regression on an expanding sample, scaled so they are iid N(0, s^2)
when the coefficients are constant.  Their cumulative sum wanders like
a driftless walk under stability and drifts out of a pair of straight
significance lines when a coefficient shifts; the cumulative share of
their squares hugs the diagonal under stability and leaves a parallel
band when the error variance shifts.

The demo runs both diagnostics on a stable regression and then on one
whose intercept jumps by five noise standard deviations halfway
through, printing where (and whether) each path leaves its band.

Run from the repository root:

    python3 demos/check_parameter_stability.py
"""

from __future__ import annotations

import numpy as np

from longrun.montecarlo import DgpSpec, generate, substream
from longrun.stability import cusum, cusum_sq, recursive_residuals

N = 160
K = 3


def report(label: str, data: dict, level: int = 5) -> None:
    w = recursive_residuals(data["y"], data["X"])
    cs = cusum(w, k=K, n=N, level=level)
    sq = cusum_sq(w, k=K, n=N, level=level)
    print(f"\n{label}")
    for path in (cs, sq):
        margin = np.minimum(path.upper - path.statistics,
                            path.statistics - path.lower)
        if path.breached:
            where = f"first leaves the band at observation {path.first_breach}"
        else:
            where = f"stays inside (closest approach {np.min(margin):.3f})"
        print(f"  {path.kind:<9} ({level}% band): {where}")
    print(f"  cusum_sq endpoint: {sq.statistics[-1]:.10f} (exactly 1 by "
          f"construction)")


def main() -> None:
    stable = DgpSpec(kind="stable_regression", n=N,
                     params={"k": K, "beta": 1.0, "noise_sd": 1.0})
    shifted = DgpSpec(kind="stable_regression", n=N,
                      params={"k": K, "beta": 1.0, "noise_sd": 1.0,
                              "coef_step": 5.0, "step_coef": 0, "step_frac": 0.5})

    report("stable coefficients", generate(stable, substream(20260814, 1)))
    report("intercept jumps +5 sd at mid-sample (observation 80)",
           generate(shifted, substream(20260814, 1)))
    print("note the squared-sum path can leave its band well before the")
    print("break month: the inflated post-break residuals raise the total,")
    print("which drags the early cumulative shares below the lower band")

    # false-alarm rate over many stable draws should be near the level
    level = 5
    reps = 300
    breaches = 0
    for rep in range(reps):
        data = generate(stable, substream(7, rep))
        w = recursive_residuals(data["y"], data["X"])
        breaches += cusum(w, k=K, n=N, level=level).breached
    print(f"\ncusum false-alarm rate over {reps} stable draws at the "
          f"{level}% band: {breaches / reps:.1%}")
    print("(the straight-line band is conservative, so the rate runs a")
    print("little below the nominal level)")


if __name__ == "__main__":
    main()
