"""Monte Carlo machinery: data generators, simulated critical values,
and size/power studies.

Replications are reproducible and order independent: replication ``r``
of a run with master seed ``s`` always draws from the generator seeded
with ``SeedSequence(s, spawn_key=(r,))``, so serial and chunked
execution produce bit-identical results and any single replication can
be re-created in isolation.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cointegration import (
    GH_MODELS,
    DEFAULT_TRIM,
    _batch_adf,
    _batch_phillips,
    _batch_residuals,
    bartlett_bandwidth,
    candidate_positions,
    default_adf_max_lags,
)

__all__ = [
    "DgpSpec",
    "ReplicationSummary",
    "CriticalValueTable",
    "substream",
    "generate",
    "simulate_critical_values",
    "size_power_study",
]

DGP_KINDS = (
    "random_walks_null",
    "cointegrated_with_break",
    "ucsv_dgp",
    "stable_regression",
    "var_diff",
)


def substream(master_seed: int, rep: int) -> np.random.Generator:
    """Independent generator for one replication of one study."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(rep,)))


@dataclass(frozen=True)
class DgpSpec:
    """A data-generating process: kind, sample size, and parameters."""

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown DGP kind {self.kind!r}, expected one of {DGP_KINDS}")
        if self.n < 2:
            raise ValueError(f"sample size must be at least 2, got {self.n}")


def generate(spec: DgpSpec, rng: np.random.Generator) -> dict:
    """Draw one replication of data from ``spec``.

    Returns a dict of arrays; the keys depend on the kind (documented
    per branch below).  All randomness comes from ``rng``.
    """
    n = spec.n
    p = spec.params

    if spec.kind == "random_walks_null":
        # independent driftless random walks: y (n,), x (n, m)
        m = int(p.get("m", 2))
        y = np.cumsum(rng.standard_normal(n))
        x = np.cumsum(rng.standard_normal((n, m)), axis=0)
        return {"y": y, "x": x}

    if spec.kind == "cointegrated_with_break":
        # y = c + c_shift*phi + trend terms + (theta + slope_shift*phi) x + u,
        # with x independent random walks and u a stationary AR(1)
        m = int(p.get("m", 1))
        theta = np.broadcast_to(np.asarray(p.get("theta", 1.0), dtype=float), (m,))
        slope_shift = np.broadcast_to(
            np.asarray(p.get("slope_shift", 0.0), dtype=float), (m,)
        )
        c = float(p.get("intercept", 1.0))
        c_shift = float(p.get("intercept_shift", 0.0))
        tr = float(p.get("trend", 0.0))
        tr_shift = float(p.get("trend_shift", 0.0))
        tau = float(p.get("break_frac", 0.5))
        ar = float(p.get("ar", 0.3))
        noise_sd = float(p.get("noise_sd", 1.0))
        if not 0.0 < tau < 1.0:
            raise ValueError(f"break_frac must be inside (0, 1), got {tau}")

        bpos = int(math.floor(tau * n))
        phi = np.zeros(n)
        phi[bpos:] = 1.0
        x = np.cumsum(rng.standard_normal((n, m)), axis=0)
        u = np.zeros(n)
        e = noise_sd * rng.standard_normal(n)
        u[0] = e[0]
        for t in range(1, n):
            u[t] = ar * u[t - 1] + e[t]
        t_idx = np.arange(1.0, n + 1.0)
        y = (
            c
            + c_shift * phi
            + tr * t_idx
            + tr_shift * t_idx * phi
            + x @ theta
            + (x * phi[:, None]) @ slope_shift
            + u
        )
        return {"y": y, "x": x, "break_position": bpos, "phi": phi, "u": u}

    if spec.kind == "ucsv_dgp":
        from .ucsv import simulate_ucsv

        gamma = float(p.get("gamma", 0.04))
        sim = simulate_ucsv(n=n, gamma=gamma, rng=rng)
        return {
            "pi": sim.pi, "tau": sim.tau,
            "sigma_eta": sim.sigma_eta, "sigma_eps": sim.sigma_eps,
        }

    if spec.kind == "stable_regression":
        # y = X beta + noise, optionally with one coefficient stepping at
        # step_frac; X is a constant plus iid standard-normal regressors
        k = int(p.get("k", 3))
        beta = np.broadcast_to(np.asarray(p.get("beta", 1.0), dtype=float), (k,))
        noise_sd = float(p.get("noise_sd", 1.0))
        step = float(p.get("coef_step", 0.0))
        step_on = int(p.get("step_coef", 0))
        step_frac = float(p.get("step_frac", 0.5))
        X = np.column_stack([np.ones(n), rng.standard_normal((n, k - 1))])
        b = np.tile(beta, (n, 1))
        b[int(math.floor(step_frac * n)) :, step_on] += step
        y = np.einsum("nk,nk->n", X, b) + noise_sd * rng.standard_normal(n)
        return {"y": y, "X": X, "beta": beta.copy()}

    if spec.kind == "var_diff":
        # levels whose first differences follow a stable VAR(1) with the
        # requested spectral radius
        k = int(p.get("k", 2))
        radius = float(p.get("radius", 0.5))
        noise_sd = float(p.get("noise_sd", 1.0))
        if not 0.0 <= radius < 1.0:
            raise ValueError(f"radius must be in [0, 1), got {radius}")
        G = rng.standard_normal((k, k))
        eig = np.max(np.abs(np.linalg.eigvals(G)))
        A = radius * G / eig if eig > 0 else np.zeros((k, k))
        d = np.zeros((n, k))
        e = noise_sd * rng.standard_normal((n, k))
        d[0] = e[0]
        for t in range(1, n):
            d[t] = d[t - 1] @ A.T + e[t]
        levels = np.cumsum(d, axis=0)
        return {"levels": levels, "diffs": d, "A": A}

    raise AssertionError("unreachable")


@dataclass(frozen=True)
class CriticalValueTable:
    """Simulated lower-tail quantiles of the break-test statistics."""

    model: str
    m: int
    n: int
    reps: int
    seed: int
    trim: tuple[float, float]
    levels: tuple[int, ...]
    adf: dict[int, float]
    zt: dict[int, float]
    za: dict[int, float]
    samples: dict[str, np.ndarray] | None = field(default=None, repr=False)

    def cv(self, statistic: str, level: int) -> float:
        return {"ADF": self.adf, "Zt": self.zt, "Za": self.za}[statistic][level]


def _null_minima_chunk(
    args: tuple[int, int, int, str, int, int, tuple[float, float]],
) -> np.ndarray:
    """Minimized (ADF, Z_t, Z_alpha) for a contiguous block of replications."""
    seed, lo, hi, model, m, n, trim = args
    cands = candidate_positions(n, trim)
    bw = bartlett_bandwidth(n)
    kmax = default_adf_max_lags(n)
    out = np.empty((hi - lo, 3))
    for rep in range(lo, hi):
        rng = substream(seed, rep)
        y = np.cumsum(rng.standard_normal(n))
        x = np.cumsum(rng.standard_normal((n, m)), axis=0)
        E = _batch_residuals(y, x, model, cands)
        zt, za = _batch_phillips(E, bw)
        adf, _ = _batch_adf(E, kmax)
        out[rep - lo] = (adf.min(), zt.min(), za.min())
    return out


def simulate_critical_values(
    model: str,
    m: int,
    n: int,
    reps: int,
    seed: int,
    levels: tuple[int, ...] = (1, 5, 10),
    trim: tuple[float, float] = DEFAULT_TRIM,
    n_jobs: int = 1,
    keep_samples: bool = False,
) -> CriticalValueTable:
    """Simulate critical values for the break test under the null.

    Each replication draws independent random walks, runs the same
    candidate-break engine as :func:`longrun.cointegration.gh_test`,
    and records the minimized statistics; the table holds their
    empirical ``levels``-percent quantiles.  Results are identical for
    any ``n_jobs``.
    """
    if model not in GH_MODELS:
        raise ValueError(f"unknown model {model!r}, expected one of {GH_MODELS}")
    if reps < 100:
        raise ValueError(f"reps must be at least 100, got {reps}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")

    if n_jobs <= 1:
        stats = _null_minima_chunk((seed, 0, reps, model, m, n, trim))
    else:
        edges = np.linspace(0, reps, n_jobs * 4 + 1).astype(int)
        tasks = [
            (seed, int(lo), int(hi), model, m, n, trim)
            for lo, hi in zip(edges[:-1], edges[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(_null_minima_chunk, tasks))
        stats = np.vstack(chunks)

    qs = [lv / 100.0 for lv in levels]
    quants = np.quantile(stats, qs, axis=0)
    table = {
        name: {lv: float(quants[i, j]) for i, lv in enumerate(levels)}
        for j, name in enumerate(("ADF", "Zt", "Za"))
    }
    samples = None
    if keep_samples:
        samples = {"ADF": stats[:, 0].copy(), "Zt": stats[:, 1].copy(), "Za": stats[:, 2].copy()}
    return CriticalValueTable(
        model=model, m=m, n=n, reps=reps, seed=seed, trim=trim,
        levels=tuple(levels), adf=table["ADF"], zt=table["Zt"], za=table["Za"],
        samples=samples,
    )


@dataclass(frozen=True)
class ReplicationSummary:
    """Event frequency over replications of one DGP."""

    spec: DgpSpec
    reps: int
    seed: int
    events: int

    @property
    def rate(self) -> float:
        return self.events / self.reps


def size_power_study(
    null_spec: DgpSpec,
    alt_spec: DgpSpec | None,
    test,
    reps: int,
    seed: int,
) -> tuple[ReplicationSummary, ReplicationSummary | None]:
    """Frequency of ``test(data) == True`` under a null and an alternative.

    ``test`` is any closure mapping one replication's data dict to a
    boolean (reject / hit).  Under the null the rate estimates size;
    under the alternative, power.  ``alt_spec`` may be None to study a
    single design.  The two studies use disjoint substreams of ``seed``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")

    def run(spec: DgpSpec, offset: int) -> ReplicationSummary:
        events = 0
        for rep in range(reps):
            rng = substream(seed, offset + rep)
            if test(generate(spec, rng)):
                events += 1
        return ReplicationSummary(spec=spec, reps=reps, seed=seed, events=events)

    null_summary = run(null_spec, 0)
    alt_summary = run(alt_spec, reps) if alt_spec is not None else None
    return null_summary, alt_summary
