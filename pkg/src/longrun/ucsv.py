"""Unobserved-components trend extraction with stochastic volatility.

The observation series (monthly inflation, in percent) is decomposed as

    pi_t  = tau_t + eta_t          eta_t = sigma_eta_t * z1_t
    tau_t = tau_{t-1} + eps_t      eps_t = sigma_eps_t * z2_t

with z1, z2 iid standard normal and both log variances following
independent random walks with a fixed innovation variance ``gamma``:

    ln sigma^2_{.,t} = ln sigma^2_{.,t-1} + nu_t,   nu_t ~ N(0, gamma).

Estimation is Bayesian, by Gibbs sampling.  Conditional on the
volatility paths the model is linear-Gaussian and the trend path is
drawn exactly with a precision-based simulation smoother (the joint
posterior precision of tau_0..tau_n is tridiagonal, so one banded
Cholesky factorization per sweep draws the whole path).  Conditional on
the trend, each log-volatility path is drawn the same way after the
usual auxiliary-mixture step: ln(e_t^2 + offset) is a location shift of
a log chi-square(1) variable, approximated by a seven-component normal
mixture, and mixture indicators are drawn per observation.

The volatility of the transitory component, sigma_eta_t, is the
series-specific uncertainty measure exposed by
:func:`uncertainty_series`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded, solve_banded

from .series import TimeSeries

__all__ = [
    "UcsvConfig",
    "UcsvPosterior",
    "UcsvSimulation",
    "estimate_ucsv",
    "uncertainty_series",
    "simulate_ucsv",
]

# Seven-component normal mixture approximating the log chi-square(1)
# distribution: weights, means (centered so the mixture mean equals
# E[ln chi2(1)] = -1.2704), and variances.
_MIX_W = np.array([0.00730, 0.10556, 0.00002, 0.04395, 0.34001, 0.24566, 0.25750])
_MIX_M = (
    np.array([-10.12999, -3.97281, -8.56686, 2.77786, 0.61942, 1.79518, -1.08819])
    - 1.2704
)
_MIX_V = np.array([5.79596, 2.61369, 5.17950, 0.16735, 0.64009, 0.34023, 1.26261])

# Offset inside the log transform guarding exact zeros in the squared
# residuals.
_LOG_OFFSET = 1e-6

# Diffuse prior variance for initial states (tau_0 and each h_1).
_DIFFUSE_VAR = 1e6


@dataclass(frozen=True)
class UcsvConfig:
    """Sampler settings: volatility-walk variance and Gibbs schedule.

    ``n_draws`` counts total sweeps; the first ``burn_in`` are
    discarded, leaving ``n_draws - burn_in`` retained draws.
    """

    gamma: float = 0.04
    n_draws: int = 5000
    burn_in: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.n_draws < 500:
            raise ValueError(f"n_draws must be at least 500, got {self.n_draws}")
        if self.burn_in < 100:
            raise ValueError(f"burn_in must be at least 100, got {self.burn_in}")
        if self.n_draws <= self.burn_in:
            raise ValueError(
                f"n_draws ({self.n_draws}) must exceed burn_in ({self.burn_in})"
            )


@dataclass(frozen=True)
class UcsvPosterior:
    """Posterior-mean summaries of the decomposition.

    ``trend + gap`` reproduces the observed series exactly; the gap is
    defined residually.  ``sigma_eta`` is the posterior mean volatility
    of the transitory component (the uncertainty measure), ``sigma_eps``
    the trend-innovation volatility.
    """

    trend: TimeSeries
    gap: TimeSeries
    sigma_eta: TimeSeries
    sigma_eps: TimeSeries
    config: UcsvConfig
    n_retained: int


def _draw_gaussian_path(
    diag: np.ndarray,
    offdiag: np.ndarray,
    rhs: np.ndarray,
    z: np.ndarray,
) -> np.ndarray:
    """Draw from N(K^{-1} rhs, K^{-1}) for tridiagonal precision K.

    ``diag`` is the main diagonal, ``offdiag`` the first subdiagonal
    (one element shorter).  Uses a banded Cholesky K = L L' and returns
    mu + L'^{-1} z.
    """
    k = diag.size
    ab = np.zeros((2, k))
    ab[0] = diag
    ab[1, :-1] = offdiag
    L = cholesky_banded(ab, lower=True)
    mu = cho_solve_banded((L, True), rhs)
    # L' is upper banded with one superdiagonal
    ab_t = np.zeros((2, k))
    ab_t[1] = L[0]
    ab_t[0, 1:] = L[1, :-1]
    return mu + solve_banded((0, 1), ab_t, z)


def _draw_trend(
    pi: np.ndarray,
    var_eta: np.ndarray,
    var_eps: np.ndarray,
    z: np.ndarray,
) -> np.ndarray:
    """Joint draw of (tau_0, .., tau_n) given the volatility paths."""
    n = pi.size
    w_obs = 1.0 / var_eta
    w_state = 1.0 / var_eps
    diag = np.empty(n + 1)
    diag[0] = w_state[0] + 1.0 / _DIFFUSE_VAR
    diag[1:] = w_obs + w_state
    diag[1:-1] += w_state[1:]
    rhs = np.zeros(n + 1)
    rhs[1:] = w_obs * pi
    return _draw_gaussian_path(diag, -w_state, rhs, z)


def _draw_log_variance(
    e: np.ndarray,
    h: np.ndarray,
    gamma: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One auxiliary-mixture update of a log-variance path."""
    n = e.size
    ystar = np.log(e**2 + _LOG_OFFSET)

    # mixture indicators given the current path
    resid = ystar[:, None] - h[:, None] - _MIX_M[None, :]
    logp = -0.5 * resid**2 / _MIX_V[None, :] - 0.5 * np.log(_MIX_V[None, :])
    logp += np.log(_MIX_W[None, :])
    logp -= logp.max(axis=1, keepdims=True)
    p = np.exp(logp)
    cum = np.cumsum(p, axis=1)
    u = rng.uniform(size=n) * cum[:, -1]
    s = (u[:, None] > cum).sum(axis=1)

    # path given indicators: observation ystar_t - m_s = h_t + N(0, v_s)
    w_obs = 1.0 / _MIX_V[s]
    w_state = 1.0 / gamma
    diag = w_obs + 2.0 * w_state
    diag[0] = w_obs[0] + w_state + 1.0 / _DIFFUSE_VAR
    diag[-1] = w_obs[-1] + w_state
    off = np.full(n - 1, -w_state)
    rhs = w_obs * (ystar - _MIX_M[s])
    return _draw_gaussian_path(diag, off, rhs, rng.standard_normal(n))


def _initial_trend(pi: np.ndarray) -> np.ndarray:
    """Centered 12-month moving average, truncated at the edges."""
    n = pi.size
    out = np.empty(n)
    for t in range(n):
        lo, hi = max(0, t - 6), min(n, t + 6)
        out[t] = pi[lo:hi].mean()
    return out


def estimate_ucsv(pi: TimeSeries, cfg: UcsvConfig = UcsvConfig()) -> UcsvPosterior:
    """Gibbs estimation of the trend/gap decomposition with stochastic
    volatility.

    Runs ``cfg.n_draws`` sweeps, discards ``cfg.burn_in``, and returns
    posterior means.  Two runs with identical inputs and seed produce
    bitwise-identical summaries.
    """
    y = pi.values
    n = len(pi)
    if n < 24:
        raise ValueError(f"series {pi.id!r} too short for trend extraction: n={n}")

    rng = np.random.default_rng(cfg.seed)

    tau = _initial_trend(y)
    dvar = float(np.var(np.diff(y)))
    h0 = np.log(max(0.5 * dvar, 1e-8))
    h_eta = np.full(n, h0)
    h_eps = np.full(n, h0)

    keep = cfg.n_draws - cfg.burn_in
    sum_tau = np.zeros(n)
    sum_sig_eta = np.zeros(n)
    sum_sig_eps = np.zeros(n)

    for sweep in range(cfg.n_draws):
        tau_full = _draw_trend(
            y, np.exp(h_eta), np.exp(h_eps), rng.standard_normal(n + 1)
        )
        tau = tau_full[1:]
        eta = y - tau
        eps = np.diff(tau_full)
        h_eta = _draw_log_variance(eta, h_eta, cfg.gamma, rng)
        h_eps = _draw_log_variance(eps, h_eps, cfg.gamma, rng)
        if sweep >= cfg.burn_in:
            sum_tau += tau
            sum_sig_eta += np.exp(0.5 * h_eta)
            sum_sig_eps += np.exp(0.5 * h_eps)

    trend_vals = sum_tau / keep
    gap_vals = y - trend_vals
    return UcsvPosterior(
        trend=TimeSeries(f"{pi.id}_trend", pi.start, trend_vals),
        gap=TimeSeries(f"{pi.id}_gap", pi.start, gap_vals),
        sigma_eta=TimeSeries(f"{pi.id}_sigma_eta", pi.start, sum_sig_eta / keep),
        sigma_eps=TimeSeries(f"{pi.id}_sigma_eps", pi.start, sum_sig_eps / keep),
        config=cfg,
        n_retained=keep,
    )


def uncertainty_series(posterior: UcsvPosterior, id: str = "U") -> TimeSeries:
    """The uncertainty measure: posterior mean sigma_eta, re-labelled.

    The transitory (gap) volatility is used, not the trend-innovation
    volatility; reports should state this definition.
    """
    src = posterior.sigma_eta
    return TimeSeries(id, src.start, src.values)


@dataclass(frozen=True)
class UcsvSimulation:
    """One forward draw of the model (for Monte Carlo studies)."""

    pi: np.ndarray
    tau: np.ndarray
    sigma_eta: np.ndarray = field(repr=False)
    sigma_eps: np.ndarray = field(repr=False)


def simulate_ucsv(
    n: int,
    gamma: float = 0.04,
    rng: np.random.Generator | None = None,
    tau0: float = 2.0,
    sigma_eta0: float = 0.7,
    sigma_eps0: float = 0.4,
) -> UcsvSimulation:
    """Simulate the data-generating process forward.

    Log variances start at the supplied initial volatilities and follow
    random walks with innovation variance ``gamma``; the trend starts at
    ``tau0``.  Defaults give a series on the scale of monthly inflation
    in percent.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if rng is None:
        rng = np.random.default_rng(0)
    h_eta = np.log(sigma_eta0**2) + np.cumsum(
        np.sqrt(gamma) * rng.standard_normal(n)
    )
    h_eps = np.log(sigma_eps0**2) + np.cumsum(
        np.sqrt(gamma) * rng.standard_normal(n)
    )
    sigma_eta = np.exp(0.5 * h_eta)
    sigma_eps = np.exp(0.5 * h_eps)
    tau = tau0 + np.cumsum(sigma_eps * rng.standard_normal(n))
    pi = tau + sigma_eta * rng.standard_normal(n)
    return UcsvSimulation(pi=pi, tau=tau, sigma_eta=sigma_eta, sigma_eps=sigma_eps)
