"""Classical birth-chain statistics of the timer register.

Levels 0..T, hop k -> k + 1 at rate gamma, level T absorbing. Occupations
are a Poisson law truncated at the absorbing top level; everything is
evaluated in the log domain so that T in the tens of thousands is safe.
"""

import logging
from typing import Dict, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply
from scipy.special import logsumexp
from scipy.stats import poisson

from mixphase.timer.spec import TimerDistribution, TimerSpec
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)


def _check_time(t: float) -> None:
    if t < 0:
        raise ValidationError(f"Negative time {t}")


def log_level_probs(spec: TimerSpec, t: float) -> np.ndarray:
    """log p_k(t) for k = 0..T."""
    _check_time(t)
    T = spec.T
    if t == 0:
        out = np.full(T + 1, -np.inf)
        out[0] = 0.0
        return out
    mu = spec.gamma * t
    logs = np.empty(T + 1)
    logs[:T] = poisson.logpmf(np.arange(T), mu)
    logs[T] = poisson.logsf(T - 1, mu)
    return logs


def birth_chain_dist(spec: TimerSpec, t: float) -> TimerDistribution:
    """
    Exact level distribution at time ``t`` starting from level 0.

    p_k = e^{-gamma t} (gamma t)^k / k! for k < T, and p_T collects the rest.

    Raises:
        ValidationError: For t < 0
    """
    probs = np.exp(log_level_probs(spec, t))
    return TimerDistribution(probs / probs.sum())


def log_band_mass(spec: TimerSpec, t: float, band: Tuple[int, int]) -> float:
    """log of sum_{k=lo..hi} p_k(t)."""
    lo, hi = band
    if not (0 <= lo <= hi <= spec.T):
        raise ValidationError(f"Band {band} outside levels 0..{spec.T}")
    return float(logsumexp(log_level_probs(spec, t)[lo : hi + 1]))


def band_mass(spec: TimerSpec, t: float, band: Tuple[int, int]) -> float:
    return float(np.exp(log_band_mass(spec, t, band)))


def chain_generator(spec: TimerSpec) -> sp.csr_matrix:
    """Rate matrix Q of the chain: dp/dt = Q p."""
    T = spec.T
    diag = np.full(T + 1, -spec.gamma)
    diag[T] = 0.0
    sub = np.full(T, spec.gamma)
    return sp.diags([diag, sub], [0, -1], format="csr")


def chain_dist_expm(spec: TimerSpec, t: float) -> np.ndarray:
    """Occupations from the chain exponential (oracle for the closed form)."""
    _check_time(t)
    p0 = np.zeros(spec.T + 1)
    p0[0] = 1.0
    return expm_multiply(t * chain_generator(spec), p0)


def chain_dist_ode(spec: TimerSpec, times: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """Occupations on ``times`` from an 8th-order Runge-Kutta integration (second oracle)."""
    grid = np.asarray(times, dtype=float)
    q = chain_generator(spec)
    p0 = np.zeros(spec.T + 1)
    p0[0] = 1.0
    if grid[-1] == 0:
        return np.tile(p0, (len(grid), 1))
    result = solve_ivp(
        lambda _t, p: q @ p, (0.0, grid[-1]), p0, method="DOP853", t_eval=grid, rtol=tol, atol=tol
    )
    return result.y.T


def stage_masses(spec: TimerSpec, t: float) -> np.ndarray:
    """Probability of each stage (levels between consecutive thresholds) at ``t``."""
    logs = log_level_probs(spec, t)
    bounds = (0,) + spec.thresholds + (spec.T + 1,)
    return np.array(
        [np.exp(logsumexp(logs[bounds[i] : bounds[i + 1]])) for i in range(len(bounds) - 1)]
    )


def default_epsilon(spec: TimerSpec, alpha: float = 0.25) -> float:
    """Switching window eps = tau * T**(-alpha)."""
    if not 0 < alpha < 0.5:
        raise ValidationError(f"alpha must lie in (0, 1/2), got {alpha}")
    return spec.tau * spec.T ** (-alpha)


def two_stage_band_masses(
    spec: TimerSpec, epsilon: float, n_grid: int = 33
) -> Dict[str, float]:
    """
    Smallest mass of the expected band over each of the three time windows.

    before: levels 0..T1-1 for t <= tau1 - eps/2; middle: levels T1..T-1
    for tau1 + eps/2 <= t <= tau - eps/2; after: level T for t >= tau + eps/2.
    """
    T1 = spec.T1
    tau1 = spec.threshold_time(0)
    tau = spec.tau
    half = epsilon / 2
    if tau1 + half >= tau - half or tau1 - half <= 0:
        raise ValidationError(f"eps={epsilon} leaves no room between the switching windows")
    early = np.linspace(0.0, tau1 - half, n_grid)
    middle = np.linspace(tau1 + half, tau - half, n_grid)
    masses = {
        "before": min(band_mass(spec, t, (0, T1 - 1)) for t in early),
        "middle": min(band_mass(spec, t, (T1, spec.T - 1)) for t in middle),
        # p_T only grows, so the window start is the worst case
        "after": band_mass(spec, tau + half, (spec.T, spec.T)),
    }
    logger.debug(f"Two-stage band masses T={spec.T}: {masses}")
    return masses
