"""Classical-quantum simulation of switched Lindbladians and their sequential targets.

The timers never build coherences between register levels, so the composite
state is a stack of unnormalized system matrices, one per timer
configuration: sigma[k_1, ..., k_M] with sum_c Tr sigma_c = 1.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from mixphase.lindblad import Lindbladian, evolve
from mixphase.lindblad.superop import StateLike
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, von_neumann_entropy
from mixphase.qstate.states import DensityMatrix
from mixphase.switchgear.switched import SwitchedLindbladian
from mixphase.timer.bounds import joint_all_low_prob
from mixphase.timer.chain import default_epsilon
from mixphase.utils.errors import NumericGuardError, ValidationError

logger = logging.getLogger(__name__)

SWITCH_HEADER = ("T", "t", "distance_to_oracle", "band_leak")


@dataclass
class SwitchedRun:
    """
    Result of a composite simulation.

    Attributes:
        times: Sample times
        marginals: System marginal at each time
        ancilla_leak: 1 - P(all timers absorbed) at each time
        mutual_information: System/register mutual information (bits) at each time
        final_composite: Composite stack at the last time, shape register_shape + (d, d)
    """

    times: np.ndarray
    marginals: List[np.ndarray]
    ancilla_leak: np.ndarray
    mutual_information: np.ndarray
    final_composite: np.ndarray = field(repr=False)

    @property
    def final_marginal(self) -> np.ndarray:
        return self.marginals[-1]


def _system_matrix(sw: SwitchedLindbladian, rho0: StateLike) -> np.ndarray:
    mat = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    d = sw.geometry.dim
    if mat.shape != (d, d):
        raise ValidationError(f"Initial state of shape {mat.shape} does not match dimension {d}")
    return mat


def composite_rhs(sw: SwitchedLindbladian, sigma: np.ndarray) -> np.ndarray:
    """d sigma / dt: stage generators on each configuration block plus timer hops."""
    out = np.zeros_like(sigma)
    for combo, gen in sw.combos.items():
        index = tuple(sw.group_slice(g) for g in combo)
        out[index] = gen.apply(sigma[index])
    T = sw.timer.T
    gamma = sw.timer.gamma
    for axis in range(sw.n_timers):
        low = [slice(None)] * sigma.ndim
        high = [slice(None)] * sigma.ndim
        low[axis] = slice(0, T)
        high[axis] = slice(1, T + 1)
        flow = gamma * sigma[tuple(low)]
        out[tuple(low)] -= flow
        out[tuple(high)] += flow
    return out


def composite_initial(sw: SwitchedLindbladian, rho0: StateLike) -> np.ndarray:
    """All timers at level 0 with the system in ``rho0``."""
    mat = _system_matrix(sw, rho0)
    d = mat.shape[0]
    sigma = np.zeros(sw.register_shape + (d, d), dtype=complex)
    sigma[(0,) * sw.n_timers] = mat
    return sigma


def register_marginal(sigma: np.ndarray, n_timers: int) -> np.ndarray:
    """P(k_1, ..., k_M) = Tr sigma_k."""
    return np.trace(sigma, axis1=-2, axis2=-1).real if n_timers else np.array(1.0)


def system_marginal(sigma: np.ndarray, n_timers: int) -> np.ndarray:
    return sigma.sum(axis=tuple(range(n_timers))) if n_timers else sigma


def cq_mutual_information(sigma: np.ndarray, n_timers: int) -> float:
    """
    I(system : registers) = S(rho_sys) - sum_c p_c S(sigma_c / p_c), in bits.
    """
    rho_sys = system_marginal(sigma, n_timers)
    d = sigma.shape[-1]
    flat = sigma.reshape(-1, d, d)
    probs = np.trace(flat, axis1=1, axis2=2).real
    conditional = 0.0
    for p, block in zip(probs, flat):
        if p > 1e-14:
            conditional += p * von_neumann_entropy(block / p)
    return max(0.0, von_neumann_entropy(rho_sys) - conditional)


def run_switched(
    sw: SwitchedLindbladian,
    rho0: StateLike,
    times: Sequence[float],
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> SwitchedRun:
    """
    Simulate the composite from all timers at level 0.

    Args:
        sw: Switched generator
        rho0: Initial system state
        times: Sorted non-negative sample times
        rtol: Relative integrator tolerance
        atol: Absolute integrator tolerance

    Raises:
        ValidationError: On bad times or a mismatched state
        NumericGuardError: When the integrator fails
    """
    grid = np.asarray(times, dtype=float).reshape(-1)
    if grid.size == 0 or (grid < 0).any() or (np.diff(grid) < 0).any():
        raise ValidationError("Times must be a non-empty sorted grid of non-negative values")
    sigma0 = composite_initial(sw, rho0)
    shape = sigma0.shape
    logger.debug(f"Composite simulation: {int(np.prod(sw.register_shape))} configurations")

    def rhs(_t, y):
        return composite_rhs(sw, y.reshape(shape)).reshape(-1)

    if grid[-1] == 0:
        states = [sigma0.copy() for _ in grid]
    else:
        result = solve_ivp(
            rhs,
            (0.0, float(grid[-1])),
            sigma0.reshape(-1),
            method="RK45",
            t_eval=grid,
            rtol=rtol,
            atol=atol,
        )
        if result.status == -1:
            raise NumericGuardError("integrator", f"Composite integration failed: {result.message}")
        states = [result.y[:, k].reshape(shape) for k in range(result.y.shape[1])]

    m = sw.n_timers
    top = (sw.timer.T,) * m
    marginals = [system_marginal(s, m) for s in states]
    leak = np.array([1.0 - float(np.trace(s[top]).real) for s in states])
    info = np.array([cq_mutual_information(s, m) for s in states])
    return SwitchedRun(grid, marginals, leak, info, states[-1])


def sequential_oracle(
    stages: Sequence[Lindbladian],
    switch_times: Sequence[float],
    rho0: StateLike,
    t: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> DensityMatrix:
    """
    Piecewise evolution: stage 0 until switch_times[0], stage 1 until
    switch_times[1], and so on; the last stage runs until ``t``.

    Raises:
        ValidationError: If the switch times do not fit the stages
    """
    if len(switch_times) != len(stages) - 1:
        raise ValidationError(
            f"{len(stages)} stages need {len(stages) - 1} switch times, got {len(switch_times)}"
        )
    if any(b < a for a, b in zip(switch_times, switch_times[1:])) or any(
        s < 0 for s in switch_times
    ):
        raise ValidationError("Switch times must be sorted and non-negative")
    state = rho0
    elapsed = 0.0
    for stage, end in zip(stages, list(switch_times) + [np.inf]):
        dt = min(end, t) - elapsed
        if dt > 0:
            state = evolve(stage, state, dt, policy)
            elapsed += dt
        if elapsed >= t:
            break
    if isinstance(state, DensityMatrix):
        return state
    return DensityMatrix(stages[0].geometry, np.asarray(state, dtype=complex), validate=False)


def mean_switch_times(sw: SwitchedLindbladian) -> List[float]:
    """Mean crossing times T_l / gamma of the thresholds that change the stage."""
    if len(sw.stages) == 1:
        return []
    return [sw.timer.threshold_time(i) for i in range(len(sw.timer.thresholds))]


def expected_group(sw: SwitchedLindbladian, t: float) -> int:
    """Level group a timer should occupy at ``t`` under the mean schedule."""
    return sum(1 for i in range(len(sw.timer.thresholds)) if sw.timer.threshold_time(i) < t)


def band_leak(sw: SwitchedLindbladian, t: float) -> float:
    """Probability that some timer is outside its expected level group at ``t``."""
    if sw.n_timers == 0:
        return 0.0
    levels = sw.timer.stage_levels(expected_group(sw, t))
    band = (levels.start, levels.stop - 1)
    return max(0.0, 1.0 - joint_all_low_prob(sw.n_timers, sw.timer, t, band))


@dataclass(frozen=True)
class ErrorBudget:
    """Band leak, switching-window drift and truncation error of a switched run."""

    band_leak: float
    window: float
    truncation: float = 0.0

    @property
    def total(self) -> float:
        return self.band_leak + self.window + self.truncation


def error_budget(
    sw: SwitchedLindbladian, epsilon: Optional[float] = None, truncation: float = 0.0
) -> ErrorBudget:
    """
    Budget around every switching time tau_l: leak at tau_l -/+ eps/2 plus
    eps times the summed stage norm estimates.
    """
    eps = default_epsilon(sw.timer) if epsilon is None else epsilon
    leak = 0.0
    for tau_l in mean_switch_times(sw):
        for t in (tau_l - eps / 2, tau_l + eps / 2):
            if t > 0:
                leak += band_leak(sw, t)
    window = eps * float(sum(sw.stage_norms())) * max(1, len(mean_switch_times(sw)))
    return ErrorBudget(leak, window, truncation)

