"""Schrodinger- and Heisenberg-picture evolution under a Lindbladian."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from mixphase.lindblad.superop import Lindbladian, StateLike
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import (
    DEFAULT_POLICY,
    NumericPolicy,
    min_eigenvalue,
    trace_distance,
)
from mixphase.qstate.states import DensityMatrix
from mixphase.utils.errors import NumericGuardError, ValidationError

logger = logging.getLogger(__name__)


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape(dim, dim, order="F")


def _check_time(t: float) -> None:
    if t < 0:
        raise ValidationError(f"Negative evolution time {t}: the semigroup has no inverse")


def _as_density(lind: Lindbladian, rho0: StateLike) -> DensityMatrix:
    if isinstance(rho0, DensityMatrix):
        lind._matrix(rho0)
        return rho0
    return DensityMatrix(lind.geometry, lind._matrix(rho0), validate=False)


def _propagate_vector(
    lind: Lindbladian, vector: np.ndarray, t: float, adjoint: bool, policy: NumericPolicy
) -> np.ndarray:
    """e^{tS} v (or e^{t S^dag} v) in the dense or sparse exponential regime."""
    size = lind.dim**2
    s = lind.superoperator(policy)
    if adjoint:
        s = s.conj().T.tocsr()
    if size <= policy.dense_expm_limit:
        logger.debug(f"Dense expm for superoperator of size {size}")
        return sla.expm(t * s.toarray()) @ vector
    logger.debug(f"Sparse expm_multiply for superoperator of size {size}")
    return expm_multiply(t * s, vector)


def evolve_expm(
    lind: Lindbladian, rho0: StateLike, t: float, policy: NumericPolicy = DEFAULT_POLICY
) -> DensityMatrix:
    """
    e^{tL}(rho0) by exponentiating the superoperator.

    Args:
        lind: Generator
        rho0: Initial state
        t: Non-negative time
        policy: Size guards

    Returns:
        DensityMatrix: Evolved state (not re-validated)

    Raises:
        ValidationError: For t < 0
        NumericGuardError: Outside the superoperator regime
    """
    _check_time(t)
    state = _as_density(lind, rho0)
    if t == 0 or lind.is_zero:
        return DensityMatrix(lind.geometry, state.matrix.copy(), validate=False)
    out = _propagate_vector(lind, vec(state.matrix), t, False, policy)
    return DensityMatrix(lind.geometry, unvec(out, lind.dim), validate=False)


@dataclass
class Trajectory:
    """States along a time grid."""

    geometry: LatticeGeometry
    times: np.ndarray
    states: List[np.ndarray]

    @property
    def final(self) -> DensityMatrix:
        return DensityMatrix(self.geometry, self.states[-1], validate=False)

    def distances(self, target: np.ndarray) -> np.ndarray:
        return np.array([trace_distance(s, target) for s in self.states])

    def rows(self, target: np.ndarray) -> List[Tuple[float, float, float, float]]:
        """Rows ``t, trace_distance, trace, min_eig`` against ``target``."""
        return [
            (
                float(t),
                trace_distance(s, target),
                float(np.trace(s).real),
                min_eigenvalue(s),
            )
            for t, s in zip(self.times, self.states)
        ]


def _time_grid(times: Sequence[float]) -> np.ndarray:
    grid = np.asarray(times, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValidationError("Empty time grid")
    if (grid < 0).any():
        raise ValidationError("Negative times in grid")
    if (np.diff(grid) < 0).any():
        raise ValidationError("Time grid must be sorted")
    return grid


def _integrate(
    rhs,
    y0: np.ndarray,
    grid: np.ndarray,
    tol: float,
    method: str,
    stiffness: float,
) -> List[np.ndarray]:
    if grid[-1] == 0:
        return [y0.copy() for _ in grid]
    result = solve_ivp(
        rhs,
        (0.0, float(grid[-1])),
        y0,
        method=method,
        t_eval=grid,
        rtol=tol,
        atol=tol,
    )
    if result.status == -1:
        raise NumericGuardError(
            "integrator",
            f"{result.message}; stiffness estimate ||L|| * t = {stiffness * grid[-1]:.3e}",
        )
    return [result.y[:, k] for k in range(result.y.shape[1])]


def evolve_integrate(
    lind: Lindbladian,
    rho0: StateLike,
    times: Sequence[float],
    tol: float = 1e-9,
    method: str = "RK45",
) -> Trajectory:
    """
    Integrate d rho / dt = L(rho) with an embedded Runge-Kutta pair.

    The right-hand side is the matrix-free ``apply``, so this works beyond
    the superoperator regime.

    Raises:
        ValidationError: On negative or unsorted times
        NumericGuardError: When the step size underflows
    """
    grid = _time_grid(times)
    state = _as_density(lind, rho0)
    d = lind.dim

    def rhs(_t, y):
        return vec(lind.apply(unvec(y, d)))

    logger.debug(f"Integrating dim={d} to t={grid[-1]} with {method}, tol={tol}")
    ys = _integrate(rhs, vec(state.matrix).astype(complex), grid, tol, method, lind.norm_estimate())
    return Trajectory(lind.geometry, grid, [unvec(y, d) for y in ys])


def evolve(
    lind: Lindbladian,
    rho0: StateLike,
    t: float,
    policy: NumericPolicy = DEFAULT_POLICY,
    tol: Optional[float] = None,
) -> DensityMatrix:
    """Evolve with the exponential when the superoperator fits, else integrate."""
    _check_time(t)
    if policy.fits_superoperator(lind.dim):
        return evolve_expm(lind, rho0, t, policy)
    logger.debug(f"dim={lind.dim} beyond superoperator limits; integrating")
    tol = tol if tol is not None else policy.dynamics_atol * 1e-2
    return evolve_integrate(lind, rho0, [0.0, t], tol=tol).final


def evolve_trajectory(
    lind: Lindbladian,
    rho0: StateLike,
    times: Sequence[float],
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """States on ``times``, by exponentials when affordable."""
    grid = _time_grid(times)
    if policy.fits_superoperator(lind.dim):
        states = [evolve_expm(lind, rho0, float(t), policy).matrix for t in grid]
        return Trajectory(lind.geometry, grid, states)
    return evolve_integrate(lind, rho0, grid, tol=policy.dynamics_atol * 1e-2)


def heisenberg_evolve(
    lind: Lindbladian,
    op: np.ndarray,
    t: float,
    policy: NumericPolicy = DEFAULT_POLICY,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Dual evolution e^{tL*}(A), fixed by Tr[A e^{tL}(rho)] = Tr[e^{tL*}(A) rho].

    Raises:
        ValidationError: For t < 0
        DimensionError: On a dimension mismatch
    """
    _check_time(t)
    mat = lind._matrix(op)
    if t == 0 or lind.is_zero:
        return mat.copy()
    d = lind.dim
    if policy.fits_superoperator(d):
        return unvec(_propagate_vector(lind, vec(mat), t, True, policy), d)

    def rhs(_t, y):
        return vec(lind.adjoint_apply(unvec(y, d)))

    tol = tol if tol is not None else policy.dynamics_atol * 1e-2
    grid = np.array([0.0, t])
    ys = _integrate(rhs, vec(mat).astype(complex), grid, tol, "RK45", lind.norm_estimate())
    return unvec(ys[-1], d)


def heisenberg_trajectory(
    lind: Lindbladian,
    op: np.ndarray,
    times: Sequence[float],
    policy: NumericPolicy = DEFAULT_POLICY,
) -> List[np.ndarray]:
    """Heisenberg images of ``op`` on a time grid."""
    return [heisenberg_evolve(lind, op, float(t), policy) for t in _time_grid(times)]


def channel_matrix(
    lind: Lindbladian, t: float, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """
    Dense transfer matrix of e^{tL} in the column-stacking convention.

    Raises:
        NumericGuardError: If D**2 exceeds the dense exponential limit
    """
    _check_time(t)
    size = lind.dim**2
    if size > policy.dense_expm_limit:
        raise NumericGuardError(
            "dense_expm_limit", f"Dense channel of size {size} exceeds {policy.dense_expm_limit}"
        )
    return sla.expm(t * lind.superoperator(policy).toarray())
