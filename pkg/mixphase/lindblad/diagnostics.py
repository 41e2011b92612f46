"""Channel and convergence diagnostics for Lindbladian evolutions."""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from mixphase.lindblad.evolution import channel_matrix, evolve_trajectory
from mixphase.lindblad.superop import Lindbladian, StateLike
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.states import DensityMatrix

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("t", "trace_distance", "trace", "min_eig")


@dataclass
class ChoiReport:
    """Complete-positivity and trace-preservation figures of e^{tL}."""

    t: float
    choi_eigenvalues: np.ndarray
    trace_defect: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.choi_eigenvalues[0])

    def is_cptp(self, atol: float = 1e-9) -> bool:
        return self.min_eigenvalue >= -atol and self.trace_defect <= 1e-10


def choi_matrix(transfer: np.ndarray, dim: int) -> np.ndarray:
    """
    Choi matrix J = sum_ij E_ij (x) Phi(E_ij) from a column-stacking transfer matrix.

    Column ``i + j * dim`` of ``transfer`` holds vec(Phi(E_ij)).
    """
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            image = transfer[:, i + j * dim].reshape(dim, dim, order="F")
            choi[i * dim : (i + 1) * dim, j * dim : (j + 1) * dim] = image
    return choi


def choi_cp_check(
    lind: Lindbladian, t: float, policy: NumericPolicy = DEFAULT_POLICY
) -> ChoiReport:
    """
    Choi spectrum and trace-preservation defect of the channel e^{tL}.

    The defect is max_ij |Tr Phi(E_ij) - delta_ij|.
    """
    d = lind.dim
    transfer = channel_matrix(lind, t, policy)
    choi = choi_matrix(transfer, d)
    evals = sla.eigvalsh((choi + choi.conj().T) / 2)
    blocks = choi.reshape(d, d, d, d)
    traces = np.trace(blocks, axis1=1, axis2=3)
    defect = float(np.abs(traces - np.eye(d)).max())
    logger.debug(f"Choi check at t={t}: min eig {evals[0]:.3e}, defect {defect:.3e}")
    return ChoiReport(float(t), evals, defect)


@dataclass
class ConvergenceReport:
    """
    Distance decay towards a target along a time grid.

    ``rate`` and ``prefactor`` describe d(t) ~ prefactor * exp(-rate t) over
    the fitted window; both are None when no window exists.
    """

    times: np.ndarray
    trace_distances: np.ndarray
    traces: np.ndarray
    min_eigs: np.ndarray
    rate: Optional[float] = None
    prefactor: Optional[float] = None
    residual: Optional[float] = None
    monotone: bool = True
    window: List[int] = field(default_factory=list)

    @property
    def rate_defined(self) -> bool:
        return self.rate is not None

    def rows(self) -> List[tuple]:
        return list(zip(self.times, self.trace_distances, self.traces, self.min_eigs))

    def write_csv(self, path: Path) -> None:
        write_trajectory_csv(path, self.rows())


def write_trajectory_csv(path: Path, rows: Sequence[Sequence[float]]) -> None:
    """Write ``t,trace_distance,trace,min_eig`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_HEADER)
        for row in rows:
            writer.writerow([f"{float(x):.12e}" for x in row])


def exponential_fit(
    times: np.ndarray,
    distances: np.ndarray,
    floor: float = 1e-10,
    ceiling: float = 0.1,
) -> tuple:
    """
    Least-squares fit of log d against t.

    The window holds the points with floor < d <= ceiling inside the
    monotone tail of the sequence.

    Returns:
        (rate, prefactor, residual, monotone, window); the first three are
        None when fewer than two points qualify
    """
    times = np.asarray(times, dtype=float)
    distances = np.asarray(distances, dtype=float)
    increases = np.flatnonzero(np.diff(distances) > 1e-12)
    monotone = increases.size == 0
    start = int(increases[-1]) + 1 if increases.size else 0
    window = [k for k in range(start, len(distances)) if floor < distances[k] <= ceiling]
    if len(window) < 2:
        return None, None, None, monotone, window
    coeffs, res, *_ = np.polyfit(times[window], np.log(distances[window]), 1, full=True)
    slope, intercept = coeffs
    residual = float(np.sqrt(res[0] / len(window))) if len(res) else 0.0
    return float(-slope), float(np.exp(intercept)), residual, monotone, window


def fit_convergence(
    lind: Lindbladian,
    rho0: StateLike,
    rho1: StateLike,
    times: Sequence[float],
    policy: NumericPolicy = DEFAULT_POLICY,
    floor: float = 1e-10,
) -> ConvergenceReport:
    """
    Track ||e^{tL}(rho0) - rho1|| / 2 and fit an exponential rate.

    A non-monotone tail is logged and the fit restricted to the monotone window.
    """
    target = rho1.matrix if isinstance(rho1, DensityMatrix) else np.asarray(rho1)
    trajectory = evolve_trajectory(lind, rho0, times, policy)
    rows = trajectory.rows(target)
    grid = np.array([r[0] for r in rows])
    dist = np.array([r[1] for r in rows])
    rate, prefactor, residual, monotone, window = exponential_fit(grid, dist, floor=floor)
    if not monotone:
        logger.warning("Non-monotone distance tail; fit restricted to the monotone window")
    if rate is None:
        logger.info("Distances never enter the exponential window; rate undefined")
    return ConvergenceReport(
        times=grid,
        trace_distances=dist,
        traces=np.array([r[2] for r in rows]),
        min_eigs=np.array([r[3] for r in rows]),
        rate=rate,
        prefactor=prefactor,
        residual=residual,
        monotone=monotone,
        window=window,
    )
