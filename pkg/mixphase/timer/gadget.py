"""The literal timer gadget on T+1 qubits, used to validate the birth chain."""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from mixphase.lindblad import LindbladTerm, Lindbladian, evolve
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.timer.spec import TimerDistribution, TimerSpec
from mixphase.utils.errors import NumericGuardError

logger = logging.getLogger(__name__)

P1 = np.diag([0.0, 1.0]).astype(complex)
RAISE = np.array([[0, 0], [1, 0]], dtype=complex)


def check_gadget_size(spec: TimerSpec, policy: NumericPolicy = DEFAULT_POLICY) -> None:
    if spec.T > policy.max_gadget_timer:
        raise NumericGuardError(
            "max_gadget_timer",
            f"Qubit timer with T={spec.T} needs 2**{spec.T + 1} dimensions; "
            f"limit is T={policy.max_gadget_timer}",
        )


def gadget_jump(gamma: float) -> np.ndarray:
    """sqrt(gamma) |1><1|_j (x) |1><0|_{j+1}."""
    return np.sqrt(gamma) * np.kron(P1, RAISE)


def timer_lindbladian(spec: TimerSpec, policy: NumericPolicy = DEFAULT_POLICY) -> Lindbladian:
    """
    Timer generator on a chain of T+1 qubits.

    Qubit j+1 flips to |1> at rate gamma once qubit j is |1>.
    """
    check_gadget_size(spec, policy)
    geom = LatticeGeometry.chain(spec.T + 1)
    jump = gadget_jump(spec.gamma)
    terms = tuple(LindbladTerm.dissipator((j, j + 1), [jump]) for j in range(spec.T))
    return Lindbladian(geom, terms)


def phi_index(T: int, k: int) -> int:
    """Flat index of phi_k = |1^{k+1} 0^{T-k}> (qubit 0 leftmost)."""
    bits = "1" * (k + 1) + "0" * (T - k)
    return int(bits, 2)


def accessible_indices(T: int) -> List[int]:
    return [phi_index(T, k) for k in range(T + 1)]


@dataclass(frozen=True)
class GadgetDistribution:
    """Projected occupations plus the weight found outside span{phi_k}."""

    distribution: TimerDistribution
    leakage: float


def quantum_timer_dist(
    spec: TimerSpec, t: float, policy: NumericPolicy = DEFAULT_POLICY
) -> GadgetDistribution:
    """
    Evolve |phi_0> under the qubit timer and project onto the phi_k.

    Raises:
        NumericGuardError: If T exceeds the gadget limit
    """
    lind = timer_lindbladian(spec, policy)
    d = lind.dim
    rho0 = np.zeros((d, d), dtype=complex)
    start = phi_index(spec.T, 0)
    rho0[start, start] = 1.0
    rho = evolve(lind, rho0, t, policy).matrix
    probs = np.array([rho[i, i].real for i in accessible_indices(spec.T)])
    leakage = float(abs(np.trace(rho).real - probs.sum()))
    logger.debug(f"Qubit timer T={spec.T} t={t}: leakage {leakage:.2e}")
    return GadgetDistribution(TimerDistribution(np.clip(probs, 0.0, None), atol=1e-8), leakage)
