"""Dense Lindbladian forms of a switched generator, with register or qubit-gadget timers.

Sites 0..n-1 are the system; the timers follow. In register form timer m is
one site of dimension T+1; in gadget form it is a chain of T+1 qubits.
"""

import logging
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp

from mixphase.lindblad import LindbladTerm, Lindbladian, evolve
from mixphase.lindblad.superop import StateLike
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, partial_trace_array
from mixphase.qstate.operators import embed_matrix
from mixphase.qstate.states import DensityMatrix
from mixphase.switchgear.switched import SwitchedLindbladian
from mixphase.timer.gadget import check_gadget_size, gadget_jump, phi_index

logger = logging.getLogger(__name__)

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def _register_hop(T: int, gamma: float) -> np.ndarray:
    hop = np.zeros((T + 1, T + 1), dtype=complex)
    for k in range(T):
        hop[k + 1, k] = 1.0
    return np.sqrt(gamma) * hop


def _register_projector(sw: SwitchedLindbladian, groups: List[int]) -> np.ndarray:
    diag = np.zeros(sw.timer.T + 1)
    for g in groups:
        diag[sw.group_slice(g)] = 1.0
    return np.diag(diag).astype(complex)


def _gadget_projector(
    sw: SwitchedLindbladian, group: int, base: int
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Level >= b_g iff qubit b_g is 1; level < b_{g+1} iff qubit b_{g+1} is 0."""
    levels = sw.timer.stage_levels(group)
    support: List[int] = []
    mat = np.ones((1, 1), dtype=complex)
    if levels.start >= 1:
        support.append(base + levels.start)
        mat = np.kron(mat, P1)
    if levels.stop <= sw.timer.T:
        support.append(base + levels.stop)
        mat = np.kron(mat, P0)
    return tuple(support), mat


def _controlled(term: LindbladTerm, support: Tuple[int, ...], proj: np.ndarray) -> LindbladTerm:
    h = None if term.hamiltonian is None else np.kron(proj, term.hamiltonian)
    jumps = tuple(np.kron(proj, j) for j in term.jumps)
    return LindbladTerm(support + term.support, h, jumps)


def composite_geometry(sw: SwitchedLindbladian, full_gadget: bool = False) -> LatticeGeometry:
    T = sw.timer.T
    if full_gadget:
        registers = LatticeGeometry.chain(T + 1)
        geom = sw.geometry
        for _ in range(sw.n_timers):
            geom = geom.concat(registers)
        return geom
    return sw.geometry.concat(LatticeGeometry.sites([T + 1] * sw.n_timers, edges=[]))


def _timer_base(sw: SwitchedLindbladian, m: int, full_gadget: bool) -> int:
    n = sw.geometry.n_sites
    return n + m * (sw.timer.T + 1) if full_gadget else n + m


def timer_terms(sw: SwitchedLindbladian, full_gadget: bool = False) -> List[LindbladTerm]:
    """Hop terms of all timers."""
    T = sw.timer.T
    terms = []
    for m in range(sw.n_timers):
        base = _timer_base(sw, m, full_gadget)
        if full_gadget:
            jump = gadget_jump(sw.timer.gamma)
            terms += [LindbladTerm.dissipator((base + j, base + j + 1), [jump]) for j in range(T)]
        else:
            terms.append(LindbladTerm.dissipator((base,), [_register_hop(T, sw.timer.gamma)]))
    return terms


def controlled_terms(sw: SwitchedLindbladian, full_gadget: bool = False) -> List[LindbladTerm]:
    """System terms tensored with the control projector of their timer."""
    terms = []
    for s, stage in enumerate(sw.stages):
        groups = [g for g in range(sw.n_groups) if sw.stage_for_group(g) == s]
        for term, m in zip(stage.terms, sw.term_timers[s]):
            base = _timer_base(sw, m, full_gadget)
            if len(groups) == sw.n_groups:
                terms.append(term)
            elif full_gadget:
                for g in groups:
                    support, proj = _gadget_projector(sw, g, base)
                    terms.append(_controlled(term, support, proj))
            else:
                terms.append(_controlled(term, (base,), _register_projector(sw, groups)))
    return terms


def as_lindbladian(
    sw: SwitchedLindbladian, full_gadget: bool = False, policy: NumericPolicy = DEFAULT_POLICY
) -> Lindbladian:
    """
    Single Lindbladian on system plus timers.

    Raises:
        NumericGuardError: If the gadget form exceeds the gadget limit
    """
    if full_gadget:
        check_gadget_size(sw.timer, policy)
    geom = composite_geometry(sw, full_gadget)
    policy.check_dense(geom.dim, "composite")
    terms = timer_terms(sw, full_gadget) + controlled_terms(sw, full_gadget)
    return Lindbladian(geom, tuple(terms))


def timer_ground_state(sw: SwitchedLindbladian, full_gadget: bool = False) -> np.ndarray:
    """Projector onto all timers at level 0."""
    T = sw.timer.T
    if full_gadget:
        local = np.zeros(2 ** (T + 1), dtype=complex)
        local[phi_index(T, 0)] = 1.0
    else:
        local = np.zeros(T + 1, dtype=complex)
        local[0] = 1.0
    ket = np.ones(1, dtype=complex)
    for _ in range(sw.n_timers):
        ket = np.kron(ket, local)
    return np.outer(ket, ket.conj())


def dense_marginal(
    sw: SwitchedLindbladian,
    rho0: StateLike,
    t: float,
    full_gadget: bool = False,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """System marginal of the dense composite evolution."""
    lind = as_lindbladian(sw, full_gadget, policy)
    mat = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    initial = np.kron(mat, timer_ground_state(sw, full_gadget))
    final = evolve(lind, initial, t, policy).matrix
    keep = range(sw.geometry.n_sites)
    return partial_trace_array(final, lind.geometry.local_dims, keep)


def _band_projector(sw: SwitchedLindbladian, group: int, full_gadget: bool) -> np.ndarray:
    """Projector onto all timers in level group ``group`` (identity on the system)."""
    geom = composite_geometry(sw, full_gadget)
    proj = np.eye(geom.dim, dtype=complex)
    for m in range(sw.n_timers):
        base = _timer_base(sw, m, full_gadget)
        if full_gadget:
            # span of the accessible strings phi_k with k in the group
            T = sw.timer.T
            diag = np.zeros(2 ** (T + 1))
            for k in sw.timer.stage_levels(group):
                diag[phi_index(T, k)] = 1.0
            support, local = tuple(range(base, base + T + 1)), np.diag(diag).astype(complex)
        else:
            support, local = (base,), _register_projector(sw, [group])
        if support:
            proj = proj @ embed_matrix(local, support, geom.local_dims)
    return proj


def _superprojector(proj: np.ndarray) -> sp.csr_matrix:
    p = sp.csr_matrix(proj)
    return sp.csr_matrix(sp.kron(p.conj(), p))


def factorization_residual(
    sw: SwitchedLindbladian, full_gadget: bool = False, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """
    max |P S P - P (S_T + S_0) P| for P the projection onto every timer in its
    first level group, S_T the bare timers and S_0 the uncontrolled first stage.
    """
    full = as_lindbladian(sw, full_gadget, policy)
    geom = full.geometry
    timers = Lindbladian(geom, tuple(timer_terms(sw, full_gadget)))
    first = Lindbladian(geom, sw.stages[0].terms)
    p = _superprojector(_band_projector(sw, 0, full_gadget))
    diff = full.superoperator(policy) - timers.superoperator(policy) - first.superoperator(policy)
    residual = p @ diff @ p
    value = float(abs(residual).max()) if residual.nnz else 0.0
    logger.debug(f"Factorization residual {value:.3e}")
    return value


def band_commutator_residual(
    sw: SwitchedLindbladian, group: int, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """max |P [S_T, S_sys] P| with P projecting every register onto level group ``group``."""
    full = as_lindbladian(sw, False, policy)
    geom = full.geometry
    s_t = Lindbladian(geom, tuple(timer_terms(sw))).superoperator(policy)
    s_sys = Lindbladian(geom, tuple(controlled_terms(sw))).superoperator(policy)
    p = _superprojector(_band_projector(sw, group, False))
    residual = p @ (s_t @ s_sys - s_sys @ s_t) @ p
    return float(abs(residual).max()) if residual.nnz else 0.0
