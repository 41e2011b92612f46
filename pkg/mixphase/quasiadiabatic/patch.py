"""
Splitting quasi-adiabatic transport into region transports and boundary patches.

The transport U(s) of psi' = i K psi factors as U = W V with W the product of
transports generated by the terms of K inside each region, and V the patch
operator generated by L(s) = W^dag (K - sum_R K_R) W. Truncating L to the
sites near region boundaries gives V_Omega; on a ring the blocks and patches
form a depth-two circuit.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mixphase.qstate.geometry import LatticeGeometry, LatticeKind
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, operator_norm, trace_distance
from mixphase.qstate.operators import conditional_expectation, local_part
from mixphase.quasiadiabatic.generator import FilterSpec, trapezoid_transport
from mixphase.quasiadiabatic.locality import quasi_local_terms
from mixphase.quasiadiabatic.path import HamiltonianPath
from mixphase.switchgear.circuit import CircuitSchedule, Gate, GateLayer
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

PATCH_HEADER = ("omega", "patch_residual")

DEFAULT_STEPS = 32


def _region_generators(
    path: HamiltonianPath,
    s: float,
    parts: Sequence[Sequence[int]],
    spec: FilterSpec,
    policy: NumericPolicy,
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """K(s) and, per part, the sum of the k_{j,l} whose ball lies inside it."""
    terms = list(quasi_local_terms(path, s, spec, policy).values())
    dim = path.geometry.dim
    total = np.zeros((dim, dim), dtype=complex)
    for t in terms:
        total += t.matrix
    restricted = []
    for part in parts:
        inside = set(part)
        k = np.zeros((dim, dim), dtype=complex)
        for t in terms:
            if set(t.sites) <= inside:
                k += t.matrix
        restricted.append(k)
    return total, restricted


@dataclass
class SplitTransport:
    """
    Full and region-restricted transports sampled on a grid.

    Attributes:
        parts: Disjoint site sets covering the lattice
        grid: s samples, starting at 0
        full: U(s_k) generated by K
        parts_transport: Per part, U_R(s_k) generated by K_R
        product: W(s_k), the product of the part transports
        remainder: K(s_k) - sum_R K_R(s_k)
    """

    parts: Tuple[Tuple[int, ...], ...]
    grid: np.ndarray
    full: List[np.ndarray]
    parts_transport: List[List[np.ndarray]]
    product: List[np.ndarray]
    remainder: List[np.ndarray]

    def patch_generators(self) -> List[np.ndarray]:
        """L(s_k) = W^dag (K - sum_R K_R) W."""
        return [w.conj().T @ r @ w for w, r in zip(self.product, self.remainder)]


def split_transport(
    path: HamiltonianPath,
    parts: Sequence[Sequence[int]],
    s_final: float = 1.0,
    n_steps: int = DEFAULT_STEPS,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> SplitTransport:
    """
    Sample K and its region restrictions on [0, s_final] and integrate all transports.

    Raises:
        ValidationError: If the parts are not a partition of the lattice
    """
    geometry = path.geometry
    parts = tuple(tuple(sorted(set(p))) for p in parts)
    covered = [x for p in parts for x in p]
    if sorted(covered) != list(range(geometry.n_sites)):
        raise ValidationError(f"Regions {parts} do not partition {geometry.n_sites} sites")
    policy.check_dense(geometry.dim, "split transport")
    spec = spec or FilterSpec(path.uniform_gap(policy=policy))
    grid = np.linspace(0.0, s_final, n_steps + 1)
    totals, per_part = [], []
    for s in grid:
        total, restricted = _region_generators(path, float(s), parts, spec, policy)
        totals.append(total)
        per_part.append(restricted)
    full = trapezoid_transport(totals, grid)
    parts_transport = [
        trapezoid_transport([row[i] for row in per_part], grid) for i in range(len(parts))
    ]
    product = []
    for k in range(len(grid)):
        w = np.eye(geometry.dim, dtype=complex)
        for transports in parts_transport:
            w = transports[k] @ w
        product.append(w)
    remainder = [t - sum(row) for t, row in zip(totals, per_part)]
    return SplitTransport(parts, grid, full, parts_transport, product, remainder)


def boundary_edges(geometry: LatticeGeometry, region: Sequence[int]) -> List[Tuple[int, int]]:
    """Edges (a, b) with a in the region and b outside it."""
    inside = set(region)
    out = []
    for a, b in geometry.edges:
        if (a in inside) != (b in inside):
            out.append((a, b) if a in inside else (b, a))
    return out


def patch_sites(geometry: LatticeGeometry, region: Sequence[int], omega: int) -> Tuple[int, ...]:
    """
    Union over boundary edges (a, b) of ceil(omega/2) sites of the region nearest a
    and floor(omega/2) sites of the complement nearest b.
    """
    inside = set(region)
    inner, outer = (omega + 1) // 2, omega // 2
    sites = set()
    for a, b in boundary_edges(geometry, region):
        sites |= geometry.neighborhood([a], inner - 1) & inside
        sites |= geometry.neighborhood([b], outer - 1) - inside
    return tuple(sorted(sites))


def _check_region(geometry: LatticeGeometry, region: Sequence[int], omega: int) -> None:
    inside = set(region)
    if not inside or len(inside) >= geometry.n_sites:
        raise ValidationError("Region must be a nonempty proper subset of the lattice")
    geometry.validate_sites(inside)
    if len(boundary_edges(geometry, region)) > 2 or geometry.spatial_dim != 1:
        raise ValidationError(f"Region {sorted(inside)} is not a single interval of a 1D lattice")
    if omega < 1:
        raise ValidationError(f"Patch width must be at least 1, got {omega}")
    if (omega + 1) // 2 > len(inside) or omega // 2 > geometry.n_sites - len(inside):
        raise ValidationError(f"Patch width {omega} exceeds the margin around {sorted(inside)}")


@dataclass
class PatchSplit:
    """
    Attributes:
        omega: Patch width
        sites: Sites of the truncated patch generator
        patch: V_Omega(s_final)
        residual: ||W V_Omega - U|| at s_final
        support_defect: ||L_Omega - E_sites(L_Omega)||, zero by construction
    """

    omega: int
    sites: Tuple[int, ...]
    patch: np.ndarray
    residual: float
    support_defect: float


def patch_split(
    path: HamiltonianPath,
    region: Sequence[int],
    omega: int,
    transport: Optional[SplitTransport] = None,
    s_final: float = 1.0,
    n_steps: int = DEFAULT_STEPS,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> PatchSplit:
    """
    Approximate U(s_final) by U_A U_Abar V_Omega.

    Args:
        path: Hamiltonian path
        region: Interval A of the lattice
        omega: Patch width across each boundary of A
        transport: Precomputed split transport for (A, complement); reused across a ladder
        s_final: End of the transport
        n_steps: Trapezoid steps on [0, s_final]
        policy: Dense guard

    Raises:
        ValidationError: If A is not an interval or omega exceeds the margin
    """
    geometry = path.geometry
    _check_region(geometry, region, omega)
    if transport is None:
        complement = [x for x in range(geometry.n_sites) if x not in set(region)]
        transport = split_transport(path, [region, complement], s_final, n_steps, policy=policy)
    sites = patch_sites(geometry, region, omega)
    dims = geometry.local_dims
    truncated = [conditional_expectation(g, dims, sites) for g in transport.patch_generators()]
    v = trapezoid_transport(truncated, transport.grid)[-1]
    residual = operator_norm(transport.product[-1] @ v - transport.full[-1])
    last = truncated[-1]
    defect = operator_norm(last - conditional_expectation(last, dims, sites))
    logger.debug(f"Patch width {omega} on sites {sites}: residual {residual:.3e}")
    return PatchSplit(omega, sites, v, residual, defect)


@dataclass
class PatchLadder:
    region: Tuple[int, ...]
    splits: List[PatchSplit]

    @property
    def residuals(self) -> np.ndarray:
        return np.array([p.residual for p in self.splits])

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.residuals) <= 1e-12))

    def rows(self) -> List[Tuple[int, float]]:
        return [(p.omega, p.residual) for p in self.splits]

    def write_csv(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(PATCH_HEADER)
            for omega, residual in self.rows():
                writer.writerow([omega, f"{residual:.12e}"])


def patch_ladder(
    path: HamiltonianPath,
    region: Sequence[int],
    omegas: Sequence[int],
    s_final: float = 1.0,
    n_steps: int = DEFAULT_STEPS,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> PatchLadder:
    """Patch residuals for each width, sharing one split transport."""
    geometry = path.geometry
    for omega in omegas:
        _check_region(geometry, region, omega)
    complement = [x for x in range(geometry.n_sites) if x not in set(region)]
    transport = split_transport(path, [region, complement], s_final, n_steps, policy=policy)
    splits = [
        patch_split(path, region, omega, transport, s_final, n_steps, policy)
        for omega in sorted(omegas)
    ]
    ladder = PatchLadder(tuple(sorted(set(region))), splits)
    if not ladder.monotone:
        logger.warning(f"Patch residuals not monotone in omega: {ladder.residuals}")
    return ladder


def ring_blocks(n_sites: int, omega: int) -> List[Tuple[int, ...]]:
    """Consecutive blocks of ``omega`` sites; the last one may be shorter."""
    if omega < 1:
        raise ValidationError(f"Block size must be at least 1, got {omega}")
    return [tuple(range(k, min(k + omega, n_sites))) for k in range(0, n_sites, omega)]


def block_patches(
    blocks: Sequence[Sequence[int]], periodic: bool = True
) -> List[Tuple[int, ...]]:
    """
    Disjoint patches straddling each block boundary: the last ceil(|B|/2)
    sites of one block and the first floor(|B'|/2) of the next. On an open
    chain the boundary between the last and first block is skipped.
    """
    if len(blocks) < 2:
        return []
    patches = []
    count = len(blocks) if periodic else len(blocks) - 1
    for k, block in enumerate(blocks[:count]):
        following = blocks[(k + 1) % len(blocks)]
        tail = block[len(block) - (len(block) + 1) // 2 :]
        head = following[: len(following) // 2]
        patches.append(tuple(sorted(tail + head)))
    return patches


@dataclass
class CircuitReport:
    """
    Attributes:
        omega: Block size
        schedule: Patch layer followed by block layer
        fidelity: <psi|P(s_final)|psi> for psi = C psi_0
        distance: Trace distance between C rho_0 C^dag and the ground state at s_final
        circuit_residual: ||C - U(s_final)|| against the untruncated transport
    """

    omega: int
    schedule: CircuitSchedule
    fidelity: float
    distance: float
    circuit_residual: float

    @property
    def depth(self) -> int:
        return len(self.schedule.layers)


def _local_unitary(
    generators: Sequence[np.ndarray], grid: np.ndarray, dims: Sequence[int], sites
) -> np.ndarray:
    local = [local_part(g, dims, sites) for g in generators]
    return trapezoid_transport(local, grid)[-1]


def circuit_from_path(
    path: HamiltonianPath,
    omega: int,
    s_final: float = 1.0,
    n_steps: int = DEFAULT_STEPS,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> CircuitReport:
    """
    Depth-two circuit approximating the transport along a 1D ring path.

    Layer one holds one patch gate per block boundary, generated by the
    conditional expectation of L(s) onto that patch. Layer two holds the
    block transports. With a single block the circuit is the exact transport.

    Raises:
        ValidationError: If the path is not on a 1D lattice
    """
    geometry = path.geometry
    if geometry.spatial_dim != 1:
        raise ValidationError("Block circuits are built on 1D lattices only")
    dims = geometry.local_dims
    blocks = ring_blocks(geometry.n_sites, omega)
    transport = split_transport(path, blocks, s_final, n_steps, policy=policy)
    generators = transport.patch_generators()
    patch_gates = [
        Gate(patch, _local_unitary(generators, transport.grid, dims, patch))
        for patch in block_patches(blocks, geometry.kind is not LatticeKind.CHAIN)
    ]
    block_gates = []
    for block, transports in zip(blocks, transport.parts_transport):
        block_gates.append(Gate(block, local_part(transports[-1], dims, block)))
    layers = [GateLayer(tuple(block_gates))]
    if patch_gates:
        layers.insert(0, GateLayer(tuple(patch_gates)))
    schedule = CircuitSchedule(geometry, tuple(layers))

    circuit = schedule.unitary()
    circuit_residual = operator_norm(circuit - transport.full[-1])
    psi0 = path.spectrum(0.0, policy).ground_state
    psi = circuit @ psi0
    target = path.spectrum(s_final, policy)
    fidelity = float(np.real(np.vdot(psi, target.ground_projector @ psi)))
    rho = np.outer(psi, psi.conj())
    ground = target.ground_state
    distance = trace_distance(rho, np.outer(ground, ground.conj()))
    logger.info(
        f"Block circuit omega={omega}: {len(block_gates)} blocks, "
        f"{len(patch_gates)} patches, fidelity {fidelity:.8f}"
    )
    return CircuitReport(omega, schedule, fidelity, distance, circuit_residual)


def circuit_ladder(
    path: HamiltonianPath, omegas: Sequence[int], **kwargs
) -> Dict[int, CircuitReport]:
    return {omega: circuit_from_path(path, omega, **kwargs) for omega in sorted(omegas)}
