"""
Quasi-locality of K(s): the telescoping decomposition over growing balls,
the per-radius profile ||k_{j,l}||, light-cone fits and the bound reporters.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, dims_product, operator_norm
from mixphase.qstate.operators import LocalOperator, embed_matrix
from mixphase.quasiadiabatic.generator import FilterSpec, filter_transform
from mixphase.quasiadiabatic.path import HamiltonianPath
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

DELTA_HEADER = ("n", "delta_norm")


@dataclass(frozen=True)
class CenteredTerm:
    """A derivative term h'_{j,a}: supported within distance ``radius`` of ``center``."""

    center: int
    radius: int
    op: LocalOperator


def centered_terms(path: HamiltonianPath, s: float) -> List[CenteredTerm]:
    geometry = path.geometry
    out = []
    for op in path.derivative_terms(s):
        center = op.support[0]
        radius = int(max(geometry.distance(center, x) for x in op.support))
        out.append(CenteredTerm(center, radius, op))
    return out


def region(geometry: LatticeGeometry, center: int, radius: float) -> Tuple[int, ...]:
    return tuple(sorted(geometry.neighborhood([center], radius)))


def _covering_depth(geometry: LatticeGeometry, center: int, radius: int) -> int:
    reach = int(np.ceil(max(geometry.distance(center, x) for x in range(geometry.n_sites))))
    return max(0, reach - radius)


def _embed_into(matrix: np.ndarray, sites: Sequence[int], outer: Sequence[int], dims) -> np.ndarray:
    position = {x: k for k, x in enumerate(outer)}
    return embed_matrix(matrix, [position[x] for x in sites], dims)


@dataclass
class DeltaDecomposition:
    """
    Delta^n for one derivative slice, all expressed on the outermost region.

    Attributes:
        center: Ball center j
        radius: Radius of the derivative slice
        sites: Sorted sites of the outermost region
        deltas: Delta^0 ... Delta^{n_max} as matrices on ``sites``
    """

    center: int
    radius: int
    sites: Tuple[int, ...]
    deltas: List[np.ndarray]

    @property
    def n_max(self) -> int:
        return len(self.deltas) - 1

    @property
    def norms(self) -> np.ndarray:
        return np.array([operator_norm(d) for d in self.deltas])

    def total(self) -> np.ndarray:
        return np.sum(self.deltas, axis=0)

    def full(self, matrix: np.ndarray, geometry: LatticeGeometry) -> np.ndarray:
        return embed_matrix(matrix, self.sites, geometry.local_dims)

    def rows(self) -> List[Tuple[int, float]]:
        return [(n, float(v)) for n, v in enumerate(self.norms)]


def _decompose(
    path: HamiltonianPath,
    s: float,
    center: int,
    radius: int,
    ops: Sequence[LocalOperator],
    n_max: Optional[int],
    spec: FilterSpec,
    policy: NumericPolicy,
) -> DeltaDecomposition:
    geometry = path.geometry
    depth = _covering_depth(geometry, center, radius) if n_max is None else n_max
    outer = region(geometry, center, radius + depth)
    outer_dims = geometry.dims_of(outer)
    policy.check_dense(dims_product(outer_dims), "ball")
    filtered: List[np.ndarray] = []
    for n in range(depth + 1):
        sites = region(geometry, center, radius + n)
        dims = geometry.dims_of(sites)
        position = {x: k for k, x in enumerate(sites)}
        op = sum(
            embed_matrix(o.matrix, [position[x] for x in o.support], dims) for o in ops
        )
        value = filter_transform(path.restricted_hamiltonian(s, sites), op, spec)
        filtered.append(_embed_into(value, sites, outer, outer_dims))
    deltas = [filtered[0]] + [b - a for a, b in zip(filtered, filtered[1:])]
    return DeltaDecomposition(center, radius, outer, deltas)


def delta_decomposition(
    path: HamiltonianPath,
    s: float,
    center: int,
    radius: int,
    n_max: Optional[int] = None,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> DeltaDecomposition:
    """
    Delta^n(h'_{j,a}) = filtered evolution under H_{j,a+n} minus under H_{j,a+n-1}.

    Args:
        path: Hamiltonian path
        s: Path parameter
        center: Ball center j
        radius: Radius a of the derivative slice
        n_max: Largest n; by default until the ball covers the lattice
        spec: Filter; by default fixed by the uniform gap
        policy: Dense guard for the outermost ball

    Raises:
        ValidationError: If no derivative term sits at (center, radius)
        NumericGuardError: If the outermost ball exceeds the dense guard
    """
    ops = [t.op for t in centered_terms(path, s) if (t.center, t.radius) == (center, radius)]
    if not ops:
        raise ValidationError(f"No derivative term at center {center} with radius {radius}")
    spec = spec or FilterSpec(path.uniform_gap(policy=policy))
    return _decompose(path, s, center, radius, ops, n_max, spec, policy)


@dataclass(frozen=True)
class QuasiLocalTerm:
    """k_{j,l}: the part of K(s) first reached on the ball of radius l around j."""

    center: int
    ell: int
    sites: Tuple[int, ...]
    matrix: np.ndarray


def quasi_local_terms(
    path: HamiltonianPath,
    s: float,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Dict[Tuple[int, int], QuasiLocalTerm]:
    """All k_{j,l} as full-space matrices; their sum is K(s)."""
    spec = spec or FilterSpec(path.uniform_gap(policy=policy))
    geometry = path.geometry
    grouped: Dict[Tuple[int, int], List[LocalOperator]] = {}
    for term in centered_terms(path, s):
        grouped.setdefault((term.center, term.radius), []).append(term.op)
    out: Dict[Tuple[int, int], np.ndarray] = {}
    for (center, radius), ops in grouped.items():
        decomposition = _decompose(path, s, center, radius, ops, None, spec, policy)
        for n, delta in enumerate(decomposition.deltas):
            key = (center, radius + n)
            full = decomposition.full(delta, geometry)
            out[key] = out[key] + full if key in out else full
    return {
        key: QuasiLocalTerm(key[0], key[1], region(geometry, *key), matrix)
        for key, matrix in out.items()
    }


def reconstruction_residual(
    path: HamiltonianPath,
    s: float,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """||sum_{j,l} k_{j,l} - K(s)||."""
    spec = spec or FilterSpec(path.uniform_gap(policy=policy))
    terms = quasi_local_terms(path, s, spec, policy)
    total = np.sum([t.matrix for t in terms.values()], axis=0)
    direct = filter_transform(path.hamiltonian(s, policy), path.derivative(s), spec)
    return operator_norm(total - direct)


def decay_family(x, spatial_dim: int = 1):
    """F(x) = (1 + x)^-(d + 1)."""
    return (1.0 + np.asarray(x, dtype=float)) ** -(spatial_dim + 1)


def u_mu(t, mu: float):
    """
    exp(-mu t / log^2 t) for t >= e^2, held at its value at e^2 below.
    """
    t = np.maximum(np.asarray(t, dtype=float), np.e**2)
    return np.exp(-mu * t / np.log(t) ** 2)


def i_lambda(t, gap: float):
    """Large-time shape (gap t)^10 u_{2/7}(gap t) of the filter tail integral."""
    x = gap * np.asarray(t, dtype=float)
    return x**10 * u_mu(x, 2.0 / 7.0)


@dataclass
class QuasiLocalityProfile:
    """
    Measured ||k_{j,l}|| against l with fitted decay.

    Attributes:
        center: Ball center j
        radii: Radii l with a nonzero term
        norms: ||k_{j,l}||
        spatial_dim: Lattice dimension d of the decay family
        rate: Fitted a in ||k|| ~ exp(-a l) beyond the knee
        exponent: Fitted p in ||k|| ~ (1 + l)^-p beyond the knee
        knee: Radius of the largest term
    """

    center: int
    radii: np.ndarray
    norms: np.ndarray
    spatial_dim: int
    rate: float
    exponent: float
    knee: int

    @property
    def nonincreasing_beyond_knee(self) -> bool:
        tail = self.norms[self.radii >= self.knee]
        return bool(np.all(np.diff(tail) <= 1e-12))

    def reference(self) -> np.ndarray:
        """F(l) scaled to the knee value."""
        at_knee = self.norms[self.radii == self.knee][0]
        scale = at_knee / decay_family(self.knee, self.spatial_dim)
        return scale * decay_family(self.radii, self.spatial_dim)

    def rows(self) -> List[Tuple[int, float]]:
        return [(int(r), float(v)) for r, v in zip(self.radii, self.norms)]


def locality_profile(
    path: HamiltonianPath,
    s: float,
    center: int = 0,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
    floor: float = 1e-14,
) -> QuasiLocalityProfile:
    """Profile of ||k_{center,l}|| with log-linear and log-log fits beyond the knee."""
    terms = quasi_local_terms(path, s, spec, policy)
    picked = sorted((t.ell, operator_norm(t.matrix)) for t in terms.values() if t.center == center)
    if not picked:
        raise ValidationError(f"No quasi-local terms centered at {center}")
    radii = np.array([r for r, _ in picked])
    norms = np.array([v for _, v in picked])
    knee = int(radii[int(np.argmax(norms))])
    mask = (radii >= knee) & (norms > floor)
    rate, exponent = float("nan"), float("nan")
    if mask.sum() >= 2:
        rate = -float(np.polyfit(radii[mask], np.log(norms[mask]), 1)[0])
        exponent = -float(np.polyfit(np.log1p(radii[mask]), np.log(norms[mask]), 1)[0])
    else:
        logger.debug(f"Profile at center {center} has fewer than two terms above {floor}")
    return QuasiLocalityProfile(
        center, radii, norms, path.geometry.spatial_dim, rate, exponent, knee
    )


@dataclass(frozen=True)
class LightConeFit:
    """log C(r, t) ~ log K + a (v t - r) fitted outside the cone."""

    velocity: float
    decay: float
    prefactor: float
    points: int


def fit_light_cone(
    times: Sequence[float],
    distances: Sequence[float],
    table: np.ndarray,
    floor: float = 1e-13,
    ceiling: float = 0.5,
) -> LightConeFit:
    """
    Least-squares fit over entries of ``table[r, t]`` between floor and ceiling.

    Raises:
        ValidationError: If no entry lies in the cone-free regime
    """
    t_grid, r_grid = np.meshgrid(np.asarray(times, float), np.asarray(distances, float))
    mask = (table > floor) & (table < ceiling)
    if mask.sum() < 3:
        raise ValidationError("No commutators below the cone threshold; sample smaller times")
    design = np.column_stack([np.ones(mask.sum()), t_grid[mask], r_grid[mask]])
    coef, *_ = np.linalg.lstsq(design, np.log(table[mask]), rcond=None)
    decay = -float(coef[2])
    velocity = float(coef[1]) / decay if decay > 0 else float("nan")
    return LightConeFit(velocity, decay, float(np.exp(coef[0])), int(mask.sum()))


def hamiltonian_light_cone(
    path: HamiltonianPath,
    s: float,
    op: np.ndarray,
    site: int,
    times: Sequence[float],
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Tuple[np.ndarray, np.ndarray, LightConeFit]:
    """||[e^{iHt} A_site e^{-iHt}, A_x]|| tabulated against d(site, x) and t."""
    geometry = path.geometry
    dims = geometry.local_dims
    energies, vectors = np.linalg.eigh(path.hamiltonian(s, policy))
    a = embed_matrix(op, [site], dims)
    others = [x for x in range(geometry.n_sites) if x != site]
    distances = sorted({geometry.distance(site, x) for x in others})
    probes = {
        d: embed_matrix(op, [next(x for x in others if geometry.distance(site, x) == d)], dims)
        for d in distances
    }
    table = np.zeros((len(distances), len(times)))
    for k, t in enumerate(times):
        phase = vectors @ np.diag(np.exp(1j * energies * t)) @ vectors.conj().T
        evolved = phase @ a @ phase.conj().T
        for i, d in enumerate(distances):
            b = probes[d]
            table[i, k] = operator_norm(evolved @ b - b @ evolved)
    return np.array(distances), table, fit_light_cone(times, distances, table)
