"""Smooth families of local Hamiltonians H(s), s in [0, 1], and their spectral data."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from mixphase.models.paulis import X, Z
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.operators import LocalOperator, embed_many
from mixphase.utils.errors import GapCollapseError, ValidationError

logger = logging.getLogger(__name__)

DERIVATIVE_STEP = 1e-4

TermFunction = Callable[[float], List[LocalOperator]]


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of H(s) with the ground space split off."""

    s: float
    energies: np.ndarray
    vectors: np.ndarray
    ground_dim: int

    @property
    def gap(self) -> float:
        if self.ground_dim >= len(self.energies):
            return float("inf")
        return float(self.energies[self.ground_dim] - self.energies[self.ground_dim - 1])

    @property
    def ground_projector(self) -> np.ndarray:
        v = self.vectors[:, : self.ground_dim]
        return v @ v.conj().T

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]


@dataclass(frozen=True, eq=False)
class HamiltonianPath:
    """
    H(s) = sum of local terms, each a smooth function of s.

    Attributes:
        geometry: Lattice the terms live on
        term_fn: s -> list of LocalOperator; the list layout must not depend on s
        name: Label used in configs and reports
        ground_dim: Dimension of the gapped ground space
    """

    geometry: LatticeGeometry
    term_fn: TermFunction
    name: str = "path"
    ground_dim: int = 1

    def terms(self, s: float) -> List[LocalOperator]:
        return list(self.term_fn(float(s)))

    def hamiltonian(self, s: float, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
        policy.check_dense(self.geometry.dim, "Hamiltonian")
        h = embed_many(self.terms(s), self.geometry)
        return h if h is not None else np.zeros((self.geometry.dim,) * 2, dtype=complex)

    def derivative(self, s: float, step: float = DERIVATIVE_STEP) -> np.ndarray:
        """dH/ds by central differences."""
        return (self.hamiltonian(s + step) - self.hamiltonian(s - step)) / (2 * step)

    def derivative_terms(self, s: float, step: float = DERIVATIVE_STEP) -> List[LocalOperator]:
        """Per-term central differences; terms that do not move are dropped."""
        plus, minus = self.terms(s + step), self.terms(s - step)
        out = []
        for a, b in zip(plus, minus):
            if a.support != b.support:
                raise ValidationError("Path terms must keep their supports along s")
            d = (a.matrix - b.matrix) / (2 * step)
            if np.abs(d).max() > 1e-12:
                out.append(LocalOperator(a.support, d))
        return out

    def restricted_terms(self, s: float, sites: Iterable[int]) -> List[LocalOperator]:
        """Terms fully inside ``sites``, re-indexed onto the sorted sub-geometry."""
        kept = sorted(set(sites))
        index = {x: k for k, x in enumerate(kept)}
        return [
            LocalOperator(tuple(index[x] for x in op.support), op.matrix)
            for op in self.terms(s)
            if set(op.support) <= set(kept)
        ]

    def restricted_hamiltonian(self, s: float, sites: Iterable[int]) -> np.ndarray:
        """H_R on the Hilbert space of ``sites`` alone."""
        sub = self.geometry.restrict(sites)
        h = embed_many(self.restricted_terms(s, sites), sub)
        return h if h is not None else np.zeros((sub.dim, sub.dim), dtype=complex)

    def spectrum(self, s: float, policy: NumericPolicy = DEFAULT_POLICY) -> Spectrum:
        """
        Dense eigen-decomposition at ``s``.

        Raises:
            GapCollapseError: If the gap above the ground space is below tolerance
        """
        energies, vectors = np.linalg.eigh(self.hamiltonian(s, policy))
        spec = Spectrum(float(s), energies, vectors, self.ground_dim)
        if spec.gap <= policy.gap_tolerance:
            raise GapCollapseError(float(s), spec.gap, policy.gap_tolerance)
        return spec

    def gap_profile(
        self, grid: Sequence[float], policy: NumericPolicy = DEFAULT_POLICY
    ) -> np.ndarray:
        return np.array([self.spectrum(s, policy).gap for s in grid])

    def uniform_gap(self, n_points: int = 21, policy: NumericPolicy = DEFAULT_POLICY) -> float:
        """min_s gap(s) on a uniform grid over [0, 1]."""
        gap = float(self.gap_profile(np.linspace(0.0, 1.0, n_points), policy).min())
        logger.debug(f"Uniform gap of {self.name}: {gap:.6f}")
        return gap


def _field_terms(n: int, s: float) -> List[LocalOperator]:
    return [LocalOperator((j,), -(1 - s) * Z - s * X) for j in range(n)]


def single_qubit_path() -> HamiltonianPath:
    """H(s) = -(1 - s) Z - s X; gap 2 sqrt((1-s)^2 + s^2) >= sqrt(2)."""
    return HamiltonianPath(LatticeGeometry.chain(1), lambda s: _field_terms(1, s), "single_qubit")


def uncoupled_path(n: int) -> HamiltonianPath:
    """The single-qubit path on each of ``n`` independent ring sites."""
    return HamiltonianPath(LatticeGeometry.ring(n), lambda s: _field_terms(n, s), "uncoupled")


def paramagnetic_ring_path(n: int, coupling: float = 0.05) -> HamiltonianPath:
    """
    Rotating field with a weak ZZ ring coupling:
    H(s) = -sum_j [(1 - s) Z_j + s X_j] - J sum_j Z_j Z_{j+1}.
    """
    geometry = LatticeGeometry.ring(n)
    zz = np.kron(Z, Z)

    def terms(s: float) -> List[LocalOperator]:
        if n == 1:
            return _field_terms(n, s)
        bonds = [LocalOperator((j, (j + 1) % n), -coupling * zz) for j in range(n)]
        return _field_terms(n, s) + bonds

    return HamiltonianPath(geometry, terms, "paramagnetic_ring")


def constant_path(geometry: LatticeGeometry, terms: Sequence[LocalOperator]) -> HamiltonianPath:
    fixed = list(terms)
    return HamiltonianPath(geometry, lambda s: fixed, "constant")


PATHS: Dict[str, Callable[..., HamiltonianPath]] = {
    "single_qubit": lambda n_sites=1, coupling=0.0: single_qubit_path(),
    "uncoupled": lambda n_sites=4, coupling=0.0: uncoupled_path(n_sites),
    "paramagnetic_ring": lambda n_sites=6, coupling=0.05: paramagnetic_ring_path(
        n_sites, coupling
    ),
}


def build_path(name: str, n_sites: Optional[int] = None, coupling: Optional[float] = None):
    """
    Look up a shipped path by name.

    Raises:
        ValidationError: For an unknown name
    """
    if name not in PATHS:
        raise ValidationError(f"Unknown path '{name}'; choose from {sorted(PATHS)}")
    kwargs: Dict[str, float] = {}
    if n_sites is not None:
        kwargs["n_sites"] = n_sites
    if coupling is not None:
        kwargs["coupling"] = coupling
    return PATHS[name](**kwargs)
