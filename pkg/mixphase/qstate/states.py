"""Kets and density matrices bound to a lattice geometry."""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import (
    DEFAULT_POLICY,
    NumericPolicy,
    ket_kron,
    partial_trace_array,
    random_density,
    random_ket,
)
from mixphase.utils.errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector on ``geometry``."""

    geometry: LatticeGeometry
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape[0] != self.geometry.dim:
            raise DimensionError(
                f"Ket of length {amps.shape[0]} does not match geometry dimension "
                f"{self.geometry.dim}"
            )
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise ValidationError(f"Ket flagged normalized has norm {np.linalg.norm(amps):.12f}")

    @classmethod
    def basis(cls, geometry: LatticeGeometry, levels: Sequence[int]) -> "Ket":
        """Computational basis state |levels[0] levels[1] ...>."""
        if len(levels) != geometry.n_sites:
            raise DimensionError("One level per site required")
        index = int(np.ravel_multi_index(tuple(levels), geometry.local_dims))
        amps = np.zeros(geometry.dim, dtype=complex)
        amps[index] = 1.0
        return cls(geometry, amps)

    @classmethod
    def product(cls, geometry: LatticeGeometry, local_kets: Sequence[np.ndarray]) -> "Ket":
        """Product state of per-site kets (normalized on the fly)."""
        if len(local_kets) != geometry.n_sites:
            raise DimensionError("One local ket per site required")
        normed = [np.asarray(k, dtype=complex) / np.linalg.norm(k) for k in local_kets]
        return cls(geometry, ket_kron(normed))

    @classmethod
    def random(cls, geometry: LatticeGeometry, rng: np.random.Generator) -> "Ket":
        return cls(geometry, random_ket(geometry.dim, rng))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "Ket":
        n = self.norm()
        if n == 0:
            raise ValidationError("Cannot normalize the zero vector")
        return Ket(self.geometry, self.amplitudes / n)

    def inner(self, other: "Ket") -> complex:
        """<self|other>."""
        if other.geometry.dim != self.geometry.dim:
            raise DimensionError("Inner product of kets with different dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "Ket") -> "Ket":
        return Ket(
            self.geometry.concat(other.geometry),
            np.kron(self.amplitudes, other.amplitudes),
            self.normalized and other.normalized,
        )

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.geometry, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Density matrix on ``geometry``.

    Hermiticity, unit trace and positivity are checked on construction
    unless ``validate`` is False (trajectories produced by integrators
    carry their own error reports).
    """

    geometry: LatticeGeometry
    matrix: np.ndarray
    validate: bool = True
    policy: NumericPolicy = DEFAULT_POLICY

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        d = self.geometry.dim
        if mat.shape != (d, d):
            raise DimensionError(f"Density matrix shape {mat.shape} does not match dimension {d}")
        if not self.validate:
            return
        atol = self.policy.algebraic_atol
        if np.abs(mat - mat.conj().T).max() > atol:
            raise ValidationError("Density matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > atol:
            raise ValidationError(f"Density matrix has trace {np.trace(mat).real:.12f}")
        if d <= self.policy.dense_dim_limit:
            lowest = sla.eigvalsh(mat, subset_by_index=[0, 0])[0]
            if lowest < -self.policy.positivity_atol:
                raise ValidationError(f"Density matrix has negative eigenvalue {lowest:.3e}")

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        return ket.density()

    @classmethod
    def maximally_mixed(cls, geometry: LatticeGeometry) -> "DensityMatrix":
        return cls(geometry, np.eye(geometry.dim) / geometry.dim)

    @classmethod
    def random(
        cls, geometry: LatticeGeometry, rng: np.random.Generator, rank: Optional[int] = None
    ) -> "DensityMatrix":
        return cls(geometry, random_density(geometry.dim, rng, rank))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(
            self.geometry.concat(other.geometry),
            np.kron(self.matrix, other.matrix),
            validate=False,
        )

    def partial_trace(self, keep: Iterable[int]) -> "DensityMatrix":
        return partial_trace(self, keep)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """
    Reduced state on ``keep``.

    The result lives on ``rho.geometry.restrict(keep)``; an empty ``keep``
    gives the 1x1 matrix holding the trace.
    """
    keep = sorted(set(keep))
    rho.geometry.validate_sites(keep)
    reduced = partial_trace_array(rho.matrix, rho.geometry.local_dims, keep)
    return DensityMatrix(rho.geometry.restrict(keep), reduced, validate=False)
