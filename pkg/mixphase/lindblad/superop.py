"""Lindbladians as sums of local terms, their action and vectorized form."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from mixphase.lindblad.terms import LindbladTerm
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.operators import embed_matrix
from mixphase.qstate.states import DensityMatrix
from mixphase.utils.errors import DimensionError, NumericGuardError

logger = logging.getLogger(__name__)

StateLike = Union[DensityMatrix, np.ndarray]


def _right_dagger(x: np.ndarray, a: sp.csr_matrix) -> np.ndarray:
    """x @ a^dag using only sparse-times-dense products."""
    return np.asarray(a.conj() @ x.T).T


def _right(x: np.ndarray, a: sp.csr_matrix) -> np.ndarray:
    """x @ a using only sparse-times-dense products."""
    return np.asarray(a.T @ x.T).T


@dataclass(frozen=True)
class CompiledLindbladian:
    """
    Full-space sparse form: L(rho) = G rho + rho G^dag + sum_j L_j rho L_j^dag.

    G = -i H - (1/2) sum_j L_j^dag L_j.
    """

    dim: int
    effective: sp.csr_matrix
    jumps: Tuple[sp.csr_matrix, ...]


@dataclass(frozen=True, eq=False)
class Lindbladian:
    """
    Time-independent generator L = sum_X L_X on ``geometry``.

    Attributes:
        geometry: Lattice the terms live on
        terms: Local terms
    """

    geometry: LatticeGeometry
    terms: Tuple[LindbladTerm, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            term.check(self.geometry)

    @classmethod
    def zero(cls, geometry: LatticeGeometry) -> "Lindbladian":
        return cls(geometry, ())

    @property
    def dim(self) -> int:
        return self.geometry.dim

    @property
    def is_zero(self) -> bool:
        return not any(t.matrices for t in self.terms)

    @property
    def locality_radius(self) -> float:
        """Largest graph diameter of a term support."""
        radius = 0.0
        for term in self.terms:
            for a, b in combinations(term.support, 2):
                radius = max(radius, self.geometry.distance(a, b))
        return radius

    def norm_estimate(self) -> float:
        """Sum of the per-term estimates 2(||H_X|| + sum_j ||L_Xj||^2)."""
        return float(sum(t.norm_estimate() for t in self.terms))

    @cached_property
    def compiled(self) -> CompiledLindbladian:
        d = self.dim
        dims = self.geometry.local_dims
        hamiltonian = sp.csr_matrix((d, d), dtype=complex)
        jumps: List[sp.csr_matrix] = []
        for term in self.terms:
            if term.hamiltonian is not None:
                hamiltonian = hamiltonian + embed_matrix(
                    term.hamiltonian, term.support, dims, sparse=True
                )
            for jump in term.jumps:
                jumps.append(embed_matrix(jump, term.support, dims, sparse=True))
        effective = -1j * hamiltonian
        for jump in jumps:
            effective = effective - 0.5 * (jump.conj().T @ jump)
        logger.debug(f"Compiled Lindbladian: dim={d}, {len(jumps)} jumps")
        return CompiledLindbladian(d, sp.csr_matrix(effective), tuple(jumps))

    def _matrix(self, rho: StateLike) -> np.ndarray:
        mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        if mat.shape != (self.dim, self.dim):
            raise DimensionError(
                f"Operator of shape {mat.shape} does not match Lindbladian dimension {self.dim}"
            )
        return mat

    def apply(self, rho: StateLike) -> np.ndarray:
        """
        Schrodinger-picture action d rho / dt = L(rho).

        Raises:
            DimensionError: On a dimension mismatch
        """
        mat = self._matrix(rho)
        c = self.compiled
        out = np.asarray(c.effective @ mat) + _right_dagger(mat, c.effective)
        for jump in c.jumps:
            out = out + _right_dagger(np.asarray(jump @ mat), jump)
        return out

    def adjoint_apply(self, op: StateLike) -> np.ndarray:
        """Heisenberg-picture action L*(A) = G^dag A + A G + sum_j L_j^dag A L_j."""
        mat = self._matrix(op)
        c = self.compiled
        out = np.asarray(c.effective.conj().T @ mat) + _right(mat, c.effective)
        for jump in c.jumps:
            out = out + np.asarray(jump.conj().T @ _right(mat, jump))
        return out

    def superoperator(self, policy: NumericPolicy = DEFAULT_POLICY) -> sp.csr_matrix:
        """
        Vectorized generator S with vec(L(rho)) = S vec(rho), column stacking.

        vec(A rho B) = (B^T (x) A) vec(rho), so
        S = I (x) G + conj(G) (x) I + sum_j conj(L_j) (x) L_j.

        Raises:
            NumericGuardError: If D leaves the dense regime, or D**2 exceeds the
                superoperator limit
        """
        d = self.dim
        if d > policy.dense_dim_limit:
            raise NumericGuardError(
                "dense_dim_limit",
                f"Superoperator over Hilbert dimension {d} exceeds {policy.dense_dim_limit}; "
                "use the integrator path (evolve_integrate)",
            )
        if d * d > policy.superoperator_dim_limit:
            raise NumericGuardError(
                "superoperator_dim_limit",
                f"Superoperator of size {d * d} exceeds {policy.superoperator_dim_limit}; "
                "use the integrator path (evolve_integrate)",
            )
        c = self.compiled
        eye = sp.identity(d, dtype=complex, format="csr")
        s = sp.kron(eye, c.effective) + sp.kron(c.effective.conj(), eye)
        for jump in c.jumps:
            s = s + sp.kron(jump.conj(), jump)
        return sp.csr_matrix(s)

    def restricted(self, sites: Iterable[int]) -> "Lindbladian":
        """
        Terms supported inside ``sites``, re-indexed onto the sub-geometry.

        Site ``sorted(sites)[k]`` becomes site ``k``.
        """
        kept = sorted(set(sites))
        inside = set(kept)
        index = {s: k for k, s in enumerate(kept)}
        terms = [t.reindexed(index) for t in self.terms if set(t.support) <= inside]
        return Lindbladian(self.geometry.restrict(kept), tuple(terms))

    def scaled(self, rate: float) -> "Lindbladian":
        return Lindbladian(self.geometry, tuple(t.scaled(rate) for t in self.terms))

    def with_terms(self, terms: Sequence[LindbladTerm]) -> "Lindbladian":
        return Lindbladian(self.geometry, self.terms + tuple(terms))

    def __add__(self, other: "Lindbladian") -> "Lindbladian":
        if other.geometry.local_dims != self.geometry.local_dims:
            raise DimensionError("Cannot add Lindbladians on different geometries")
        return Lindbladian(self.geometry, self.terms + other.terms)

    def __repr__(self) -> str:
        return f"Lindbladian({self.geometry!r}, terms={len(self.terms)})"

