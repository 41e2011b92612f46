"""Norms, partial traces, tolerances and random-state helpers."""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.stats import unitary_group

from mixphase.utils.errors import DimensionError, NumericGuardError

logger = logging.getLogger(__name__)

MatrixLike = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class NumericPolicy:
    """
    Central tolerances and size guards.

    Attributes:
        algebraic_atol: Tolerance for exact algebraic identities
        dynamics_atol: Tolerance for integrated dynamics
        positivity_atol: Allowed negative eigenvalue of a state
        dense_dim_limit: Largest Hilbert dimension handled with dense matrices
        superoperator_dim_limit: Largest D**2 for an assembled superoperator
        dense_expm_limit: Largest D**2 for the dense Pade exponential
        max_gadget_timer: Largest T for the literal T+1 qubit timer gadget
        gap_tolerance: Smallest admissible spectral gap along a path
        ket_dim_limit: Largest Hilbert dimension for state-vector-only work
    """

    algebraic_atol: float = 1e-10
    dynamics_atol: float = 1e-8
    positivity_atol: float = 1e-9
    dense_dim_limit: int = 2**13
    superoperator_dim_limit: int = 2**13
    dense_expm_limit: int = 2**10
    max_gadget_timer: int = 6
    gap_tolerance: float = 1e-6
    ket_dim_limit: int = 2**20

    def with_overrides(self, overrides: Optional[Dict[str, Any]] = None) -> "NumericPolicy":
        """Copy with the non-None entries of ``overrides`` applied."""
        if not overrides:
            return self
        known = {k: v for k, v in overrides.items() if v is not None and hasattr(self, k)}
        return replace(self, **known)

    def check_dense(self, dim: int, what: str = "operator") -> None:
        """
        Raise if ``dim`` exceeds the dense regime.

        Raises:
            NumericGuardError: If the dimension guard is exceeded
        """
        if dim > self.dense_dim_limit:
            raise NumericGuardError(
                "dense_dim_limit",
                f"Dense {what} of dimension {dim} exceeds {self.dense_dim_limit}",
            )

    def fits_superoperator(self, dim: int) -> bool:
        """True when a superoperator over Hilbert dimension ``dim`` may be assembled."""
        return dim <= self.dense_dim_limit and dim * dim <= self.superoperator_dim_limit

    def check_ket(self, dim: int, what: str = "ket") -> None:
        """
        Raise if a state vector of dimension ``dim`` is too large.

        Raises:
            NumericGuardError: If the ket guard is exceeded
        """
        if dim > self.ket_dim_limit:
            raise NumericGuardError(
                "ket_dim_limit",
                f"State vector {what} of dimension {dim} exceeds {self.ket_dim_limit}",
            )


DEFAULT_POLICY = NumericPolicy()


# ----------------------------------------------------------------------
# Norms
# ----------------------------------------------------------------------


def to_dense(a: MatrixLike, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Dense copy of ``a`` with the dense-dimension guard applied."""
    if sp.issparse(a):
        policy.check_dense(a.shape[0])
        return a.toarray()
    return np.asarray(a)


def to_sparse(a: MatrixLike) -> sp.csr_matrix:
    """CSR copy of ``a``."""
    return sp.csr_matrix(a)


def is_hermitian(a: np.ndarray, atol: float = 1e-10) -> bool:
    return a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, atol=atol, rtol=0.0)


def trace_norm(a: MatrixLike) -> float:
    """
    Schatten 1-norm (sum of singular values).

    Hermitian inputs use the eigenvalue route.
    """
    a = to_dense(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace_norm expects a square matrix, got {a.shape}")
    if is_hermitian(a, atol=1e-14):
        return float(np.abs(sla.eigvalsh((a + a.conj().T) / 2)).sum())
    return float(sla.svdvals(a).sum())


def operator_norm(a: MatrixLike) -> float:
    """Largest singular value."""
    a = to_dense(a)
    if a.size == 0:
        return 0.0
    return float(sla.svdvals(a)[0])


def trace_distance(rho: MatrixLike, sigma: MatrixLike) -> float:
    """(1/2) ||rho - sigma||_1."""
    return 0.5 * trace_norm(to_dense(rho) - to_dense(sigma))


def min_eigenvalue(rho: MatrixLike) -> float:
    """Smallest eigenvalue of the Hermitian part."""
    a = to_dense(rho)
    return float(sla.eigvalsh((a + a.conj().T) / 2)[0])


def von_neumann_entropy(rho: MatrixLike, base: float = 2.0) -> float:
    """S(rho) = -Tr rho log rho, clipping tiny negative eigenvalues."""
    evals = np.clip(sla.eigvalsh(to_dense(rho)), 0.0, None)
    evals = evals[evals > 1e-15]
    if evals.size == 0:
        return 0.0
    return float(-(evals * np.log(evals)).sum() / np.log(base))


def fidelity_pure(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for normalized vectors."""
    return float(abs(np.vdot(psi, phi)) ** 2)


# ----------------------------------------------------------------------
# Partial trace
# ----------------------------------------------------------------------


def partial_trace_array(matrix: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    Trace out every factor not in ``keep``.

    Args:
        matrix: Operator on the tensor product of ``dims``
        dims: Local dimensions, site 0 leftmost
        keep: Sites to keep; the result lists them in ascending order

    Returns:
        np.ndarray: Reduced operator (1x1 when ``keep`` is empty)
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(keep))
    if any(not (0 <= k < n) for k in keep):
        raise DimensionError(f"unknown sites {keep} for {n} factors")
    total = int(np.prod(dims, dtype=np.int64)) if dims else 1
    matrix = np.asarray(matrix)
    if matrix.shape != (total, total):
        raise DimensionError(f"Matrix shape {matrix.shape} does not match dims {dims}")
    traced = [i for i in range(n) if i not in keep]
    tensor = matrix.reshape(dims + dims)
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64)) if keep else 1
    dt = total // dk
    tensor = tensor.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", tensor)


# ----------------------------------------------------------------------
# Random objects
# ----------------------------------------------------------------------


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary."""
    return unitary_group.rvs(dim, random_state=rng)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Random density matrix from a Ginibre matrix of the given rank."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Ginibre matrix with unit-variance entries."""
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = random_matrix(dim, rng)
    return (a + a.conj().T) / 2


def kron_all(factors: Sequence[MatrixLike]) -> np.ndarray:
    """Kronecker product of ``factors`` in order (first factor leftmost)."""
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, to_dense(f))
    return out


def ket_kron(kets: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for k in kets:
        out = np.kron(out, k)
    return out


def dims_product(dims: Sequence[int]) -> int:
    return int(np.prod(list(dims), dtype=np.int64)) if len(dims) else 1

