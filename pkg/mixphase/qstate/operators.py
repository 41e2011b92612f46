"""Local operators and their embedding into lattice Hilbert spaces."""

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import (
    DEFAULT_POLICY,
    NumericPolicy,
    dims_product,
    partial_trace_array,
)
from mixphase.utils.errors import DimensionError


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """
    Matrix acting on an ordered set of sites.

    The tensor factors of ``matrix`` follow the order of ``support``.
    """

    support: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise DimensionError(f"LocalOperator needs a square matrix, got {self.matrix.shape}")
        if len(set(self.support)) != len(self.support):
            raise DimensionError(f"Repeated sites in support {self.support}")

    def check(self, geometry: LatticeGeometry) -> None:
        """
        Check support and matrix size against ``geometry``.

        Raises:
            DimensionError: On unknown sites or a size mismatch
        """
        dims = geometry.dims_of(self.support)
        if dims_product(dims) != self.matrix.shape[0]:
            raise DimensionError(
                f"Matrix of size {self.matrix.shape[0]} does not match support "
                f"{self.support} with dims {dims}"
            )

    def dagger(self) -> "LocalOperator":
        return LocalOperator(self.support, self.matrix.conj().T)

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        if self.support != other.support:
            raise DimensionError("Products need identical supports; embed first")
        return LocalOperator(self.support, self.matrix @ other.matrix)


def _site_permutation(order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Map natural flat indices to flat indices in the factor order ``order``."""
    ordered_dims = [dims[s] for s in order]
    total = dims_product(ordered_dims)
    idx = np.arange(total).reshape(ordered_dims) if ordered_dims else np.arange(1)
    inverse = np.argsort(order)
    return idx.transpose(inverse).ravel() if ordered_dims else idx


def embed_matrix(
    matrix: Union[np.ndarray, sp.spmatrix],
    support: Sequence[int],
    dims: Sequence[int],
    sparse: bool = False,
):
    """
    Embed ``matrix`` acting on ``support`` into the full tensor product.

    Args:
        matrix: Operator whose factors follow ``support``
        support: Sites the operator acts on
        dims: Local dimensions of all sites
        sparse: Return a CSR matrix instead of a dense array

    Returns:
        Full-space operator, ``matrix`` (x) identity with sites reordered
    """
    support = [int(s) for s in support]
    dims = [int(d) for d in dims]
    n = len(dims)
    unknown = [s for s in support if not (0 <= s < n)]
    if unknown:
        raise DimensionError(f"unknown sites {unknown} for {n} sites")
    local_dim = dims_product([dims[s] for s in support])
    if matrix.shape != (local_dim, local_dim):
        raise DimensionError(
            f"Matrix of shape {matrix.shape} does not match support {support} with dims "
            f"{[dims[s] for s in support]}"
        )
    rest = [s for s in range(n) if s not in support]
    rest_dim = dims_product([dims[s] for s in rest])
    if sparse:
        full = sp.kron(sp.csr_matrix(matrix), sp.identity(rest_dim, format="csr"), format="csr")
    else:
        full = np.kron(np.asarray(matrix), np.eye(rest_dim))
    order = support + rest
    if order == list(range(n)):
        return full
    perm = _site_permutation(order, dims)
    if sparse:
        return full[perm][:, perm].tocsr()
    return full[np.ix_(perm, perm)]


def embed(op: LocalOperator, geometry: LatticeGeometry, sparse: bool = False):
    """
    Embed a local operator into the Hilbert space of ``geometry``.

    Raises:
        DimensionError: If the support is not part of the geometry
    """
    op.check(geometry)
    return embed_matrix(op.matrix, op.support, geometry.local_dims, sparse=sparse)


def conditional_expectation(
    matrix: np.ndarray, dims: Sequence[int], keep: Iterable[int]
) -> np.ndarray:
    """
    Normalized partial trace onto ``keep``, re-embedded with identities.

    E(A) = Tr_rest(A) / d_rest (x) I_rest; E is idempotent and E(A) is
    supported on ``keep``.
    """
    keep = sorted(set(keep))
    reduced = partial_trace_array(matrix, dims, keep)
    d_rest = dims_product(dims) // reduced.shape[0]
    return embed_matrix(reduced / d_rest, keep, dims)


def local_part(matrix: np.ndarray, dims: Sequence[int], support: Iterable[int]) -> np.ndarray:
    """Local matrix u with ``matrix`` = u (x) I, read off by a normalized partial trace."""
    support = sorted(set(support))
    reduced = partial_trace_array(matrix, dims, support)
    return reduced / (dims_product(dims) // reduced.shape[0])


def apply_local(
    ket: np.ndarray, matrix: np.ndarray, support: Sequence[int], dims: Sequence[int]
) -> np.ndarray:
    """
    Apply a local matrix to a ket by tensor contraction.

    Works in any dimension without forming the full-space operator.
    """
    support = [int(s) for s in support]
    dims = [int(d) for d in dims]
    k = len(support)
    tensor = np.asarray(ket).reshape(dims)
    local = np.asarray(matrix).reshape([dims[s] for s in support] * 2)
    out = np.tensordot(local, tensor, axes=(list(range(k, 2 * k)), support))
    # tensordot puts the contracted-in axes first; move them back into place
    rest = [s for s in range(len(dims)) if s not in support]
    current = support + rest
    out = np.moveaxis(out, list(range(len(dims))), current)
    return out.reshape(-1)


@dataclass(frozen=True, eq=False)
class ProductOperator:
    """
    Tensor product of single-site matrices (identity elsewhere).

    Used for long logical strings where a dense full-space matrix is
    unaffordable.
    """

    factors: Dict[int, np.ndarray]

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.factors))

    def apply(self, ket: np.ndarray, dims: Sequence[int]) -> np.ndarray:
        out = ket
        for site, m in self.factors.items():
            out = apply_local(out, m, [site], dims)
        return out

    def power(self, k: int) -> "ProductOperator":
        return ProductOperator({s: np.linalg.matrix_power(m, k) for s, m in self.factors.items()})

    def dagger(self) -> "ProductOperator":
        return ProductOperator({s: m.conj().T for s, m in self.factors.items()})

    def to_local(self) -> LocalOperator:
        mat = np.ones((1, 1), dtype=complex)
        for s in self.support:
            mat = np.kron(mat, self.factors[s])
        return LocalOperator(self.support, mat)

    def dense(
        self, dims: Sequence[int], policy: NumericPolicy = DEFAULT_POLICY, sparse: bool = False
    ):
        total = dims_product(dims)
        if not sparse:
            policy.check_dense(total)
        local = self.to_local()
        return embed_matrix(local.matrix, local.support, dims, sparse=sparse)

    def __matmul__(self, other: "ProductOperator") -> "ProductOperator":
        merged: Dict[int, np.ndarray] = dict(self.factors)
        for s, m in other.factors.items():
            merged[s] = merged[s] @ m if s in merged else m
        return ProductOperator(merged)


def identity_operator(geometry: LatticeGeometry, sparse: bool = False):
    if sparse:
        return sp.identity(geometry.dim, dtype=complex, format="csr")
    return np.eye(geometry.dim, dtype=complex)


def embed_many(
    ops: Iterable[LocalOperator], geometry: LatticeGeometry, sparse: bool = False
) -> Optional[Union[np.ndarray, sp.csr_matrix]]:
    """Sum of embedded operators, or None for an empty iterable."""
    total = None
    for op in ops:
        term = embed(op, geometry, sparse=sparse)
        total = term if total is None else total + term
    return total
