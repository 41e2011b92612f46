"""Local Lindblad terms: a Hamiltonian part plus jump operators on one support."""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import dims_product, operator_norm
from mixphase.qstate.operators import LocalOperator
from mixphase.utils.errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class LindbladTerm:
    """
    One local term L_X(rho) = -i[H_X, rho] + sum_j D[L_Xj](rho).

    Attributes:
        support: Sites the term acts on; matrix factors follow this order
        hamiltonian: Hermitian local matrix, or None for a purely dissipative term
        jumps: Jump operators on the same support
    """

    support: Tuple[int, ...]
    hamiltonian: Optional[np.ndarray] = None
    jumps: Tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        jumps = tuple(np.asarray(j, dtype=complex) for j in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=complex)
            object.__setattr__(self, "hamiltonian", h)
            scale = max(1.0, float(np.abs(h).max()) if h.size else 0.0)
            if np.abs(h - h.conj().T).max() > 1e-12 * scale:
                raise ValidationError(f"Hamiltonian on {self.support} is not Hermitian")
        sizes = {m.shape for m in self.matrices}
        if len(sizes) > 1:
            raise DimensionError(f"Term on {self.support} mixes matrix shapes {sizes}")

    @classmethod
    def dissipator(cls, support: Sequence[int], jumps: Iterable[np.ndarray]) -> "LindbladTerm":
        return cls(tuple(support), None, tuple(jumps))

    @classmethod
    def coherent(cls, support: Sequence[int], hamiltonian: np.ndarray) -> "LindbladTerm":
        return cls(tuple(support), hamiltonian, ())

    @classmethod
    def from_kraus(cls, support: Sequence[int], kraus: Iterable[np.ndarray], rate: float = 1.0):
        """
        Term ``rate * (T - id)`` for a CPTP map T with Kraus operators ``kraus``.

        Since sum K^dag K = I this is exactly the dissipator with jumps sqrt(rate) K.
        """
        return cls(tuple(support), None, tuple(np.sqrt(rate) * np.asarray(k) for k in kraus))

    @property
    def matrices(self) -> Tuple[np.ndarray, ...]:
        mats = self.jumps
        if self.hamiltonian is not None:
            mats = (self.hamiltonian,) + mats
        return mats

    @property
    def local_dim(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0

    @property
    def local_hamiltonian(self) -> Optional[LocalOperator]:
        if self.hamiltonian is None:
            return None
        return LocalOperator(self.support, self.hamiltonian)

    def check(self, geometry: LatticeGeometry) -> None:
        dims = geometry.dims_of(self.support)
        if self.matrices and dims_product(dims) != self.local_dim:
            raise DimensionError(
                f"Term matrices of size {self.local_dim} do not match support {self.support}"
            )

    def norm_estimate(self) -> float:
        """2 (||H|| + sum_j ||L_j||^2), an upper bound on the 1->1 norm of the term."""
        h = operator_norm(self.hamiltonian) if self.hamiltonian is not None else 0.0
        return 2.0 * (h + sum(operator_norm(j) ** 2 for j in self.jumps))

    def apply_local(self, rho: np.ndarray) -> np.ndarray:
        """Action on a matrix living on the term's own support."""
        out = np.zeros_like(rho, dtype=complex)
        if self.hamiltonian is not None:
            out += -1j * (self.hamiltonian @ rho - rho @ self.hamiltonian)
        for jump in self.jumps:
            jd = jump.conj().T
            out += jump @ rho @ jd - 0.5 * (jd @ jump @ rho + rho @ jd @ jump)
        return out

    def reindexed(self, mapping: dict) -> "LindbladTerm":
        """Copy with every site ``s`` replaced by ``mapping[s]``."""
        return LindbladTerm(tuple(mapping[s] for s in self.support), self.hamiltonian, self.jumps)

    def scaled(self, rate: float) -> "LindbladTerm":
        """Copy generating ``rate`` times the original map."""
        h = None if self.hamiltonian is None else rate * self.hamiltonian
        return LindbladTerm(self.support, h, tuple(np.sqrt(rate) * j for j in self.jumps))
