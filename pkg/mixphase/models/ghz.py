"""GHZ families |psi_beta> on level sublattices and their projector parent Hamiltonians."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from mixphase.models.paulis import clock
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.operators import LocalOperator, embed_many, embed_matrix
from mixphase.utils.errors import ValidationError


@dataclass(frozen=True, eq=False)
class GHZFamily:
    """
    |psi_beta> = m^-1/2 sum_alpha omega_m^{alpha beta} |l_alpha ... l_alpha>.

    The m levels l_alpha = alpha * n/m form a sublattice of the local
    dimension n; m = n gives the usual GHZ_n family.

    Attributes:
        geometry: Sites, all of dimension n
        m: Number of levels in the superposition
    """

    geometry: LatticeGeometry
    m: Optional[int] = None

    def __post_init__(self):
        n = self.geometry.local_dims[0]
        if any(d != n for d in self.geometry.local_dims):
            raise ValidationError("GHZ families need a uniform local dimension")
        m = n if self.m is None else int(self.m)
        if m < 1 or n % m:
            raise ValidationError(f"GHZ size {m} must divide the local dimension {n}")
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.geometry.local_dims[0]

    @property
    def levels(self) -> List[int]:
        step = self.n // self.m
        return [alpha * step for alpha in range(self.m)]

    def uniform(self, alpha: int) -> np.ndarray:
        """|l_alpha ... l_alpha>."""
        level = self.levels[alpha % self.m]
        index = sum(level * self.n**k for k in range(self.geometry.n_sites))
        ket = np.zeros(self.geometry.dim, dtype=complex)
        ket[index] = 1.0
        return ket

    def ket(self, beta: int = 0) -> np.ndarray:
        w = np.exp(2j * np.pi / self.m)
        return sum(w ** (alpha * beta) * self.uniform(alpha) for alpha in range(self.m)) / np.sqrt(
            self.m
        )

    def density(self, beta: int = 0) -> np.ndarray:
        psi = self.ket(beta)
        return np.outer(psi, psi.conj())

    def basis(self) -> np.ndarray:
        """Columns |psi_0>, ..., |psi_{m-1}>."""
        return np.column_stack([self.ket(beta) for beta in range(self.m)])

    def orthonormality_residual(self) -> float:
        b = self.basis()
        return float(np.abs(b.conj().T @ b - np.eye(self.m)).max())

    def change_of_basis_residual(self) -> float:
        """max_alpha || |l_alpha...> - m^-1/2 sum_beta omega^{-alpha beta} |psi_beta> ||."""
        w = np.exp(2j * np.pi / self.m)
        worst = 0.0
        for alpha in range(self.m):
            rebuilt = sum(w ** (-alpha * beta) * self.ket(beta) for beta in range(self.m))
            rebuilt = rebuilt / np.sqrt(self.m)
            worst = max(worst, float(np.abs(rebuilt - self.uniform(alpha)).max()))
        return worst

    def clock_action_residual(self, site: int) -> float:
        """max_beta ||Z_site^beta |psi_0> - |psi_beta>||."""
        worst = 0.0
        psi0 = self.ket(0)
        for beta in range(self.m):
            z = embed_matrix(clock(self.n, beta), [site], self.geometry.local_dims)
            worst = max(worst, float(np.abs(z @ psi0 - self.ket(beta)).max()))
        return worst

    def parent_terms(self) -> List[LocalOperator]:
        """
        Commuting projectors whose common kernel is span{|l_alpha ... l_alpha>}:
        1 - P_sub on every site and 1 - sum_alpha |l_alpha l_alpha><l_alpha l_alpha|
        on every edge.
        """
        n = self.n
        sub = np.zeros((n, n), dtype=complex)
        for level in self.levels:
            sub[level, level] = 1.0
        equal = np.zeros((n * n, n * n), dtype=complex)
        for level in self.levels:
            equal[level * n + level, level * n + level] = 1.0
        terms = [LocalOperator((s,), np.eye(n) - sub) for s in range(self.geometry.n_sites)]
        pairs = {tuple(sorted(e)) for e in self.geometry.edges}
        terms += [LocalOperator(pair, np.eye(n * n) - equal) for pair in sorted(pairs)]
        return terms

    def parent_hamiltonian(self, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
        policy.check_dense(self.geometry.dim, "GHZ parent Hamiltonian")
        return embed_many(self.parent_terms(), self.geometry)

    def ground_energy(self, rho: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> float:
        """Tr[H rho] for the parent Hamiltonian; zero exactly on the GHZ span."""
        return float(np.real(np.trace(self.parent_hamiltonian(policy) @ rho)))
