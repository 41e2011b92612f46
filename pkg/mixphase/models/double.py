"""
Z_n quantum double on the edges of an Lx x Ly torus.

Orientation: horizontal edges point in +x, vertical edges in +y. The star
at a vertex applies X on outgoing and X^dag on incoming edges; the
plaquette applies Z on its bottom and right edges and Z^dag on its top and
left edges. The logical strings are

    Z_x = prod_x Z on h(x, y0)        X_x = prod_x X^dag on v(x, y0)
    Z_y = prod_y Z on v(x0, y)        X_y = prod_y X^dag on h(x0, y)

so that X_x Z_y = omega Z_y X_x and X_y Z_x = omega Z_x X_y.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from mixphase.models.paulis import clock, shift
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.operators import LocalOperator, ProductOperator, embed_many
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-8


@dataclass
class QuantumDouble:
    """
    Stabilizers, logical strings and a ground-space basis of D(Z_n).

    Attributes:
        n: Group order
        lx: Torus width
        ly: Torus height
        basis: Columns |alpha + n beta>, filled by ``build_quantum_double``
    """

    n: int
    lx: int
    ly: int
    basis: Optional[np.ndarray] = field(default=None, repr=False)
    geometry: LatticeGeometry = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"Group order must be at least 2, got {self.n}")
        self.geometry = LatticeGeometry.torus_edges(self.lx, self.ly, self.n)

    def h(self, x: int, y: int) -> int:
        return (y % self.ly) * self.lx + (x % self.lx)

    def v(self, x: int, y: int) -> int:
        return self.lx * self.ly + (y % self.ly) * self.lx + (x % self.lx)

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.n))

    @property
    def dims(self):
        return self.geometry.local_dims

    def _merge(self, parts) -> ProductOperator:
        factors: Dict[int, np.ndarray] = {}
        for site, m in parts:
            factors[site] = factors[site] @ m if site in factors else m
        return ProductOperator(factors)

    def star(self, x: int, y: int) -> ProductOperator:
        n = self.n
        return self._merge(
            [
                (self.h(x, y), shift(n)),
                (self.v(x, y), shift(n)),
                (self.h(x - 1, y), shift(n, -1)),
                (self.v(x, y - 1), shift(n, -1)),
            ]
        )

    def plaquette(self, x: int, y: int) -> ProductOperator:
        n = self.n
        return self._merge(
            [
                (self.h(x, y), clock(n)),
                (self.v(x + 1, y), clock(n)),
                (self.h(x, y + 1), clock(n, -1)),
                (self.v(x, y), clock(n, -1)),
            ]
        )

    def stars(self) -> List[ProductOperator]:
        return [self.star(x, y) for y in range(self.ly) for x in range(self.lx)]

    def plaquettes(self) -> List[ProductOperator]:
        return [self.plaquette(x, y) for y in range(self.ly) for x in range(self.lx)]

    def z_x(self, y0: int = 0) -> ProductOperator:
        return ProductOperator({self.h(x, y0): clock(self.n) for x in range(self.lx)})

    def z_y(self, x0: int = 0) -> ProductOperator:
        return ProductOperator({self.v(x0, y): clock(self.n) for y in range(self.ly)})

    def x_x(self, y0: int = 0) -> ProductOperator:
        return ProductOperator({self.v(x, y0): shift(self.n, -1) for x in range(self.lx)})

    def x_y(self, x0: int = 0) -> ProductOperator:
        return ProductOperator({self.h(x0, y): shift(self.n, -1) for y in range(self.ly)})

    @staticmethod
    def _projector(op: ProductOperator, n: int) -> LocalOperator:
        """(1/n) sum_k A^k restricted to the support of A."""
        local = op.to_local()
        acc = np.zeros_like(local.matrix)
        power = np.eye(local.matrix.shape[0], dtype=complex)
        for _ in range(n):
            acc += power
            power = power @ local.matrix
        return LocalOperator(local.support, acc / n)

    def parent_terms(self) -> List[LocalOperator]:
        """1 - P_v for every star and 1 - P_p for every plaquette."""
        terms = []
        for op in self.stars() + self.plaquettes():
            proj = self._projector(op, self.n)
            terms.append(LocalOperator(proj.support, np.eye(proj.matrix.shape[0]) - proj.matrix))
        return terms

    def parent_hamiltonian(self, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
        policy.check_dense(self.geometry.dim, "quantum double Hamiltonian")
        return embed_many(self.parent_terms(), self.geometry)

    def ground_space_dimension(self, policy: NumericPolicy = DEFAULT_POLICY) -> int:
        """Null-space dimension of the parent Hamiltonian."""
        energies = np.linalg.eigvalsh(self.parent_hamiltonian(policy))
        return int(np.sum(np.abs(energies) < 1e-8))

    def stabilizer_count(self) -> int:
        return 2 * self.lx * self.ly

    def redundancies(self) -> int:
        """Number of the relations prod_v A_v = 1 and prod_p B_p = 1 that hold exactly."""
        count = 0
        for family in (self.stars(), self.plaquettes()):
            total = family[0]
            for op in family[1:]:
                total = total @ op
            identity = all(
                np.abs(m - np.eye(self.n)).max() < 1e-12 for m in total.factors.values()
            )
            count += int(identity)
        return count

    def commutation_residual(self) -> float:
        """
        max over stabilizer pairs of ||A B - B A|| evaluated on a random ket.
        """
        rng = np.random.default_rng(7)
        ket = rng.normal(size=self.geometry.dim) + 1j * rng.normal(size=self.geometry.dim)
        ket /= np.linalg.norm(ket)
        ops = self.stars() + self.plaquettes()
        worst = 0.0
        for i, a in enumerate(ops):
            for b in ops[i + 1 :]:
                if not set(a.support) & set(b.support):
                    continue
                ab = a.apply(b.apply(ket, self.dims), self.dims)
                ba = b.apply(a.apply(ket, self.dims), self.dims)
                worst = max(worst, float(np.linalg.norm(ab - ba)))
        return worst

    def vacuum(self) -> np.ndarray:
        """prod_v P_v |0...0>, normalized; it is fixed by every Z string."""
        ket = np.zeros(self.geometry.dim, dtype=complex)
        ket[0] = 1.0
        for star in self.stars():
            acc = np.zeros_like(ket)
            current = ket
            for _ in range(self.n):
                acc += current
                current = star.apply(current, self.dims)
            ket = acc / self.n
        return ket / np.linalg.norm(ket)

    def index(self, alpha: int, beta: int) -> int:
        return (alpha % self.n) + self.n * (beta % self.n)

    def build_basis(self) -> np.ndarray:
        """|alpha + n beta> = X_y^alpha X_x^beta |vacuum>."""
        vacuum = self.vacuum()
        columns = [None] * (self.n**2)
        for beta in range(self.n):
            xb = self.x_x().power(beta).apply(vacuum, self.dims)
            for alpha in range(self.n):
                columns[self.index(alpha, beta)] = self.x_y().power(alpha).apply(xb, self.dims)
        self.basis = np.column_stack(columns)
        return self.basis

    def _require_basis(self) -> np.ndarray:
        if self.basis is None:
            self.build_basis()
        return self.basis

    def logical(self, op: ProductOperator) -> np.ndarray:
        """n^2 x n^2 matrix of ``op`` in the ground-space basis."""
        basis = self._require_basis()
        images = np.column_stack([op.apply(basis[:, k], self.dims) for k in range(basis.shape[1])])
        return basis.conj().T @ images

    def _split(self, power: int) -> Tuple[int, int]:
        return power % self.n, (power // self.n) % self.n

    def ladder(self, power: int = 1) -> np.ndarray:
        """
        X~^i = X_y^gamma X_x^delta on the logical basis, with i = gamma + n delta.

        It sends |alpha, beta> to |alpha + gamma, beta + delta>, labels mod n.
        """
        gamma, delta = self._split(power)
        return self.logical(self.x_y().power(gamma)) @ self.logical(self.x_x().power(delta))

    def diagonal(self, power: int = 1) -> np.ndarray:
        """
        Z~^i = Z_x^gamma Z_y^delta on the logical basis, with i = gamma + n delta.

        Both strings fix the vacuum and pick up a phase past X_y and X_x
        respectively, so Z~^i is diagonal and the n^2 of them are the distinct
        characters of the ladder group.
        """
        gamma, delta = self._split(power)
        return self.logical(self.z_x().power(gamma)) @ self.logical(self.z_y().power(delta))

    def basis_orthonormality_residual(self) -> float:
        basis = self._require_basis()
        return float(np.abs(basis.conj().T @ basis - np.eye(self.n**2)).max())

    def ground_space_residual(self) -> float:
        """max over basis kets and stabilizers of ||S psi - psi||."""
        basis = self._require_basis()
        worst = 0.0
        for op in self.stars() + self.plaquettes():
            for k in range(basis.shape[1]):
                psi = basis[:, k]
                worst = max(worst, float(np.linalg.norm(op.apply(psi, self.dims) - psi)))
        return worst

    def logical_algebra_residual(self) -> float:
        """
        Ket-level check of X_x Z_y = omega Z_y X_x and X_y Z_x = omega Z_x X_y
        on random kets, plus commutation of the other logical pairs.
        """
        rng = np.random.default_rng(11)
        ket = rng.normal(size=self.geometry.dim) + 1j * rng.normal(size=self.geometry.dim)
        ket /= np.linalg.norm(ket)
        d = self.dims
        w = self.omega
        pairs = [
            (self.x_x(), self.z_y(), w),
            (self.x_y(), self.z_x(), w),
            (self.x_x(), self.z_x(), 1.0),
            (self.x_y(), self.z_y(), 1.0),
            (self.x_x(), self.x_y(), 1.0),
        ]
        worst = 0.0
        for a, b, phase in pairs:
            ab = a.apply(b.apply(ket, d), d)
            ba = b.apply(a.apply(ket, d), d)
            worst = max(worst, float(np.linalg.norm(ab - phase * ba)))
        return worst

    def homotopy_residual(self) -> float:
        """Largest difference between logical strings on parallel lines, on the ground space."""
        worst = 0.0
        families = [
            [self.x_x(y) for y in range(self.ly)],
            [self.z_x(y) for y in range(self.ly)],
            [self.x_y(x) for x in range(self.lx)],
            [self.z_y(x) for x in range(self.lx)],
        ]
        for family in families:
            reference = self.logical(family[0])
            for op in family[1:]:
                worst = max(worst, float(np.abs(self.logical(op) - reference).max()))
        return worst


def build_quantum_double(
    n: int, lx: int, ly: int, policy: NumericPolicy = DEFAULT_POLICY
) -> QuantumDouble:
    """
    Build D(Z_n) on an lx x ly torus with its ground-space basis.

    Raises:
        NumericGuardError: If n^(2 lx ly) exceeds the ket guard
        ValidationError: If a construction invariant fails
    """
    qd = QuantumDouble(n, lx, ly)
    policy.check_ket(qd.geometry.dim, "quantum double ket")
    qd.build_basis()
    orthonormality = qd.basis_orthonormality_residual()
    stabilized = qd.ground_space_residual()
    if orthonormality > 1e-10 or stabilized > 1e-10:
        raise ValidationError(
            f"Ground-space basis check failed: orthonormality {orthonormality:.2e}, "
            f"stabilizer residual {stabilized:.2e}"
        )
    logger.info(f"Built D(Z_{n}) on {lx}x{ly} torus with {n**2} ground states")
    return qd


@dataclass(frozen=True)
class GenerationReport:
    """Ranks of the Gram matrices of {X~^i psi} and {Z~^i psi}."""

    rank_x: int
    rank_z: int
    full: int

    @property
    def generates(self) -> bool:
        return max(self.rank_x, self.rank_z) == self.full


def _gram_rank(vectors: np.ndarray) -> int:
    gram = vectors.conj().T @ vectors
    return int(np.linalg.matrix_rank(gram, tol=RANK_TOLERANCE))


def basis_generation_check(qd: QuantumDouble, psi: np.ndarray) -> GenerationReport:
    """
    Whether the ladder orbit or the diagonal orbit of ``psi`` spans the ground space.

    Args:
        qd: Quantum double with its basis
        psi: Ground-space vector, as n^2 logical coordinates or as a full ket

    Raises:
        ValidationError: If psi is not normalized
    """
    size = qd.n**2
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != size:
        psi = qd._require_basis().conj().T @ psi
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValidationError("Ground-space vector must be normalized")
    ladder = np.column_stack([qd.ladder(i) @ psi for i in range(size)])
    diagonal = np.column_stack([qd.diagonal(i) @ psi for i in range(size)])
    return GenerationReport(_gram_rank(ladder), _gram_rank(diagonal), size)
