"""
Overlap witnesses built from fattened logical operators.

For the quantum double the probes are fat(X_x^alpha) fat(X_y^beta)|phi>; for
GHZ chains they are fat(Z_x^beta)|GHZ_m>. Their Gram matrix T is compared
with the Gram matrix S of the exact logical images, and the probes are
scored by ground-space residuals and the multiplicative (Schwarz) defect.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mixphase.lindblad import LindbladTerm, Lindbladian
from mixphase.models.double import QuantumDouble
from mixphase.models.ghz import GHZFamily
from mixphase.models.paulis import clock
from mixphase.nogo.fattening import FattenedOperator, fatten
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy
from mixphase.qstate.operators import LocalOperator, ProductOperator, apply_local
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

NOGO_HEADER = ("r", "t", "ell", "det_T", "det_S", "max_residual", "schwarz_defect")

RANK_TOLERANCE = 1e-8


def depolarizing_lindbladian(
    geometry: LatticeGeometry, rate: float, sites: Optional[Sequence[int]] = None
) -> Lindbladian:
    """rate * sum_i (Tr_i[.] (x) I/d - id) on every site (or ``sites``)."""
    if rate < 0:
        raise ValidationError(f"Depolarizing rate must be non-negative, got {rate}")
    if rate == 0:
        return Lindbladian.zero(geometry)
    sites = range(geometry.n_sites) if sites is None else sites
    terms = []
    for s in sites:
        d = geometry.local_dims[s]
        units = np.eye(d, dtype=complex)
        kraus = [np.outer(units[j], units[k]) / np.sqrt(d) for j in range(d) for k in range(d)]
        terms.append(LindbladTerm.from_kraus((s,), kraus, rate))
    return Lindbladian(geometry, tuple(terms))


@dataclass
class OverlapReport:
    """
    Gram matrices of fattened and exact probes with their error ledger.

    Attributes:
        gram: T, overlaps of the fattened probes
        reference: S, overlaps of the exact logical images
        residuals: Ground-space residual per probe
        schwarz_defect: Largest multiplicative defect over probe pairs
        position_defect: Largest defect between logical strings on parallel lines
        labels: Probe labels in Gram order
    """

    gram: np.ndarray
    reference: np.ndarray
    residuals: np.ndarray
    schwarz_defect: float = 0.0
    position_defect: float = 0.0
    labels: List[Tuple[int, ...]] = field(default_factory=list)
    rate: float = 0.0
    t: float = 0.0
    ell: float = 0.0

    @property
    def det_gram(self) -> float:
        return float(abs(np.linalg.det(self.gram)))

    @property
    def det_reference(self) -> float:
        return float(abs(np.linalg.det(self.reference)))

    @property
    def det_gap(self) -> float:
        return abs(self.det_gram - self.det_reference)

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.gram, tol=RANK_TOLERANCE, hermitian=True))

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    @property
    def gram_residual(self) -> float:
        return float(np.abs(self.gram - self.reference).max())

    def row(self) -> Tuple[float, ...]:
        return (
            self.rate,
            self.t,
            self.ell,
            self.det_gram,
            self.det_reference,
            self.max_residual,
            self.schwarz_defect,
        )


def write_overlap_csv(path: Path, reports: Sequence[OverlapReport]) -> None:
    """Write ``r,t,ell,det_T,det_S,max_residual,schwarz_defect`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(NOGO_HEADER)
        for report in reports:
            writer.writerow([f"{float(x):.12e}" for x in report.row()])


class FatteningCache:
    """Caches fattened operators keyed by label."""

    def __init__(self, lind: Lindbladian, t: float, ell: float, policy: NumericPolicy):
        self.lind = lind
        self.t = t
        self.ell = ell
        self.policy = policy
        self._cache: Dict[object, FattenedOperator] = {}

    def __call__(self, key, op) -> FattenedOperator:
        if key not in self._cache:
            self._cache[key] = fatten(self.lind, op, self.t, self.ell, self.policy)
        return self._cache[key]


def _gram(vectors: Sequence[np.ndarray]) -> np.ndarray:
    stacked = np.column_stack(vectors)
    return stacked.conj().T @ stacked


def dual_residual(
    fattener: FatteningCache, terms: Sequence[LocalOperator], ket: np.ndarray, dims: Sequence[int]
) -> float:
    """Tr[H e^{tL}(|ket><ket|)] = sum_h <ket| fat(h) |ket>."""
    total = 0.0
    for k, term in enumerate(terms):
        fat = fattener(("parent", k), term)
        total += float(np.real(np.vdot(ket, apply_local(ket, fat.matrix, fat.region, dims))))
    return total


def overlap_probe(
    qd: QuantumDouble,
    phi: Optional[np.ndarray],
    lind: Lindbladian,
    t: float,
    ell: float,
    y0: int = 0,
    x0: int = 0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> OverlapReport:
    """
    Gram matrix of fat(X_x^alpha) fat(X_y^beta)|phi> against the exact logical images.

    Args:
        qd: Quantum double (its geometry must match ``lind``)
        phi: Ground-space ket; the vacuum when None
        lind: Noise or driving Lindbladian
        t: Evolution time
        ell: Fattening radius
        y0: Row of the horizontal X string
        x0: Column of the vertical X string
        policy: Size guards

    Raises:
        ValidationError: If the geometries differ or phi is not normalized
    """
    if lind.geometry.local_dims != qd.geometry.local_dims:
        raise ValidationError("Lindbladian and quantum double live on different lattices")
    dims = qd.dims
    phi = qd.vacuum() if phi is None else np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-8:
        raise ValidationError("Probe ket must be normalized")
    n = qd.n
    fattener = FatteningCache(lind, t, ell, policy)

    def string(kind: str, power: int, line: int) -> Tuple[object, ProductOperator]:
        base = qd.x_x(line) if kind == "x" else qd.x_y(line)
        return (kind, power % n, line), base.power(power % n)

    def fat_apply(kind: str, power: int, line: int, ket: np.ndarray) -> np.ndarray:
        if power % n == 0:
            return ket
        key, op = string(kind, power, line)
        fat = fattener(key, op)
        return apply_local(ket, fat.matrix, fat.region, dims)

    labels, probes, exact = [], [], []
    for alpha in range(n):
        for beta in range(n):
            labels.append((alpha, beta))
            probes.append(fat_apply("x", alpha, y0, fat_apply("y", beta, x0, phi)))
            image = qd.x_y(x0).power(beta).apply(phi, dims)
            exact.append(qd.x_x(y0).power(alpha).apply(image, dims))
    gram = _gram(probes)
    reference = _gram(exact)

    terms = qd.parent_terms()
    residuals = np.array([dual_residual(fattener, terms, ket, dims) for ket in exact])

    # <phi| fat(A^a) fat(A^b) |phi> against <phi| fat(A^{a+b}) |phi>
    schwarz = 0.0
    for kind, line in (("x", y0), ("y", x0)):
        for a in range(1, n):
            for b in range(1, n):
                lhs = np.vdot(phi, fat_apply(kind, a, line, fat_apply(kind, b, line, phi)))
                rhs = np.vdot(phi, fat_apply(kind, a + b, line, phi))
                schwarz = max(schwarz, float(abs(lhs - rhs)))

    # <phi| fat(A_line^-a) fat(A_line'^a) |phi> against 1
    position = 0.0
    for kind, line, other in (("x", y0, (y0 + 1) % qd.ly), ("y", x0, (x0 + 1) % qd.lx)):
        for a in range(1, n):
            moved = fat_apply(kind, a, other, phi)
            value = np.vdot(fat_apply(kind, a, line, phi), moved)
            position = max(position, float(abs(1.0 - value)))

    report = OverlapReport(
        gram, reference, residuals, schwarz, position, labels, t=float(t), ell=float(ell)
    )
    logger.info(
        f"Overlap probe t={t}, ell={ell}: |det T|={report.det_gram:.6f}, "
        f"|det S|={report.det_reference:.6f}, schwarz={schwarz:.3e}"
    )
    return report


def ghz_nogo_probe(
    m: int,
    n: int,
    lind: Optional[Lindbladian],
    t: float,
    ell: float,
    n_sites: int = 4,
    site: int = 0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> OverlapReport:
    """
    Gram matrix of fat(Z_site^beta)|GHZ_m>, beta < n, against delta_{alpha beta}.

    Residuals are taken against the projector parent Hamiltonian of GHZ_m
    on the exact images Z^beta|GHZ_m>.

    Raises:
        ValidationError: If m does not divide n
    """
    geometry = LatticeGeometry.chain(n_sites, n)
    family = GHZFamily(geometry, m)
    lind = Lindbladian.zero(geometry) if lind is None else lind
    if lind.geometry.local_dims != geometry.local_dims:
        raise ValidationError("Lindbladian does not match the GHZ chain")
    dims = geometry.local_dims
    psi = family.ket(0)
    fattener = FatteningCache(lind, t, ell, policy)
    probes, exact = [], []
    for beta in range(n):
        z = LocalOperator((site,), clock(n, beta))
        fat = fattener(("z", beta), z)
        probes.append(apply_local(psi, fat.matrix, fat.region, dims))
        exact.append(apply_local(psi, z.matrix, z.support, dims))
    gram = _gram(probes)
    terms = family.parent_terms()
    residuals = np.array([dual_residual(fattener, terms, ket, dims) for ket in exact])
    report = OverlapReport(
        gram,
        np.eye(n, dtype=complex),
        residuals,
        labels=[(beta,) for beta in range(n)],
        t=float(t),
        ell=float(ell),
    )
    logger.info(f"GHZ probe m={m}, n={n}: Gram rank {report.rank}")
    return report


def rate_ladder(
    qd: QuantumDouble,
    rates: Sequence[float],
    t: float,
    ell: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> List[OverlapReport]:
    """Overlap probes of the vacuum under single-site depolarizing noise of each rate."""
    reports = []
    for r in rates:
        noise = depolarizing_lindbladian(qd.geometry, r)
        report = overlap_probe(qd, None, noise, t, ell, policy=policy)
        report.rate = float(r)
        reports.append(report)
    return reports
