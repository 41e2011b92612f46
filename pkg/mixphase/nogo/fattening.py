"""
Fattened operators: Heisenberg evolution under the terms of a Lindbladian that
fit inside the ell-neighborhood of the operator's support.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from mixphase.lindblad import Lindbladian, evolve, heisenberg_evolve
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import (
    DEFAULT_POLICY,
    NumericPolicy,
    dims_product,
    operator_norm,
    random_density,
)
from mixphase.qstate.operators import LocalOperator, ProductOperator, apply_local, embed_matrix
from mixphase.quasiadiabatic.locality import LightConeFit, fit_light_cone
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

OperatorLike = Union[LocalOperator, ProductOperator]


@dataclass
class FattenedOperator:
    """
    fat_ell(A) = e^{t L*_{S_ell}}(A) on the region S_ell(supp A).

    Attributes:
        base: The operator A
        ell: Fattening radius
        t: Evolution time
        region: Sorted sites of S_ell(supp A)
        matrix: The evolved operator on ``region``
    """

    base: LocalOperator
    ell: float
    t: float
    region: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def norm(self) -> float:
        return operator_norm(self.matrix)

    def full(self, geometry: LatticeGeometry, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
        policy.check_dense(geometry.dim, "fattened operator")
        return embed_matrix(self.matrix, self.region, geometry.local_dims)

    def apply(self, ket: np.ndarray, geometry: LatticeGeometry) -> np.ndarray:
        """fat_ell(A)|ket> without forming the full-space matrix."""
        return apply_local(ket, self.matrix, self.region, geometry.local_dims)

    def dagger(self) -> "FattenedOperator":
        return FattenedOperator(
            self.base.dagger(), self.ell, self.t, self.region, self.matrix.conj().T
        )


def _as_local(op: OperatorLike) -> LocalOperator:
    return op.to_local() if isinstance(op, ProductOperator) else op


def fattening_region(
    geometry: LatticeGeometry, support: Sequence[int], ell: float
) -> Tuple[int, ...]:
    """S_ell(support) = {x : d(x, support) <= ell}, sorted."""
    return tuple(sorted(geometry.neighborhood(support, ell)))


def fatten(
    lind: Lindbladian,
    op: OperatorLike,
    t: float,
    ell: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> FattenedOperator:
    """
    Evolve ``op`` in the Heisenberg picture under the terms inside S_ell(supp op).

    Raises:
        NumericGuardError: If the region exceeds the dense guard
        ValidationError: For t < 0 or ell < 0
    """
    if ell < 0:
        raise ValidationError(f"Fattening radius must be non-negative, got {ell}")
    base = _as_local(op)
    geometry = lind.geometry
    base.check(geometry)
    region = fattening_region(geometry, base.support, ell)
    dims = geometry.dims_of(region)
    policy.check_dense(dims_product(dims), "fattening region")
    sub = lind.restricted(region)
    position = {x: k for k, x in enumerate(region)}
    local = embed_matrix(base.matrix, [position[x] for x in base.support], dims)
    logger.debug(
        f"Fattening on {len(region)} sites with {len(sub.terms)} of {len(lind.terms)} terms"
    )
    matrix = heisenberg_evolve(sub, local, t, policy)
    return FattenedOperator(base, float(ell), float(t), region, matrix)


def fattening_errors(
    lind: Lindbladian,
    op: OperatorLike,
    t: float,
    ells: Sequence[float],
    policy: NumericPolicy = DEFAULT_POLICY,
) -> List[float]:
    """||fat_ell(A) - e^{tL*}(A)|| along ``ells``."""
    base = _as_local(op)
    geometry = lind.geometry
    policy.check_dense(geometry.dim, "full Heisenberg evolution")
    full = embed_matrix(base.matrix, base.support, geometry.local_dims)
    exact = heisenberg_evolve(lind, full, t, policy)
    return [
        operator_norm(fatten(lind, base, t, ell, policy).full(geometry, policy) - exact)
        for ell in ells
    ]


def restriction_duality_residual(
    lind: Lindbladian,
    op: OperatorLike,
    rho: np.ndarray,
    t: float,
    ell: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """
    |Tr[fat_ell(A) rho] - Tr[A e^{t L_S}(rho)]| with L_S the terms inside
    S_ell(supp A) acting on the whole system.
    """
    base = _as_local(op)
    geometry = lind.geometry
    fat = fatten(lind, base, t, ell, policy)
    inside = set(fat.region)
    local_terms = [term for term in lind.terms if set(term.support) <= inside]
    evolved = evolve(Lindbladian(geometry, tuple(local_terms)), rho, t, policy).matrix
    full = embed_matrix(base.matrix, base.support, geometry.local_dims)
    lhs = np.trace(fat.full(geometry, policy) @ rho)
    rhs = np.trace(full @ evolved)
    return float(abs(lhs - rhs))


def schwarz_gap(
    lind: Lindbladian,
    op: np.ndarray,
    t: float,
    rng: Optional[np.random.Generator] = None,
    samples: int = 5,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """
    max over random states of Tr[rho T*(A)^dag T*(A)] - Tr[rho T*(A^dag A)],
    T = e^{tL}. A non-positive value is the operator Schwarz inequality.
    """
    rng = rng or np.random.default_rng(0)
    dim = lind.dim
    policy.check_dense(dim, "Schwarz check")
    image = heisenberg_evolve(lind, op, t, policy)
    square = heisenberg_evolve(lind, op.conj().T @ op, t, policy)
    gap = square - image.conj().T @ image
    worst = -np.inf
    for _ in range(samples):
        rho = random_density(dim, rng)
        worst = max(worst, float(-np.real(np.trace(rho @ gap))))
    return worst


@dataclass
class LightConeProbe:
    """||[e^{tL*}(A_x), B_y]|| against d(x, y) and t, with its fit."""

    distances: np.ndarray
    times: np.ndarray
    table: np.ndarray
    fit: Optional[LightConeFit]

    def rows(self) -> List[Tuple[float, float, float]]:
        return [
            (float(d), float(t), float(self.table[i, k]))
            for i, d in enumerate(self.distances)
            for k, t in enumerate(self.times)
        ]


def lr_probe(
    lind: Lindbladian,
    a: np.ndarray,
    site: int,
    b: np.ndarray,
    times: Sequence[float],
    targets: Optional[Sequence[int]] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
    fit: bool = True,
) -> LightConeProbe:
    """
    Tabulate commutators of the evolved A at ``site`` with B at each target site.

    One target per distance is used; by default the first site found at each
    distance from ``site``.

    Raises:
        ValidationError: When fitting and no commutator is below the cone threshold
    """
    geometry = lind.geometry
    policy.check_dense(geometry.dim, "light-cone probe")
    dims = geometry.local_dims
    if targets is None:
        by_distance = {}
        for x in range(geometry.n_sites):
            d = geometry.distance(site, x)
            if x != site and np.isfinite(d) and d not in by_distance:
                by_distance[d] = x
        targets = [by_distance[d] for d in sorted(by_distance)]
    targets = list(targets)
    distances = np.array([geometry.distance(site, x) for x in targets])
    a_full = embed_matrix(a, [site], dims)
    probes = [embed_matrix(b, [x], dims) for x in targets]
    times = np.asarray(times, dtype=float)
    table = np.zeros((len(targets), len(times)))
    for k, t in enumerate(times):
        evolved = heisenberg_evolve(lind, a_full, float(t), policy)
        for i, probe in enumerate(probes):
            table[i, k] = operator_norm(evolved @ probe - probe @ evolved)
    result = fit_light_cone(times, distances, table) if fit else None
    if result is not None:
        logger.info(f"Light cone: v={result.velocity:.3f}, a={result.decay:.3f}")
    return LightConeProbe(distances, times, table, result)
