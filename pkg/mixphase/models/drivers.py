"""
Product drivers L = sum_i (T_i - id) built from one idempotent single-site channel.

Because the T_i act on different sites and T_i^2 = T_i, the evolution has the
closed form e^{tL} = prod_i [(1 - e^-t) T_i + e^-t id], which is applied here
site by site without forming any superoperator.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from mixphase.lindblad import LindbladTerm, Lindbladian
from mixphase.models.paulis import shift
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, kron_all, trace_norm
from mixphase.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SiteChannel:
    """
    CPTP map on one site given by Kraus operators.

    Attributes:
        kraus: Kraus operators K_k with sum K_k^dag K_k = I
        name: Label used in logs and reports
    """

    kraus: Tuple[np.ndarray, ...]
    name: str = "channel"

    def __post_init__(self):
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        object.__setattr__(self, "kraus", kraus)
        if not kraus:
            raise ValidationError("A channel needs at least one Kraus operator")
        d = kraus[0].shape[1]
        completeness = sum(k.conj().T @ k for k in kraus)
        if np.abs(completeness - np.eye(d)).max() > 1e-10:
            raise ValidationError(f"Kraus operators of '{self.name}' are not trace preserving")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[1]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def transfer(self) -> np.ndarray:
        """Column-stacking transfer matrix sum_k conj(K_k) (x) K_k."""
        return sum(np.kron(k.conj(), k) for k in self.kraus)

    def idempotence_residual(self) -> float:
        t = self.transfer()
        return float(np.abs(t @ t - t).max())


def replacement_channel(psi: np.ndarray) -> SiteChannel:
    """T(rho) = Tr[rho] |psi><psi|, with Kraus operators |psi><k|."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("Target state must be nonzero")
    psi = psi / norm
    d = psi.size
    kraus = tuple(np.outer(psi, np.eye(d)[k]) for k in range(d))
    return SiteChannel(kraus, "replacement")


def condensation_channel(n: int = 4, m: int = 2) -> SiteChannel:
    """
    Level-sublattice condensation on a qudit of dimension ``n``.

    T(rho) = P rho P + sum_r X^-r Q_r rho Q_r X^r, where P projects on the
    levels {0, k, 2k, ...} with k = n/m and Q_r on the levels congruent to r
    mod k. For n=4, m=2 this is P rho P + X^dag (1-P) rho (1-P) X.

    Raises:
        ValidationError: If m does not divide n
    """
    if m < 1 or n % m:
        raise ValidationError(f"Sublattice size {m} must divide the local dimension {n}")
    k = n // m
    projectors = []
    for r in range(k):
        q = np.zeros((n, n), dtype=complex)
        for level in range(r, n, k):
            q[level, level] = 1.0
        projectors.append(q)
    kraus = [projectors[0]] + [shift(n, -r) @ projectors[r] for r in range(1, k)]
    return SiteChannel(tuple(kraus), f"condense_{n}_to_{m}")


def apply_site_kraus(
    rho: np.ndarray, kraus: Sequence[np.ndarray], site: int, dims: Sequence[int]
) -> np.ndarray:
    """sum_k K_k rho K_k^dag with K_k acting on ``site`` only."""
    dims = [int(d) for d in dims]
    n = len(dims)
    tensor = np.asarray(rho, dtype=complex).reshape(dims + dims)
    out = np.zeros_like(tensor)
    for k in kraus:
        left = np.moveaxis(np.tensordot(k, tensor, axes=([1], [site])), 0, site)
        both = np.tensordot(left, k.conj(), axes=([n + site], [1]))
        out += np.moveaxis(both, -1, n + site)
    return out.reshape(rho.shape)


def distance_bound(t: float, n_sites: int) -> float:
    """1 - (1 - e^-t)^N, the trace-distance bound to the fixed point."""
    return float(1.0 - (1.0 - np.exp(-t)) ** n_sites)


@dataclass(frozen=True, eq=False)
class ProductDriver:
    """
    L = rate * sum_{i in sites} (T_i - id) for an idempotent site channel T.

    Attributes:
        geometry: Lattice; every driven site has the channel's dimension
        channel: Single-site idempotent channel
        sites: Driven sites; all sites by default
        rate: Overall rate
    """

    geometry: LatticeGeometry
    channel: SiteChannel
    sites: Optional[Tuple[int, ...]] = None
    rate: float = 1.0

    def __post_init__(self):
        sites = tuple(range(self.geometry.n_sites)) if self.sites is None else tuple(self.sites)
        object.__setattr__(self, "sites", sites)
        self.geometry.validate_sites(sites)
        for s in sites:
            if self.geometry.local_dims[s] != self.channel.dim:
                raise DimensionError(
                    f"Site {s} has dimension {self.geometry.local_dims[s]}, "
                    f"channel acts on {self.channel.dim}"
                )
        if self.channel.idempotence_residual() > 1e-10:
            raise ValidationError(f"Channel '{self.channel.name}' is not idempotent")

    def lindbladian(self) -> Lindbladian:
        terms = [LindbladTerm.from_kraus((s,), self.channel.kraus, self.rate) for s in self.sites]
        return Lindbladian(self.geometry, tuple(terms))

    def _apply_all(self, rho: np.ndarray, weight: float) -> np.ndarray:
        """prod_i [w T_i + (1 - w) id](rho)."""
        dims = self.geometry.local_dims
        out = np.asarray(rho, dtype=complex)
        for s in self.sites:
            if weight == 1.0:
                out = apply_site_kraus(out, self.channel.kraus, s, dims)
            elif weight > 0.0:
                mapped = apply_site_kraus(out, self.channel.kraus, s, dims)
                out = weight * mapped + (1.0 - weight) * out
        return out

    def closed_form_evolve(self, rho: np.ndarray, t: float) -> np.ndarray:
        """
        e^{tL}(rho) = prod_i [(1 - e^-rt) T_i + e^-rt id](rho).

        Raises:
            ValidationError: For t < 0
        """
        if t < 0:
            raise ValidationError(f"Negative evolution time {t}")
        return self._apply_all(rho, float(-np.expm1(-self.rate * t)))

    def fixed_point(self, rho: np.ndarray) -> np.ndarray:
        """T_Lambda(rho), the t -> infinity limit."""
        return self._apply_all(rho, 1.0)

    def trajectory_distances(self, rho: np.ndarray, times: Iterable[float]) -> List[float]:
        """Trace distance to T_Lambda(rho) along ``times``."""
        target = self.fixed_point(rho)
        return [0.5 * trace_norm(self.closed_form_evolve(rho, t) - target) for t in times]

    def distance_bound(self, t: float) -> float:
        return distance_bound(self.rate * t, len(self.sites))


def product_driver(
    geometry: LatticeGeometry, psi: np.ndarray, sites: Optional[Sequence[int]] = None
) -> ProductDriver:
    """Driver of every site (or ``sites``) towards |psi>."""
    driven = None if sites is None else tuple(sites)
    return ProductDriver(geometry, replacement_channel(psi), driven)


def ghz_condense_channel(geometry: LatticeGeometry, m: int = 2) -> ProductDriver:
    """
    Per-site condensation of GHZ_n onto GHZ_m, n the local dimension of ``geometry``.

    Raises:
        ValidationError: If m does not divide the local dimension
    """
    n = geometry.local_dims[0]
    if any(d != n for d in geometry.local_dims):
        raise DimensionError("Condensation needs a uniform local dimension")
    return ProductDriver(geometry, condensation_channel(n, m))


def twisted_action(lind: Lindbladian, unitary: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """U^dag L(U rho U^dag) U."""
    return unitary.conj().T @ lind.apply(unitary @ rho @ unitary.conj().T) @ unitary


def covariance_check(
    lind: Lindbladian,
    site_unitaries: Sequence[np.ndarray],
    rng: Optional[np.random.Generator] = None,
    samples: int = 3,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """
    max over g and random inputs of ||U_g^dag L(U_g rho U_g^dag) U_g - L(rho)||_1,
    with U_g the on-site unitary repeated on every site.

    Raises:
        NumericGuardError: If the lattice exceeds the dense guard
    """
    geometry = lind.geometry
    policy.check_dense(geometry.dim, "covariance check")
    rng = rng or np.random.default_rng(0)
    inputs = []
    for _ in range(samples):
        a = rng.normal(size=(geometry.dim,) * 2) + 1j * rng.normal(size=(geometry.dim,) * 2)
        inputs.append(a @ a.conj().T / np.trace(a @ a.conj().T))
    worst = 0.0
    for u in site_unitaries:
        full = kron_all([u] * geometry.n_sites)
        for rho in inputs:
            worst = max(worst, trace_norm(twisted_action(lind, full, rho) - lind.apply(rho)))
    logger.debug(f"Covariance residual {worst:.3e} over {len(site_unitaries)} unitaries")
    return worst


def symmetry_defect(rho: np.ndarray, site_unitaries: Sequence[np.ndarray], n_sites: int) -> float:
    """max_g ||U_g rho U_g^dag - rho||_1."""
    worst = 0.0
    for u in site_unitaries:
        full = kron_all([u] * n_sites)
        worst = max(worst, trace_norm(full @ rho @ full.conj().T - rho))
    return worst
