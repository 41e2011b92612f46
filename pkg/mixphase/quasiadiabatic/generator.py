"""
Quasi-adiabatic generators K(s) and ground-state transport psi' = i K psi.

Two generators are provided: the exact transport generator, which weights
H'(s) by i/w over every pair of distinct levels, and the filtered generator
K(s) = int W(t) e^{iHt} H'(s) e^{-iHt} dt, evaluated spectrally.
"""

import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad_vec, solve_ivp
from scipy.special import erfc

from mixphase.qstate.linalg import DEFAULT_POLICY, NumericPolicy, operator_norm
from mixphase.quasiadiabatic.path import DERIVATIVE_STEP, HamiltonianPath
from mixphase.utils.errors import NumericGuardError, ValidationError

logger = logging.getLogger(__name__)

QA_HEADER = ("s", "gap", "fidelity")

TAIL_TOLERANCE = 1e-6


class GeneratorMode(Enum):
    FILTERED = "filtered"
    EXACT = "exact"


@dataclass(frozen=True)
class FilterSpec:
    """
    Odd filter W(t) = sgn(t) erfc(gap |t| / sqrt(q)) / 2.

    Its transform is (i/w)(1 - exp(-q w^2 / (4 gap^2))), which equals the
    exact i/w up to exp(-q/4) for every |w| >= gap.

    Attributes:
        gap: Uniform gap of the path
        q: Taper parameter
        t_cut: Time truncation; defaults to 40 / gap
    """

    gap: float
    q: float = 56.0
    t_cut: Optional[float] = None

    def __post_init__(self):
        if self.gap <= 0 or self.q <= 0:
            raise ValidationError(f"Filter needs gap > 0 and q > 0, got {self.gap}, {self.q}")

    @property
    def cutoff(self) -> float:
        return self.t_cut if self.t_cut is not None else 40.0 / self.gap

    @property
    def _rate(self) -> float:
        return self.gap / np.sqrt(self.q)

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        return np.sign(t) * erfc(self._rate * np.abs(t)) / 2

    def transform(self, omega):
        omega = np.asarray(omega, dtype=float)
        taper = -np.expm1(-self.q * omega**2 / (4 * self.gap**2))
        out = np.zeros(omega.shape, dtype=complex)
        np.divide(1j * taper, omega, out=out, where=omega != 0)
        return out

    def tail_mass(self) -> float:
        """int_{|t| > t_cut} |W(t)| dt."""
        x = self._rate * self.cutoff
        return float((np.exp(-(x**2)) / np.sqrt(np.pi) - x * erfc(x)) / self._rate)

    def tail_bound(self, derivative_norm: float) -> float:
        """Error from truncating the time integral at t_cut."""
        return self.tail_mass() * derivative_norm


def filter_transform(hamiltonian: np.ndarray, op: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """int W(t) e^{iHt} A e^{-iHt} dt in the eigenbasis of H."""
    energies, vectors = np.linalg.eigh(hamiltonian)
    local = vectors.conj().T @ op @ vectors
    omegas = energies[:, None] - energies[None, :]
    out = vectors @ (local * spec.transform(omegas)) @ vectors.conj().T
    return (out + out.conj().T) / 2


def filter_time_domain(
    hamiltonian: np.ndarray, op: np.ndarray, spec: FilterSpec, epsabs: float = 1e-10
) -> np.ndarray:
    """
    Same integral by adaptive quadrature over [0, t_cut], folding the odd filter.
    """
    energies, vectors = np.linalg.eigh(hamiltonian)
    local = vectors.conj().T @ op @ vectors
    omegas = energies[:, None] - energies[None, :]
    n = local.size

    def integrand(t: float) -> np.ndarray:
        # tau_t(A) - tau_{-t}(A) = 2i sin(w t) A in the eigenbasis
        value = spec.weight(t) * 2j * np.sin(omegas * t) * local
        return np.concatenate([value.real.ravel(), value.imag.ravel()])

    result, _ = quad_vec(integrand, 0.0, spec.cutoff, epsabs=epsabs)
    folded = (result[:n] + 1j * result[n:]).reshape(local.shape)
    return vectors @ folded @ vectors.conj().T


def exact_qa_generator(
    path: HamiltonianPath,
    s: float,
    step: float = DERIVATIVE_STEP,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """
    K_ex(s) = i sum_{E_m != E_n} |m><m| dH/ds |n><n| / (E_m - E_n).

    Pairs inside one eigenspace are dropped, so the result does not depend on
    the basis chosen within degenerate levels and splits into single-site terms
    when H(s) does. dH/ds is taken by central differences.

    Raises:
        GapCollapseError: If the gap closes at s
    """
    spectrum = path.spectrum(s, policy)
    vectors = spectrum.vectors
    local = vectors.conj().T @ path.derivative(s, step) @ vectors
    omegas = spectrum.energies[:, None] - spectrum.energies[None, :]
    weights = np.zeros(omegas.shape, dtype=complex)
    np.divide(1j, omegas, out=weights, where=np.abs(omegas) > policy.gap_tolerance)
    k = vectors @ (local * weights) @ vectors.conj().T
    return (k + k.conj().T) / 2


def _projector_derivative(
    path: HamiltonianPath, s: float, step: float, policy: NumericPolicy
) -> np.ndarray:
    plus = path.spectrum(s + step, policy).ground_projector
    minus = path.spectrum(s - step, policy).ground_projector
    return (plus - minus) / (2 * step)


def intertwining_residual(
    path: HamiltonianPath,
    s: float,
    generator: np.ndarray,
    step: float = DERIVATIVE_STEP,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """||dP/ds - i[K, P]||."""
    p = path.spectrum(s, policy).ground_projector
    dp = _projector_derivative(path, s, step, policy)
    return operator_norm(dp - 1j * (generator @ p - p @ generator))


def filtered_qa_generator(
    path: HamiltonianPath,
    s: float,
    spec: Optional[FilterSpec] = None,
    policy: NumericPolicy = DEFAULT_POLICY,
    tail_tolerance: float = TAIL_TOLERANCE,
) -> np.ndarray:
    """
    Filtered generator at s.

    Raises:
        NumericGuardError: If the filter tail beyond t_cut exceeds ``tail_tolerance``
    """
    spec = spec or FilterSpec(path.uniform_gap(policy=policy))
    derivative = path.derivative(s)
    bound = spec.tail_bound(operator_norm(derivative))
    if bound > tail_tolerance:
        raise NumericGuardError(
            "filter_tail",
            f"Filter tail bound {bound:.3e} beyond t_cut={spec.cutoff:.3f} "
            f"exceeds {tail_tolerance:.1e}",
        )
    return filter_transform(path.hamiltonian(s, policy), derivative, spec)


@dataclass
class QAGenerator:
    """K(s) for one path in one mode; the filter is fixed by the uniform gap."""

    path: HamiltonianPath
    mode: GeneratorMode = GeneratorMode.FILTERED
    filter_spec: Optional[FilterSpec] = None
    policy: NumericPolicy = field(default=DEFAULT_POLICY)

    def __post_init__(self):
        self.mode = GeneratorMode(self.mode)
        if self.mode is GeneratorMode.FILTERED and self.filter_spec is None:
            self.filter_spec = FilterSpec(self.path.uniform_gap(policy=self.policy))

    def __call__(self, s: float) -> np.ndarray:
        if self.mode is GeneratorMode.EXACT:
            return exact_qa_generator(self.path, s, policy=self.policy)
        return filtered_qa_generator(self.path, s, self.filter_spec, self.policy)

    def evaluate(self, grid: Sequence[float]) -> List[np.ndarray]:
        return [self(s) for s in grid]


def transport_state(
    generator: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    grid: Sequence[float],
    tol: float = 1e-10,
) -> List[np.ndarray]:
    """
    Integrate psi' = i K(s) psi with DOP853 and return psi on ``grid``.

    Raises:
        NumericGuardError: When the integrator fails
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1 or (np.diff(grid) < 0).any():
        raise ValidationError("Transport grid must be sorted and non-empty")
    psi0 = np.asarray(psi0, dtype=complex)
    if grid[-1] == grid[0]:
        return [psi0.copy() for _ in grid]
    result = solve_ivp(
        lambda s, y: 1j * (generator(s) @ y),
        (float(grid[0]), float(grid[-1])),
        psi0,
        method="DOP853",
        t_eval=grid,
        rtol=tol,
        atol=tol,
    )
    if result.status == -1:
        raise NumericGuardError("integrator", f"Transport failed: {result.message}")
    return [result.y[:, k] for k in range(result.y.shape[1])]


def trapezoid_transport(
    generators: Sequence[np.ndarray], grid: Sequence[float]
) -> List[np.ndarray]:
    """
    Unitaries U(s_k) for U' = i K U, U(s_0) = I, from K sampled on ``grid``:
    U_{k+1} = exp(i h (K_k + K_{k+1}) / 2) U_k.
    """
    dim = generators[0].shape[0]
    out = [np.eye(dim, dtype=complex)]
    for k in range(len(grid) - 1):
        h = grid[k + 1] - grid[k]
        step = sla.expm(0.5j * h * (generators[k] + generators[k + 1]))
        out.append(step @ out[-1])
    return out


@dataclass
class TransportReport:
    """Gap and ground-state fidelity of a transported state along s."""

    path_name: str
    mode: GeneratorMode
    s: np.ndarray
    gaps: np.ndarray
    fidelities: np.ndarray

    @property
    def min_fidelity(self) -> float:
        return float(self.fidelities.min())

    def rows(self) -> List[Tuple[float, float, float]]:
        return [
            (float(a), float(b), float(c))
            for a, b, c in zip(self.s, self.gaps, self.fidelities)
        ]

    def write_csv(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(QA_HEADER)
            for row in self.rows():
                writer.writerow([f"{x:.12e}" for x in row])


def transport_report(
    path: HamiltonianPath,
    mode: GeneratorMode = GeneratorMode.FILTERED,
    n_points: int = 11,
    policy: NumericPolicy = DEFAULT_POLICY,
    tol: float = 1e-10,
) -> TransportReport:
    """Transport the s = 0 ground state and compare with the ground state of H(s)."""
    grid = np.linspace(0.0, 1.0, n_points)
    generator = QAGenerator(path, mode, policy=policy)
    spectra = [path.spectrum(s, policy) for s in grid]
    states = transport_state(generator, spectra[0].ground_state, grid, tol)
    fidelities = np.array(
        [
            float(np.real(np.vdot(psi, sp.ground_projector @ psi)))
            for psi, sp in zip(states, spectra)
        ]
    )
    gaps = np.array([sp.gap for sp in spectra])
    logger.info(
        f"Transport along {path.name} ({generator.mode.value}): "
        f"min fidelity {fidelities.min():.10f}"
    )
    return TransportReport(path.name, generator.mode, grid, gaps, fidelities)
