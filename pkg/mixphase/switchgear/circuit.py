"""Layered unitary circuits and their compilation into timer-switched Hamiltonians."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
from pydantic import BaseModel, ConfigDict, Field

from mixphase.lindblad import LindbladTerm, Lindbladian
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.qstate.io import MatrixPayload
from mixphase.qstate.operators import embed_matrix
from mixphase.switchgear.switched import (
    SITE_ATTACHMENT,
    Attachment,
    SwitchedLindbladian,
    build_switched,
)
from mixphase.timer.spec import TimerSpec
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

UNITARY_ATOL = 1e-10


def gate_generator(unitary: np.ndarray) -> np.ndarray:
    """
    Hermitian h with exp(i h) = U and spectrum in (-pi, pi].

    Raises:
        ValidationError: If ``unitary`` is not unitary
    """
    u = np.asarray(unitary, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"Gate matrix must be square, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=UNITARY_ATOL):
        raise ValidationError("Gate matrix is not unitary")
    schur, basis = sla.schur(u, output="complex")
    angles = np.angle(np.diag(schur))
    angles[angles <= -np.pi + 1e-12] = np.pi
    h = basis @ np.diag(angles) @ basis.conj().T
    h = (h + h.conj().T) / 2
    if not np.allclose(sla.expm(1j * h), u, atol=UNITARY_ATOL):
        raise ValidationError("Gate generator does not reproduce the unitary")
    return h


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary on ``support`` together with its principal generator."""

    support: Tuple[int, ...]
    unitary: np.ndarray
    generator: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        if len(set(self.support)) != len(self.support):
            raise ValidationError(f"Repeated sites in gate support {self.support}")
        object.__setattr__(self, "unitary", np.asarray(self.unitary, dtype=complex))
        object.__setattr__(self, "generator", gate_generator(self.unitary))


@dataclass(frozen=True)
class GateLayer:
    """Gates with pairwise-disjoint supports applied together for ``dwell``."""

    gates: Tuple[Gate, ...]
    dwell: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.dwell <= 0:
            raise ValidationError(f"Layer dwell must be positive, got {self.dwell}")
        seen: set = set()
        for gate in self.gates:
            if seen & set(gate.support):
                raise ValidationError(
                    f"Gate on {gate.support} is overlapping another gate in its layer"
                )
            seen |= set(gate.support)


class GatePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    support: List[int] = Field(min_length=1)
    unitary: MatrixPayload


class LayerPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gates: List[GatePayload]
    dwell: float = Field(default=1.0, gt=0)


class CircuitPayload(BaseModel):
    """JSON layout ``{n_sites, local_dim, layers: [{gates: [{support, unitary}], dwell}]}``."""

    model_config = ConfigDict(extra="forbid")

    n_sites: int = Field(ge=1)
    local_dim: int = Field(default=2, ge=2)
    layers: List[LayerPayload] = Field(min_length=1)


@dataclass(frozen=True)
class CircuitSchedule:
    """Layers applied in order on a chain of sites."""

    geometry: LatticeGeometry
    layers: Tuple[GateLayer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValidationError("A circuit needs at least one layer")
        for layer in self.layers:
            for gate in layer.gates:
                self.geometry.validate_sites(gate.support)
                expected = int(np.prod(self.geometry.dims_of(gate.support)))
                if gate.unitary.shape != (expected, expected):
                    raise ValidationError(
                        f"Gate on {gate.support} has shape {gate.unitary.shape}, "
                        f"expected {expected}"
                    )

    @property
    def total_dwell(self) -> float:
        return float(sum(layer.dwell for layer in self.layers))

    def unitary(self) -> np.ndarray:
        """C = U_L ... U_1."""
        dims = self.geometry.local_dims
        out = np.eye(self.geometry.dim, dtype=complex)
        for layer in self.layers:
            for gate in layer.gates:
                out = embed_matrix(gate.unitary, gate.support, dims) @ out
        return out

    def apply(self, rho: np.ndarray) -> np.ndarray:
        c = self.unitary()
        return c @ np.asarray(rho, dtype=complex) @ c.conj().T

    @classmethod
    def from_payload(cls, payload: CircuitPayload) -> "CircuitSchedule":
        geometry = LatticeGeometry.chain(payload.n_sites, payload.local_dim)
        layers = tuple(
            GateLayer(
                tuple(Gate(tuple(g.support), g.unitary.to_array()) for g in layer.gates),
                layer.dwell,
            )
            for layer in payload.layers
        )
        return cls(geometry, layers)

    @classmethod
    def from_json(cls, data: dict) -> "CircuitSchedule":
        """
        Parse the circuit JSON layout.

        Raises:
            ValidationError: On malformed payloads or invalid gates
        """
        try:
            payload = CircuitPayload.model_validate(data)
        except Exception as e:
            raise ValidationError(f"Invalid circuit payload: {e}")
        return cls.from_payload(payload)

    @classmethod
    def load(cls, path: Path) -> "CircuitSchedule":
        return cls.from_json(json.loads(Path(path).read_text()))


def circuit_timer(schedule: CircuitSchedule, T: int) -> TimerSpec:
    """
    Timer whose thresholds split T in proportion to the cumulative dwell.

    Raises:
        ValidationError: If T is too small to give each layer its own levels
    """
    total = schedule.total_dwell
    cumulative = np.cumsum([layer.dwell for layer in schedule.layers])
    thresholds = [int(round(T * c / total)) for c in cumulative[:-1]]
    bounds = [0] + thresholds + [T]
    if any(b <= a for a, b in zip(bounds, bounds[1:])):
        raise ValidationError(f"T={T} is too small to separate {len(schedule.layers)} layers")
    return TimerSpec(T, T / total, tuple(thresholds))


def layer_lindbladian(layer: GateLayer, geometry: LatticeGeometry, duration: float) -> Lindbladian:
    """Coherent generator H = -sum_i h_i / duration, so e^{-i H duration} = prod_i U_i."""
    terms = tuple(
        LindbladTerm.coherent(gate.support, -gate.generator / duration) for gate in layer.gates
    )
    return Lindbladian(geometry, terms)


def compile_circuit(
    schedule: CircuitSchedule,
    T: int,
    attachment: Attachment = SITE_ATTACHMENT,
    timer: Optional[TimerSpec] = None,
) -> SwitchedLindbladian:
    """
    Switched Hamiltonian that runs each layer for its mean dwell, then stops.

    Args:
        schedule: Layered circuit
        T: Timer length
        attachment: Timer attachment of the gate terms
        timer: Explicit timer; by default thresholds follow the dwells

    Returns:
        SwitchedLindbladian: One stage per layer plus a final zero stage
    """
    timer = timer or circuit_timer(schedule, T)
    bounds = (0,) + timer.thresholds
    if len(bounds) != len(schedule.layers) + 1:
        raise ValidationError(
            f"Timer with {len(timer.thresholds)} thresholds cannot run "
            f"{len(schedule.layers)} layers"
        )
    stages: List[Lindbladian] = []
    for i, layer in enumerate(schedule.layers):
        duration = (bounds[i + 1] - bounds[i]) / timer.gamma
        if abs(duration - layer.dwell) > 0.05 * layer.dwell:
            logger.warning(
                f"Layer {i} dwell {layer.dwell} rounds to {duration:.4f} at T={timer.T}"
            )
        stages.append(layer_lindbladian(layer, schedule.geometry, duration))
    stages.append(Lindbladian.zero(schedule.geometry))
    logger.info(f"Compiled {len(schedule.layers)} layers with T={timer.T}")
    return build_switched(stages, timer, attachment)


def circuit_run_time(schedule: CircuitSchedule, T: int) -> float:
    """Time after which the timers have absorbed with high probability."""
    return schedule.total_dwell * (1.0 + 8.0 / np.sqrt(T))


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def cnot() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def bell_circuit(dwell: float = 1.0) -> CircuitSchedule:
    """H on site 0, then CNOT(0 -> 1)."""
    return CircuitSchedule(
        LatticeGeometry.chain(2),
        (
            GateLayer((Gate((0,), hadamard()),), dwell),
            GateLayer((Gate((0, 1), cnot()),), dwell),
        ),
    )
