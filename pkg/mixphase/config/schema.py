"""
Experiment documents.

An experiment is a JSON file with ``schema_version: 1`` and a ``kind`` that
selects one of the models below. Unknown keys are rejected everywhere.
"""

import json
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from pydantic import ValidationError as PydanticValidationError

from mixphase.qstate.io import MatrixPayload
from mixphase.switchgear.circuit import CircuitPayload
from mixphase.utils.errors import ConfigError

SCHEMA_VERSION = 1

KINDS = ("timer", "switch", "compile", "qa", "condense", "nogo", "evolve")

TargetName = Literal["zero", "one", "plus", "minus"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NumericOverrides(StrictModel):
    """Per-experiment overrides of the numeric policy; unset fields keep the settings value."""

    algebraic_atol: Optional[float] = Field(default=None, gt=0)
    dynamics_atol: Optional[float] = Field(default=None, gt=0)
    positivity_atol: Optional[float] = Field(default=None, gt=0)
    dense_dim_limit: Optional[int] = Field(default=None, ge=1)
    superoperator_dim_limit: Optional[int] = Field(default=None, ge=1)
    dense_expm_limit: Optional[int] = Field(default=None, ge=1)
    max_gadget_timer: Optional[int] = Field(default=None, ge=1)
    gap_tolerance: Optional[float] = Field(default=None, gt=0)
    ket_dim_limit: Optional[int] = Field(default=None, ge=1)


class ExperimentBase(StrictModel):
    schema_version: Literal[1]
    name: Optional[str] = None
    seed: int = Field(default=0, ge=0, lt=2**64)
    numeric: NumericOverrides = Field(default_factory=NumericOverrides)
    output_prefix: Optional[str] = Field(default=None, pattern=r"^[A-Za-z0-9_.-]+$")

    @property
    def prefix(self) -> str:
        return self.output_prefix or self.kind  # type: ignore[attr-defined]


def _sorted_positive(values: List[int], what: str) -> List[int]:
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{what} must be strictly increasing")
    return values


# ============================================================================
# Timers
# ============================================================================


class TimerExperiment(ExperimentBase):
    """Level occupations of one timer and the switching-bound ladder."""

    kind: Literal["timer"]
    T: int = Field(default=4, ge=1)
    tau: float = Field(default=2.0, gt=0)
    times: List[float] = Field(default=[0.25, 0.5, 1.0, 1.5, 2.0], min_length=1)
    ladder: List[int] = Field(default=[64, 128, 256, 512], min_length=1)
    epsilon: Optional[float] = Field(default=None, gt=0)
    gadget: bool = True

    @model_validator(mode="after")
    def _check(self) -> "TimerExperiment":
        if min(self.times) < 0 or any(b < a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be sorted and non-negative")
        _sorted_positive(self.ladder, "ladder")
        return self


# ============================================================================
# Switched composites and circuits
# ============================================================================


class StagePayload(StrictModel):
    """Product driver of ``sites`` (all by default) towards a single-qubit target."""

    target: TargetName
    sites: Optional[List[int]] = None
    rate: float = Field(default=1.0, gt=0)


class SwitchExperiment(ExperimentBase):
    kind: Literal["switch"]
    n_sites: int = Field(default=2, ge=1)
    initial: Union[TargetName, Literal["maximally_mixed"]] = "maximally_mixed"
    stages: List[StagePayload] = Field(min_length=2)
    tau: float = Field(default=1.0, gt=0)
    T_values: List[int] = Field(default=[8, 16, 32, 64], min_length=1)
    t_final: Optional[float] = Field(default=None, gt=0)
    attachment: Literal["site", "shared"] = "site"

    @model_validator(mode="after")
    def _check(self) -> "SwitchExperiment":
        _sorted_positive(self.T_values, "T_values")
        if len(self.stages) > 2:
            raise ValueError("switch experiments support two stages; use compile for more")
        return self


class CompileExperiment(ExperimentBase):
    kind: Literal["compile"]
    circuit: Optional[CircuitPayload] = None
    dwell: float = Field(default=1.0, gt=0)
    T_values: List[int] = Field(default=[64, 128, 256, 512], min_length=1)
    attachment: Literal["site", "shared"] = "site"

    @model_validator(mode="after")
    def _check(self) -> "CompileExperiment":
        _sorted_positive(self.T_values, "T_values")
        return self


# ============================================================================
# Quasi-adiabatic continuation
# ============================================================================


class PathPayload(StrictModel):
    name: str
    n_sites: Optional[int] = Field(default=None, ge=1)
    coupling: Optional[float] = None


class DeltaPayload(StrictModel):
    path: PathPayload
    s: float = Field(default=0.5, ge=0, le=1)
    center: int = Field(default=0, ge=0)
    radius: int = Field(default=0, ge=0)


class PatchPayload(StrictModel):
    path: PathPayload
    region: List[int] = Field(min_length=1)
    omegas: List[int] = Field(default=[1, 2, 3], min_length=1)


class CircuitLadderPayload(StrictModel):
    path: PathPayload
    omegas: List[int] = Field(min_length=1)


class QAExperiment(ExperimentBase):
    kind: Literal["qa"]
    paths: List[PathPayload] = Field(default_factory=list)
    modes: List[Literal["exact", "filtered"]] = Field(default=["exact", "filtered"])
    n_points: int = Field(default=11, ge=2)
    delta: Optional[DeltaPayload] = None
    patch: Optional[PatchPayload] = None
    circuit: Optional[CircuitLadderPayload] = None


# ============================================================================
# Condensation
# ============================================================================


class SPTPayload(StrictModel):
    omega0: str = "nontrivial"
    omega1: str = "trivial"
    n_sites: int = Field(default=4, ge=1)
    times: List[float] = Field(default=[0.0, 5.0, 10.0, 20.0, 30.0], min_length=1)


class CondenseExperiment(ExperimentBase):
    kind: Literal["condense"]
    n_sites: int = Field(default=4, ge=1)
    local_dim: int = Field(default=4, ge=2)
    m: int = Field(default=2, ge=1)
    times: List[float] = Field(default=[0.0, 1.0, 5.0, 10.0, 20.0, 40.0], min_length=1)
    bound_sites: Optional[int] = Field(default=4, ge=1)
    spt: Optional[SPTPayload] = None

    @model_validator(mode="after")
    def _check(self) -> "CondenseExperiment":
        if self.local_dim % self.m:
            raise ValueError(f"m={self.m} must divide local_dim={self.local_dim}")
        if any(b < a for a, b in zip(self.times, self.times[1:])) or min(self.times) < 0:
            raise ValueError("times must be sorted and non-negative")
        return self


# ============================================================================
# No-go witnesses
# ============================================================================


class GHZProbePayload(StrictModel):
    m: int = Field(default=2, ge=1)
    n: int = Field(default=4, ge=2)
    n_sites: int = Field(default=3, ge=1)


class NogoExperiment(ExperimentBase):
    kind: Literal["nogo"]
    group_order: int = Field(default=2, ge=2)
    lx: int = Field(default=2, ge=1)
    ly: int = Field(default=2, ge=1)
    rates: List[float] = Field(default=[0.0, 0.05, 0.1, 0.2], min_length=1)
    t: float = Field(default=1.0, ge=0)
    ell: float = Field(default=1.0, ge=0)
    generation_samples: int = Field(default=100, ge=0)
    ghz: Optional[GHZProbePayload] = None

    @model_validator(mode="after")
    def _check(self) -> "NogoExperiment":
        if any(r < 0 for r in self.rates):
            raise ValueError("rates must be non-negative")
        return self


# ============================================================================
# Generic evolution
# ============================================================================


class TermPayload(StrictModel):
    support: List[int] = Field(min_length=1)
    hamiltonian: Optional[MatrixPayload] = None
    jumps: List[MatrixPayload] = Field(default_factory=list)


class AxiomsPayload(StrictModel):
    """Random-Lindbladian sweep of the channel axioms."""

    count: int = Field(default=200, ge=1)
    max_sites: int = Field(default=2, ge=1, le=4)
    t: float = Field(default=0.7, gt=0)


class EvolveExperiment(ExperimentBase):
    kind: Literal["evolve"]
    n_sites: int = Field(default=1, ge=1)
    local_dim: int = Field(default=2, ge=2)
    lattice: Literal["chain", "ring"] = "chain"
    terms: List[TermPayload] = Field(default_factory=list)
    initial: Union[Literal["maximally_mixed", "zero"], MatrixPayload] = "zero"
    target: Optional[MatrixPayload] = None
    times: List[float] = Field(default=[0.0, 0.5, 1.0, 2.0, 4.0], min_length=1)
    axioms: Optional[AxiomsPayload] = None


Experiment = Annotated[
    Union[
        TimerExperiment,
        SwitchExperiment,
        CompileExperiment,
        QAExperiment,
        CondenseExperiment,
        NogoExperiment,
        EvolveExperiment,
    ],
    Field(discriminator="kind"),
]

_ADAPTER: TypeAdapter = TypeAdapter(Experiment)


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_experiment(data: Dict) -> ExperimentBase:
    """
    Validate an experiment document.

    Raises:
        ConfigError: Naming the dotted path of the first offending field
    """
    if not isinstance(data, dict):
        raise ConfigError("Experiment document must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {data.get('schema_version')!r}"
        )
    kind = data.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    try:
        return _ADAPTER.validate_python(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        loc = tuple(first["loc"])
        if loc and loc[0] == kind:
            loc = loc[1:]
        raise ConfigError(f"{_field_path(loc)}: {first['msg']}")


def load_experiment(path: Path) -> ExperimentBase:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: If the file is missing, not JSON, or fails validation
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"Cannot read experiment file {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    return parse_experiment(data)
