"""Timer-switched composite Lindbladians and circuit compilation."""

from mixphase.switchgear.circuit import (
    CircuitPayload,
    CircuitSchedule,
    Gate,
    GateLayer,
    bell_circuit,
    circuit_run_time,
    circuit_timer,
    cnot,
    compile_circuit,
    gate_generator,
    hadamard,
)
from mixphase.switchgear.composite import (
    SWITCH_HEADER,
    ErrorBudget,
    SwitchedRun,
    band_leak,
    cq_mutual_information,
    error_budget,
    mean_switch_times,
    run_switched,
    sequential_oracle,
)
from mixphase.switchgear.oracles import (
    as_lindbladian,
    band_commutator_residual,
    dense_marginal,
    factorization_residual,
)
from mixphase.switchgear.switched import (
    SHARED_ATTACHMENT,
    SITE_ATTACHMENT,
    SwitchedLindbladian,
    build_switched,
)

__all__ = [
    "SHARED_ATTACHMENT",
    "SITE_ATTACHMENT",
    "SWITCH_HEADER",
    "CircuitPayload",
    "CircuitSchedule",
    "ErrorBudget",
    "Gate",
    "GateLayer",
    "SwitchedLindbladian",
    "SwitchedRun",
    "as_lindbladian",
    "band_commutator_residual",
    "band_leak",
    "bell_circuit",
    "build_switched",
    "circuit_run_time",
    "circuit_timer",
    "cnot",
    "compile_circuit",
    "cq_mutual_information",
    "dense_marginal",
    "error_budget",
    "factorization_residual",
    "gate_generator",
    "hadamard",
    "mean_switch_times",
    "run_switched",
    "sequential_oracle",
]
