"""Switched-composite and circuit-compilation experiments."""

import logging
from typing import List, Tuple

import numpy as np

from mixphase.config.schema import CompileExperiment, StagePayload, SwitchExperiment
from mixphase.lindblad import LindbladTerm, Lindbladian
from mixphase.qstate import LatticeGeometry
from mixphase.qstate.linalg import NumericPolicy, kron_all, trace_distance
from mixphase.switchgear import (
    SWITCH_HEADER,
    CircuitSchedule,
    band_leak,
    bell_circuit,
    build_switched,
    circuit_run_time,
    compile_circuit,
    error_budget,
    run_switched,
    sequential_oracle,
)
from mixphase.timer import TimerSpec
from mixphase.workflows.base import ExperimentResult, ExperimentWorkflow, TableOutput

logger = logging.getLogger(__name__)

SQRT_HALF = 1 / np.sqrt(2)

# target ket and its orthogonal partner
TARGETS = {
    "zero": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "one": (np.array([0, 1], dtype=complex), np.array([1, 0], dtype=complex)),
    "plus": (SQRT_HALF * np.array([1, 1], dtype=complex), SQRT_HALF * np.array([1, -1])),
    "minus": (SQRT_HALF * np.array([1, -1], dtype=complex), SQRT_HALF * np.array([1, 1])),
}

INTEGRATOR_RTOL = 1e-10
INTEGRATOR_ATOL = 1e-12


def drive_to(geometry: LatticeGeometry, stage: StagePayload) -> Lindbladian:
    """One jump sqrt(rate) |psi><psi_perp| per driven site."""
    psi, perp = TARGETS[stage.target]
    jump = np.sqrt(stage.rate) * np.outer(psi, perp.conj())
    sites = range(geometry.n_sites) if stage.sites is None else stage.sites
    return Lindbladian(geometry, tuple(LindbladTerm.dissipator((s,), [jump]) for s in sites))


def initial_state(name: str, n_sites: int) -> np.ndarray:
    if name == "maximally_mixed":
        d = 2**n_sites
        return np.eye(d, dtype=complex) / d
    psi = TARGETS[name][0]
    return kron_all([np.outer(psi, psi.conj())] * n_sites)


def _switch_entry(args: Tuple[SwitchExperiment, int, NumericPolicy]) -> Tuple[float, float]:
    exp, T, policy = args
    geometry = LatticeGeometry.chain(exp.n_sites)
    stages = [drive_to(geometry, s) for s in exp.stages]
    rho0 = initial_state(exp.initial, exp.n_sites)
    t_final = exp.t_final or exp.tau + 3.0
    target = sequential_oracle(stages, [exp.tau], rho0, t_final, policy).matrix
    sw = build_switched(stages, TimerSpec.from_tau(T, exp.tau), exp.attachment)
    run = run_switched(sw, rho0, [0.0, t_final], rtol=INTEGRATOR_RTOL, atol=INTEGRATOR_ATOL)
    return trace_distance(run.final_marginal, target), band_leak(sw, t_final)


def _compile_entry(args: Tuple[CompileExperiment, int]) -> Tuple[float, float, float]:
    exp, T = args
    schedule = load_schedule(exp)
    rho0 = initial_state("zero", schedule.geometry.n_sites)
    sw = compile_circuit(schedule, T, exp.attachment)
    t = circuit_run_time(schedule, T)
    run = run_switched(sw, rho0, [0.0, t])
    return t, trace_distance(run.final_marginal, schedule.apply(rho0)), band_leak(sw, t)


def load_schedule(exp: CompileExperiment) -> CircuitSchedule:
    """The configured circuit, or H then CNOT when none is given."""
    if exp.circuit is None:
        return bell_circuit(exp.dwell)
    return CircuitSchedule.from_payload(exp.circuit)


def _decreasing(values: List[float]) -> bool:
    return bool(np.all(np.diff(values) < 0))


class SwitchWorkflow(ExperimentWorkflow):
    """Timer-switched composite against the piecewise-sequential oracle along a T ladder."""

    kind = "switch"

    def compute(self) -> ExperimentResult:
        exp = self.experiment
        t_final = exp.t_final or exp.tau + 3.0
        entries = self.sweep(_switch_entry, [(exp, T, self.policy) for T in exp.T_values])
        rows = [(T, t_final, d, leak) for T, (d, leak) in zip(exp.T_values, entries)]
        distances = [d for d, _ in entries]

        geometry = LatticeGeometry.chain(exp.n_sites)
        stages = [drive_to(geometry, s) for s in exp.stages]
        largest = build_switched(
            stages, TimerSpec.from_tau(exp.T_values[-1], exp.tau), exp.attachment
        )
        budget = error_budget(largest)

        result = ExperimentResult(self.kind)
        result.tables.append(TableOutput(f"{self.prefix}.csv", SWITCH_HEADER, rows))
        result.summary["final_distance"] = distances[-1]
        result.summary["budget_band_leak"] = budget.band_leak
        result.summary["budget_window"] = budget.window
        result.summary["budget_total"] = budget.total
        if len(distances) > 1:
            result.checks["distance_decreasing_in_T"] = _decreasing(distances)
        return result


class CompileWorkflow(ExperimentWorkflow):
    """Compiled circuit against its ideal output along a T ladder."""

    kind = "compile"

    def compute(self) -> ExperimentResult:
        exp = self.experiment
        schedule = load_schedule(exp)
        logger.info(
            f"Compiling {len(schedule.layers)} layers on {schedule.geometry.n_sites} sites"
        )
        entries = self.sweep(_compile_entry, [(exp, T) for T in exp.T_values])
        rows = [(T, t, d, leak) for T, (t, d, leak) in zip(exp.T_values, entries)]
        distances = [d for _, d, _ in entries]

        result = ExperimentResult(self.kind)
        result.tables.append(TableOutput(f"{self.prefix}.csv", SWITCH_HEADER, rows))
        result.summary["final_distance"] = distances[-1]
        result.summary["layers"] = len(schedule.layers)
        if len(distances) > 1:
            result.checks["distance_decreasing_in_T"] = _decreasing(distances)
        return result
