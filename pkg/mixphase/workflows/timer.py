"""Timer experiment: level occupations, oracle agreement and the switching-bound ladder."""

import logging
from typing import Optional, Tuple

import numpy as np

from mixphase.timer import (
    BOUNDS_HEADER,
    SwitchBounds,
    TimerSpec,
    birth_chain_dist,
    chain_dist_ode,
    default_epsilon,
    quantum_timer_dist,
    switch_bounds,
)
from mixphase.workflows.base import ExperimentResult, ExperimentWorkflow, TableOutput

logger = logging.getLogger(__name__)

LEVELS_HEADER = ("t", "k", "p_k")


def _bounds_entry(args: Tuple[int, float, Optional[float]]) -> SwitchBounds:
    T, tau, epsilon = args
    spec = TimerSpec.from_tau(T, tau)
    return switch_bounds(spec, default_epsilon(spec) if epsilon is None else epsilon)


def _strictly_decreasing(values) -> bool:
    return bool(np.all(np.diff(values) < 0))


class TimerWorkflow(ExperimentWorkflow):
    kind = "timer"

    def compute(self) -> ExperimentResult:
        exp = self.experiment
        spec = TimerSpec.from_tau(exp.T, exp.tau)
        result = ExperimentResult(self.kind)

        dists = [birth_chain_dist(spec, t) for t in exp.times]
        rows = [(t, k, float(p)) for t, d in zip(exp.times, dists) for k, p in enumerate(d.probs)]
        result.tables.append(TableOutput(f"{self.prefix}_levels.csv", LEVELS_HEADER, rows))

        closed = np.array([d.probs for d in dists])
        ode = chain_dist_ode(spec, exp.times)
        ode_gap = float(np.abs(closed - ode).max())
        result.summary["ode_max_deviation"] = ode_gap
        result.checks["closed_form_matches_ode"] = ode_gap <= 1e-10

        if exp.gadget and exp.T <= self.policy.max_gadget_timer:
            gadget_gap = 0.0
            leak = 0.0
            for t, d in zip(exp.times, dists):
                quantum = quantum_timer_dist(spec, t, self.policy)
                deviation = float(np.abs(quantum.distribution.probs - d.probs).max())
                gadget_gap = max(gadget_gap, deviation)
                leak = max(leak, quantum.leakage)
            result.summary["gadget_max_deviation"] = gadget_gap
            result.summary["gadget_leakage"] = leak
            result.checks["gadget_matches_chain"] = gadget_gap <= 1e-8
        elif exp.gadget:
            logger.info(
                f"Skipping qubit gadget: T={exp.T} exceeds max_gadget_timer="
                f"{self.policy.max_gadget_timer}"
            )

        bounds = self.sweep(_bounds_entry, [(T, exp.tau, exp.epsilon) for T in exp.ladder])
        result.tables.append(
            TableOutput(f"{self.prefix}_bounds.csv", BOUNDS_HEADER, [b.row() for b in bounds])
        )
        result.summary["exponent_ratio_early"] = [b.ratio_early for b in bounds]
        result.summary["exponent_ratio_late"] = [b.ratio_late for b in bounds]
        if len(bounds) > 1:
            result.checks["early_flip_decreasing"] = _strictly_decreasing(
                [b.log_p_early for b in bounds]
            )
            result.checks["late_flip_decreasing"] = _strictly_decreasing(
                [b.log_p_late for b in bounds]
            )
            # log p against the exponent: slope within a factor of two of one
            for side in ("early", "late"):
                exponents = [getattr(b, f"exponent_{side}") for b in bounds]
                logs = [getattr(b, f"log_p_{side}") for b in bounds]
                slope = float(np.polyfit(exponents, logs, 1)[0])
                result.summary[f"log_p_slope_{side}"] = slope
                result.checks[f"{side}_exponent_slope"] = 0.5 <= slope <= 2.0
        return result
