"""Quasi-adiabatic transport, Delta^n decay, patch ladders and block circuits."""

import logging
from typing import Tuple

import numpy as np

from mixphase.config.schema import PathPayload
from mixphase.qstate.linalg import NumericPolicy
from mixphase.quasiadiabatic import (
    DELTA_HEADER,
    PATCH_HEADER,
    QA_HEADER,
    GeneratorMode,
    TransportReport,
    build_path,
    circuit_ladder,
    delta_decomposition,
    patch_ladder,
    transport_report,
)
from mixphase.workflows.base import ExperimentResult, ExperimentWorkflow, TableOutput

logger = logging.getLogger(__name__)

CIRCUIT_HEADER = ("omega", "depth", "fidelity", "circuit_residual")

# endpoint ground-state fidelity required per generator mode
FIDELITY_FLOOR = {GeneratorMode.EXACT: 0.999, GeneratorMode.FILTERED: 0.995}


def path_from(payload: PathPayload):
    return build_path(payload.name, payload.n_sites, payload.coupling)


def path_label(payload: PathPayload) -> str:
    label = payload.name
    if payload.n_sites is not None:
        label += f"_n{payload.n_sites}"
    return label


def _transport_entry(args: Tuple[PathPayload, str, int, NumericPolicy]) -> TransportReport:
    payload, mode, n_points, policy = args
    return transport_report(path_from(payload), GeneratorMode(mode), n_points, policy)


class QAWorkflow(ExperimentWorkflow):
    kind = "qa"

    def compute(self) -> ExperimentResult:
        exp = self.experiment
        result = ExperimentResult(self.kind)

        jobs = [(p, mode, exp.n_points, self.policy) for p in exp.paths for mode in exp.modes]
        reports = self.sweep(_transport_entry, jobs)
        for (payload, mode, _, _), report in zip(jobs, reports):
            label = f"{path_label(payload)}_{mode}"
            result.tables.append(
                TableOutput(f"{self.prefix}_{label}.csv", QA_HEADER, report.rows())
            )
            endpoint = float(report.fidelities[-1])
            result.summary[f"fidelity_{label}"] = endpoint
            result.summary[f"min_gap_{label}"] = float(report.gaps.min())
            result.checks[f"transport_{label}"] = endpoint >= FIDELITY_FLOOR[report.mode]

        if exp.delta is not None:
            spec = exp.delta
            decomposition = delta_decomposition(
                path_from(spec.path), spec.s, spec.center, spec.radius, policy=self.policy
            )
            result.tables.append(
                TableOutput(f"{self.prefix}_delta.csv", DELTA_HEADER, decomposition.rows())
            )
            tail = decomposition.norms[2:]
            result.summary["delta_norms"] = decomposition.norms
            if len(tail) > 1:
                result.checks["delta_decay_beyond_two"] = bool(np.all(np.diff(tail) <= 1e-12))

        if exp.patch is not None:
            spec = exp.patch
            path = path_from(spec.path)
            ladder = patch_ladder(path, spec.region, spec.omegas, policy=self.policy)
            result.tables.append(
                TableOutput(f"{self.prefix}_patch.csv", PATCH_HEADER, ladder.rows())
            )
            result.summary["patch_residuals"] = ladder.residuals
            result.checks["patch_residual_decreasing"] = ladder.monotone

        if exp.circuit is not None:
            spec = exp.circuit
            reports = circuit_ladder(path_from(spec.path), spec.omegas, policy=self.policy)
            rows = [
                (omega, r.depth, r.fidelity, r.circuit_residual) for omega, r in reports.items()
            ]
            result.tables.append(TableOutput(f"{self.prefix}_circuit.csv", CIRCUIT_HEADER, rows))
            result.summary["circuit_fidelities"] = [r.fidelity for r in reports.values()]

        if not result.tables:
            logger.warning("QA experiment lists no paths, delta, patch or circuit entries")
        return result
