"""Overlap witnesses on the quantum double and the GHZ analogue."""

import logging
from typing import Tuple

import numpy as np

from mixphase.models import basis_generation_check, build_quantum_double
from mixphase.nogo import (
    NOGO_HEADER,
    OverlapReport,
    depolarizing_lindbladian,
    ghz_nogo_probe,
    overlap_probe,
)
from mixphase.qstate.linalg import NumericPolicy
from mixphase.workflows.base import ExperimentResult, ExperimentWorkflow, TableOutput

logger = logging.getLogger(__name__)


def _rate_entry(args: Tuple[int, int, int, float, float, float, NumericPolicy]) -> OverlapReport:
    n, lx, ly, rate, t, ell, policy = args
    qd = build_quantum_double(n, lx, ly, policy)
    noise = depolarizing_lindbladian(qd.geometry, rate)
    report = overlap_probe(qd, None, noise, t, ell, policy=policy)
    report.rate = float(rate)
    return report


def _strictly_increasing(values) -> bool:
    return bool(np.all(np.diff(values) > 0))


class NogoWorkflow(ExperimentWorkflow):
    kind = "nogo"

    def compute(self) -> ExperimentResult:
        result = ExperimentResult(self.kind)
        self._algebra(result)
        self._rate_ladder(result)
        if self.experiment.ghz is not None:
            self._ghz(result)
        return result

    def _algebra(self, result: ExperimentResult) -> None:
        """Ground-space dimension, logical algebra and basis generation."""
        exp = self.experiment
        qd = build_quantum_double(exp.group_order, exp.lx, exp.ly, self.policy)
        if qd.geometry.dim <= self.policy.dense_dim_limit:
            dimension = qd.ground_space_dimension(self.policy)
            result.summary["ground_space_dimension"] = dimension
            result.checks["ground_space_dimension"] = dimension == exp.group_order**2
        commutation = qd.commutation_residual()
        algebra = qd.logical_algebra_residual()
        homotopy = qd.homotopy_residual()
        result.summary["commutation_residual"] = commutation
        result.summary["logical_algebra_residual"] = algebra
        result.summary["homotopy_residual"] = homotopy
        result.checks["stabilizers_commute"] = commutation <= self.policy.algebraic_atol
        result.checks["logical_algebra"] = algebra <= self.policy.algebraic_atol
        result.checks["homotopy_invariance"] = homotopy <= self.policy.algebraic_atol

        if exp.generation_samples:
            rng = self.rng(2)
            size = exp.group_order**2
            generating = 0
            for _ in range(exp.generation_samples):
                psi = rng.normal(size=size) + 1j * rng.normal(size=size)
                psi /= np.linalg.norm(psi)
                generating += int(basis_generation_check(qd, psi).generates)
            result.summary["generating_samples"] = generating
            result.checks["random_kets_generate"] = generating == exp.generation_samples

    def _rate_ladder(self, result: ExperimentResult) -> None:
        exp = self.experiment
        jobs = [
            (exp.group_order, exp.lx, exp.ly, r, exp.t, exp.ell, self.policy) for r in exp.rates
        ]
        reports = self.sweep(_rate_entry, jobs)
        result.tables.append(
            TableOutput(f"{self.prefix}.csv", NOGO_HEADER, [r.row() for r in reports])
        )
        result.summary["det_gap"] = [r.det_gap for r in reports]
        result.summary["schwarz_defect"] = [r.schwarz_defect for r in reports]
        result.summary["position_defect"] = [r.position_defect for r in reports]

        for report in reports:
            if report.rate == 0:
                result.checks["noiseless_probe_exact"] = (
                    report.gram_residual <= self.policy.algebraic_atol
                    and report.schwarz_defect <= self.policy.algebraic_atol
                )
        if len(reports) > 1:
            ordered = sorted(reports, key=lambda r: r.rate)
            result.checks["det_gap_increasing"] = _strictly_increasing(
                [r.det_gap for r in ordered]
            )
            result.checks["schwarz_increasing"] = _strictly_increasing(
                [r.schwarz_defect for r in ordered]
            )

    def _ghz(self, result: ExperimentResult) -> None:
        exp = self.experiment
        ghz = exp.ghz
        report = ghz_nogo_probe(ghz.m, ghz.n, None, exp.t, exp.ell, ghz.n_sites, policy=self.policy)
        result.tables.append(TableOutput(f"{self.prefix}_ghz.csv", NOGO_HEADER, [report.row()]))
        result.summary["ghz_gram_rank"] = report.rank
        result.checks["ghz_rank_equals_m"] = report.rank == ghz.m
