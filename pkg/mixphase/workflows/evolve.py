"""Evolution of a configured Lindbladian and the random-channel axiom sweep."""

import logging
from typing import Tuple

import numpy as np

from mixphase.config.schema import EvolveExperiment
from mixphase.lindblad import (
    TRAJECTORY_HEADER,
    LindbladTerm,
    Lindbladian,
    choi_cp_check,
    evolve,
    fit_convergence,
    heisenberg_evolve,
)
from mixphase.qstate import DensityMatrix, Ket, LatticeGeometry
from mixphase.qstate.linalg import (
    NumericPolicy,
    random_density,
    random_hermitian,
    random_matrix,
    trace_norm,
)
from mixphase.utils.errors import DimensionError
from mixphase.workflows.base import ExperimentResult, ExperimentWorkflow, TableOutput

logger = logging.getLogger(__name__)

AXIOMS_HEADER = (
    "index",
    "dim",
    "trace_defect",
    "choi_min_eig",
    "contraction_excess",
    "duality",
    "semigroup",
)

AXIOMS_STREAM = 3


def build_lindbladian(exp: EvolveExperiment) -> Lindbladian:
    """
    Lindbladian described by the experiment's ``terms``.

    Raises:
        ValidationError: On non-Hermitian Hamiltonians or bad supports
        DimensionError: If a matrix does not fit its support
    """
    if exp.lattice == "ring":
        geometry = LatticeGeometry.ring(exp.n_sites, exp.local_dim)
    else:
        geometry = LatticeGeometry.chain(exp.n_sites, exp.local_dim)
    terms = []
    for term in exp.terms:
        hamiltonian = term.hamiltonian.to_array() if term.hamiltonian is not None else None
        jumps = tuple(j.to_array() for j in term.jumps)
        terms.append(LindbladTerm(tuple(term.support), hamiltonian, jumps))
    return Lindbladian(geometry, tuple(terms))


def initial_density(exp: EvolveExperiment, geometry: LatticeGeometry) -> DensityMatrix:
    if exp.initial == "maximally_mixed":
        return DensityMatrix.maximally_mixed(geometry)
    if exp.initial == "zero":
        return Ket.basis(geometry, [0] * geometry.n_sites).density()
    if tuple(exp.initial.dims) != tuple(geometry.local_dims):
        raise DimensionError(
            f"Initial state dims {exp.initial.dims} do not match the lattice {geometry.local_dims}"
        )
    return DensityMatrix(geometry, exp.initial.to_array())


def random_lindbladian(rng: np.random.Generator, n_sites: int, scale: float = 0.5) -> Lindbladian:
    """Random two-site coherent and dissipative terms plus a damping-like term on site 0."""
    geometry = LatticeGeometry.chain(n_sites)
    terms = [
        LindbladTerm(
            (j, j + 1),
            random_hermitian(4, rng),
            (scale * random_matrix(4, rng), scale * random_matrix(4, rng)),
        )
        for j in range(n_sites - 1)
    ]
    terms.append(LindbladTerm((0,), None, (scale * random_matrix(2, rng),)))
    return Lindbladian(geometry, tuple(terms))


def _axiom_entry(args: Tuple[int, int, int, float, NumericPolicy]) -> Tuple[float, ...]:
    seed, index, max_sites, t, policy = args
    rng = np.random.default_rng([seed, AXIOMS_STREAM, index])
    n_sites = int(rng.integers(1, max_sites + 1))
    lind = random_lindbladian(rng, n_sites)
    d = lind.dim

    choi = choi_cp_check(lind, t, policy)
    rho = random_density(d, rng)
    sigma = random_density(d, rng)
    a = random_hermitian(d, rng)

    rho_t = evolve(lind, rho, t, policy).matrix
    sigma_t = evolve(lind, sigma, t, policy).matrix
    excess = trace_norm(rho_t - sigma_t) - trace_norm(rho - sigma)

    duality = abs(np.trace(a @ rho_t) - np.trace(heisenberg_evolve(lind, a, t, policy) @ rho))

    twice = evolve(lind, rho_t, t, policy).matrix
    semigroup = float(np.abs(twice - evolve(lind, rho, 2 * t, policy).matrix).max())
    return (index, d, choi.trace_defect, choi.min_eigenvalue, excess, float(duality), semigroup)


class EvolveWorkflow(ExperimentWorkflow):
    """Trajectory and convergence fit for a configured generator."""

    kind = "evolve"

    def compute(self) -> ExperimentResult:
        exp = self.experiment
        result = ExperimentResult(self.kind)

        lind = build_lindbladian(exp)
        rho0 = initial_density(exp, lind.geometry)
        if exp.target is not None:
            target = DensityMatrix(lind.geometry, exp.target.to_array()).matrix
        else:
            target = evolve(lind, rho0, exp.times[-1], self.policy).matrix
        report = fit_convergence(lind, rho0, target, exp.times, self.policy)
        result.tables.append(
            TableOutput(f"{self.prefix}_trajectory.csv", TRAJECTORY_HEADER, report.rows())
        )
        result.summary["final_distance"] = float(report.trace_distances[-1])
        result.summary["rate"] = report.rate
        result.summary["prefactor"] = report.prefactor
        result.summary["monotone"] = report.monotone
        result.checks["trace_preserved"] = bool(
            np.all(np.abs(report.traces - 1.0) <= self.policy.dynamics_atol)
        )
        result.checks["positive"] = bool(np.all(report.min_eigs >= -self.policy.positivity_atol))

        if exp.axioms is not None:
            self._axioms(result)
        return result

    def _axioms(self, result: ExperimentResult) -> None:
        spec = self.experiment.axioms
        jobs = [
            (self.experiment.seed, k, spec.max_sites, spec.t, self.policy)
            for k in range(spec.count)
        ]
        rows = self.sweep(_axiom_entry, jobs)
        result.tables.append(TableOutput(f"{self.prefix}_axioms.csv", AXIOMS_HEADER, rows))
        columns = np.array([row[2:] for row in rows])
        trace_defect, min_eig, excess, duality, semigroup = columns.T
        result.summary["axioms_samples"] = len(rows)
        result.checks["axiom_trace_preservation"] = bool(trace_defect.max() <= 1e-10)
        result.checks["axiom_choi_positivity"] = bool(
            min_eig.min() >= -self.policy.positivity_atol
        )
        result.checks["axiom_contractivity"] = bool(excess.max() <= 1e-10)
        result.checks["axiom_duality"] = bool(duality.max() <= 1e-8)
        result.checks["axiom_semigroup"] = bool(semigroup.max() <= 1e-9)
