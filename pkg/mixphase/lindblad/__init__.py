"""Lindbladians, their evolution in both pictures and channel diagnostics."""

from mixphase.lindblad.diagnostics import (
    TRAJECTORY_HEADER,
    ChoiReport,
    ConvergenceReport,
    choi_cp_check,
    exponential_fit,
    fit_convergence,
    write_trajectory_csv,
)
from mixphase.lindblad.evolution import (
    Trajectory,
    channel_matrix,
    evolve,
    evolve_expm,
    evolve_integrate,
    evolve_trajectory,
    heisenberg_evolve,
    heisenberg_trajectory,
    unvec,
    vec,
)
from mixphase.lindblad.superop import Lindbladian
from mixphase.lindblad.terms import LindbladTerm

__all__ = [
    "TRAJECTORY_HEADER",
    "ChoiReport",
    "ConvergenceReport",
    "LindbladTerm",
    "Lindbladian",
    "Trajectory",
    "channel_matrix",
    "choi_cp_check",
    "evolve",
    "evolve_expm",
    "evolve_integrate",
    "evolve_trajectory",
    "exponential_fit",
    "fit_convergence",
    "heisenberg_evolve",
    "heisenberg_trajectory",
    "unvec",
    "vec",
    "write_trajectory_csv",
]
