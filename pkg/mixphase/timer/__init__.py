"""Dissipative timers: exact chain statistics, switching bounds and the qubit gadget."""

from mixphase.timer.bounds import (
    BOUNDS_HEADER,
    SwitchBounds,
    flip_exponent,
    joint_all_low_prob,
    log_joint_all_low_prob,
    switch_bounds,
)
from mixphase.timer.chain import (
    band_mass,
    birth_chain_dist,
    chain_dist_expm,
    chain_dist_ode,
    chain_generator,
    default_epsilon,
    log_band_mass,
    log_level_probs,
    stage_masses,
    two_stage_band_masses,
)
from mixphase.timer.gadget import (
    GadgetDistribution,
    accessible_indices,
    phi_index,
    quantum_timer_dist,
    timer_lindbladian,
)
from mixphase.timer.spec import TimerDistribution, TimerSpec

__all__ = [
    "BOUNDS_HEADER",
    "GadgetDistribution",
    "SwitchBounds",
    "TimerDistribution",
    "TimerSpec",
    "accessible_indices",
    "band_mass",
    "birth_chain_dist",
    "chain_dist_expm",
    "chain_dist_ode",
    "chain_generator",
    "default_epsilon",
    "flip_exponent",
    "joint_all_low_prob",
    "log_band_mass",
    "log_joint_all_low_prob",
    "log_level_probs",
    "phi_index",
    "quantum_timer_dist",
    "stage_masses",
    "switch_bounds",
    "timer_lindbladian",
    "two_stage_band_masses",
]
