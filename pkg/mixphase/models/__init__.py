"""Concrete phases: product drivers, GHZ condensation, Z_n quantum doubles and SPT chains."""

from mixphase.models.double import (
    GenerationReport,
    QuantumDouble,
    basis_generation_check,
    build_quantum_double,
)
from mixphase.models.drivers import (
    ProductDriver,
    SiteChannel,
    condensation_channel,
    covariance_check,
    distance_bound,
    ghz_condense_channel,
    product_driver,
    replacement_channel,
    symmetry_defect,
)
from mixphase.models.ghz import GHZFamily
from mixphase.models.spt import (
    REPRESENTATIONS,
    BridgeReport,
    IsometricMPS,
    ProjectiveRep,
    bridge_evolution,
    build_rep,
    pauli_rep,
    psi_plus,
    spt_bridge_states,
    trivial_rep,
)

__all__ = [
    "BridgeReport",
    "GHZFamily",
    "GenerationReport",
    "IsometricMPS",
    "ProductDriver",
    "ProjectiveRep",
    "QuantumDouble",
    "REPRESENTATIONS",
    "SiteChannel",
    "basis_generation_check",
    "bridge_evolution",
    "build_quantum_double",
    "build_rep",
    "condensation_channel",
    "covariance_check",
    "distance_bound",
    "ghz_condense_channel",
    "pauli_rep",
    "product_driver",
    "psi_plus",
    "replacement_channel",
    "spt_bridge_states",
    "symmetry_defect",
    "trivial_rep",
]
