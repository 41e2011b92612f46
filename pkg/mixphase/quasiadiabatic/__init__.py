"""Gapped paths, quasi-adiabatic generators, quasi-locality and patch circuits."""

from mixphase.quasiadiabatic.generator import (
    QA_HEADER,
    FilterSpec,
    GeneratorMode,
    QAGenerator,
    TransportReport,
    exact_qa_generator,
    filter_time_domain,
    filter_transform,
    filtered_qa_generator,
    intertwining_residual,
    transport_report,
    transport_state,
    trapezoid_transport,
)
from mixphase.quasiadiabatic.locality import (
    DELTA_HEADER,
    DeltaDecomposition,
    QuasiLocalityProfile,
    decay_family,
    delta_decomposition,
    hamiltonian_light_cone,
    i_lambda,
    locality_profile,
    quasi_local_terms,
    reconstruction_residual,
    u_mu,
)
from mixphase.quasiadiabatic.patch import (
    PATCH_HEADER,
    CircuitReport,
    PatchLadder,
    PatchSplit,
    block_patches,
    circuit_from_path,
    circuit_ladder,
    patch_ladder,
    patch_sites,
    patch_split,
    ring_blocks,
    split_transport,
)
from mixphase.quasiadiabatic.path import (
    PATHS,
    HamiltonianPath,
    Spectrum,
    build_path,
    constant_path,
    paramagnetic_ring_path,
    single_qubit_path,
    uncoupled_path,
)

__all__ = [
    "DELTA_HEADER",
    "PATCH_HEADER",
    "PATHS",
    "QA_HEADER",
    "CircuitReport",
    "DeltaDecomposition",
    "FilterSpec",
    "GeneratorMode",
    "HamiltonianPath",
    "PatchLadder",
    "PatchSplit",
    "QAGenerator",
    "QuasiLocalityProfile",
    "Spectrum",
    "TransportReport",
    "block_patches",
    "build_path",
    "circuit_from_path",
    "circuit_ladder",
    "constant_path",
    "decay_family",
    "delta_decomposition",
    "exact_qa_generator",
    "filter_time_domain",
    "filter_transform",
    "filtered_qa_generator",
    "hamiltonian_light_cone",
    "i_lambda",
    "intertwining_residual",
    "locality_profile",
    "paramagnetic_ring_path",
    "patch_ladder",
    "patch_sites",
    "patch_split",
    "quasi_local_terms",
    "reconstruction_residual",
    "ring_blocks",
    "single_qubit_path",
    "split_transport",
    "transport_report",
    "transport_state",
    "trapezoid_transport",
    "u_mu",
    "uncoupled_path",
]
