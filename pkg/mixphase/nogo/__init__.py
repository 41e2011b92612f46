"""Fattened logical operators and the overlap witnesses of the no-go argument."""

from mixphase.nogo.fattening import (
    FattenedOperator,
    LightConeProbe,
    fatten,
    fattening_errors,
    fattening_region,
    lr_probe,
    restriction_duality_residual,
    schwarz_gap,
)
from mixphase.nogo.overlap import (
    NOGO_HEADER,
    FatteningCache,
    OverlapReport,
    depolarizing_lindbladian,
    dual_residual,
    ghz_nogo_probe,
    overlap_probe,
    rate_ladder,
    write_overlap_csv,
)

__all__ = [
    "NOGO_HEADER",
    "FattenedOperator",
    "FatteningCache",
    "LightConeProbe",
    "OverlapReport",
    "depolarizing_lindbladian",
    "dual_residual",
    "fatten",
    "fattening_errors",
    "fattening_region",
    "ghz_nogo_probe",
    "lr_probe",
    "overlap_probe",
    "rate_ladder",
    "restriction_duality_residual",
    "schwarz_gap",
    "write_overlap_csv",
]
