"""Custom exception classes for mixphase."""

from typing import Optional


class MixphaseError(Exception):
    """Base exception for all mixphase errors."""

    pass


class ConfigError(MixphaseError):
    """Configuration and experiment-schema errors."""

    pass


class ValidationError(MixphaseError):
    """Input validation errors."""

    pass


class DimensionError(ValidationError):
    """Operator, state or site-set dimensions do not fit together."""

    pass


class NumericGuardError(MixphaseError):
    """A numeric guard (size limit, tolerance, integrator health) was breached.

    Attributes:
        guard: Name of the breached guard, e.g. ``superoperator_dim_limit``
    """

    def __init__(self, guard: str, message: str):
        super().__init__(f"{message} [guard: {guard}]")
        self.guard = guard


class GapCollapseError(NumericGuardError):
    """Spectral gap of a Hamiltonian path fell below tolerance."""

    def __init__(self, s: float, gap: float, tolerance: float, message: Optional[str] = None):
        super().__init__(
            "gap_tolerance",
            message or f"Spectral gap {gap:.3e} below {tolerance:.1e} at s={s:.6f}",
        )
        self.s = s
        self.gap = gap
