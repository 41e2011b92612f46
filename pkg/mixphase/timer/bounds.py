"""Switch-flip probabilities around the switching time and their large-T exponents."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.stats import poisson

from mixphase.timer.chain import log_band_mass
from mixphase.timer.spec import TimerSpec
from mixphase.utils.errors import ValidationError

logger = logging.getLogger(__name__)

BOUNDS_HEADER = ("T", "eps", "p_early", "p_late", "exponent")


def flip_exponent(T: int, x: float) -> float:
    """-T (x - log x - 1): the large-deviation exponent at t = x * tau."""
    return float(-T * (x - np.log(x) - 1.0))


@dataclass(frozen=True)
class SwitchBounds:
    """
    Probability that the switch has flipped too early or not yet flipped.

    Attributes:
        T: Timer length
        eps: Window width; the switch should flip inside [tau - eps/2, tau + eps/2]
        log_p_early: log P(level T reached by tau - eps/2)
        log_p_late: log P(level T not reached by tau + eps/2)
        exponent_early: Large-T exponent at x = 1 - eps/(2 tau)
        exponent_late: Large-T exponent at x = 1 + eps/(2 tau)
    """

    T: int
    eps: float
    log_p_early: float
    log_p_late: float
    exponent_early: float
    exponent_late: float

    @property
    def p_early(self) -> float:
        return float(np.exp(self.log_p_early))

    @property
    def p_late(self) -> float:
        return float(np.exp(self.log_p_late))

    @property
    def ratio_early(self) -> float:
        """log p_early divided by the exponent (tends to a constant as T grows)."""
        return self.log_p_early / self.exponent_early

    @property
    def ratio_late(self) -> float:
        return self.log_p_late / self.exponent_late

    def row(self) -> Tuple[float, ...]:
        return (self.T, self.eps, self.p_early, self.p_late, self.exponent_early)


def switch_bounds(spec: TimerSpec, epsilon: float) -> SwitchBounds:
    """
    Exact early/late flip probabilities and the matching exponents.

    Raises:
        ValidationError: Unless 0 < epsilon < tau
    """
    tau = spec.tau
    if not 0 < epsilon < tau:
        raise ValidationError(f"epsilon must lie in (0, tau={tau}), got {epsilon}")
    t_early = tau - epsilon / 2
    t_late = tau + epsilon / 2
    log_early = float(poisson.logsf(spec.T - 1, spec.gamma * t_early))
    log_late = float(poisson.logcdf(spec.T - 1, spec.gamma * t_late))
    bounds = SwitchBounds(
        T=spec.T,
        eps=epsilon,
        log_p_early=log_early,
        log_p_late=log_late,
        exponent_early=flip_exponent(spec.T, t_early / tau),
        exponent_late=flip_exponent(spec.T, t_late / tau),
    )
    logger.debug(
        f"Switch bounds T={spec.T} eps={epsilon:.4g}: early {bounds.p_early:.3e}, "
        f"late {bounds.p_late:.3e}"
    )
    return bounds


def log_joint_all_low_prob(
    n_timers: int, spec: TimerSpec, t: float, band: Tuple[int, int]
) -> float:
    """N * log(band mass) for N independent identical timers."""
    if n_timers < 1:
        raise ValidationError(f"Need at least one timer, got {n_timers}")
    return n_timers * log_band_mass(spec, t, band)


def joint_all_low_prob(n_timers: int, spec: TimerSpec, t: float, band: Tuple[int, int]) -> float:
    """Probability that all ``n_timers`` timers sit inside ``band`` at time ``t``."""
    return float(np.exp(log_joint_all_low_prob(n_timers, spec, t, band)))
