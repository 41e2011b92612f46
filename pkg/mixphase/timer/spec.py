"""Timer parameters and occupation distributions."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from mixphase.utils.errors import ValidationError


@dataclass(frozen=True)
class TimerSpec:
    """
    A dissipative timer with ``T`` decay steps at rate ``gamma``.

    Attributes:
        T: Number of decay steps; level T is absorbing
        gamma: Hop rate between consecutive levels
        stages: Intermediate thresholds 0 < T1 < T2 < ... < T; a timer with
            thresholds switches its controlled generator at each of them
    """

    T: int
    gamma: float
    stages: Tuple[int, ...] = ()

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError(f"Timer needs a positive integer T, got {self.T}")
        if not self.gamma > 0:
            raise ValidationError(f"Timer rate must be positive, got {self.gamma}")
        stages = tuple(int(s) for s in self.stages)
        object.__setattr__(self, "stages", stages)
        bounds = (0,) + stages + (self.T,)
        if any(b >= a for a, b in zip(bounds[1:], bounds)):
            raise ValidationError(f"Stage thresholds must satisfy 0 < T1 < ... < T, got {stages}")

    @classmethod
    def from_tau(cls, T: int, tau: float, stages: Sequence[int] = ()) -> "TimerSpec":
        """Timer switching at ``tau``: gamma = T / tau."""
        if not tau > 0:
            raise ValidationError(f"Switching time must be positive, got {tau}")
        return cls(T, T / tau, tuple(stages))

    @classmethod
    def two_stage(cls, T: int, gamma: float) -> "TimerSpec":
        """Timer with a single intermediate threshold T1 = T // 2."""
        return cls(T, gamma, (T // 2,))

    @property
    def tau(self) -> float:
        """Switching time T / gamma."""
        return self.T / self.gamma

    @property
    def T1(self) -> int:
        if not self.stages:
            raise ValidationError("Timer has no intermediate threshold")
        return self.stages[0]

    @property
    def thresholds(self) -> Tuple[int, ...]:
        """All switching levels, the final level T included."""
        return self.stages + (self.T,)

    @property
    def n_stages(self) -> int:
        """Number of active stages (the level-T stage is switched off)."""
        return len(self.thresholds)

    def threshold_time(self, index: int) -> float:
        """Mean time tau_l = T_l / gamma at which threshold ``index`` is crossed."""
        return self.thresholds[index] / self.gamma

    def stage_of_level(self, k: int) -> int:
        """Stage index of register level ``k``: the number of thresholds <= k."""
        return sum(1 for b in self.thresholds if b <= k)

    def stage_levels(self, stage: int) -> range:
        bounds = (0,) + self.thresholds + (self.T + 1,)
        return range(bounds[stage], bounds[stage + 1])


@dataclass(frozen=True)
class TimerDistribution:
    """Occupation probabilities p_k of levels k = 0..T."""

    probs: np.ndarray
    atol: float = 1e-12

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if (probs < -self.atol).any():
            raise ValidationError(f"Negative timer probability {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > self.atol:
            raise ValidationError(f"Timer distribution sums to {probs.sum():.15f}")

    @property
    def T(self) -> int:
        return len(self.probs) - 1

    def mass(self, lo: int, hi: int) -> float:
        """Probability of levels lo..hi inclusive."""
        return float(self.probs[lo : hi + 1].sum())

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)

    def __getitem__(self, k: int) -> float:
        return float(self.probs[k])
