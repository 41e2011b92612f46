"""Stage generators coupled to dissipative timers that switch between them."""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from mixphase.lindblad import LindbladTerm, Lindbladian
from mixphase.qstate.geometry import LatticeGeometry
from mixphase.timer.spec import TimerSpec
from mixphase.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

Attachment = Union[str, Mapping[Tuple[int, ...], int]]

SITE_ATTACHMENT = "site"
SHARED_ATTACHMENT = "shared"


@dataclass(frozen=True)
class ComboGenerator:
    """Dense system generator active while the timers sit in one stage combination."""

    combo: Tuple[int, ...]
    effective: np.ndarray
    effective_dagger: np.ndarray
    jumps: Tuple[Tuple[np.ndarray, np.ndarray], ...]

    def apply(self, block: np.ndarray) -> np.ndarray:
        """Apply to a stack of matrices of shape (..., d, d)."""
        out = self.effective @ block + block @ self.effective_dagger
        for jump, jump_dagger in self.jumps:
            out = out + jump @ block @ jump_dagger
        return out


@dataclass(frozen=True, eq=False)
class SwitchedLindbladian:
    """
    System generators switched by timers: stage ``s`` acts while the timer
    controlling a term sits in stage ``s`` of its levels.

    Attributes:
        geometry: System geometry
        stages: One generator per level group (group ``len(thresholds)`` is
            the absorbed level T), or a single generator active throughout
        timer: Timer parameters shared by all timers
        timer_ids: Labels of the timers that control at least one term
        term_timers: Per stage, the index into ``timer_ids`` of each term
    """

    geometry: LatticeGeometry
    stages: Tuple[Lindbladian, ...]
    timer: TimerSpec
    timer_ids: Tuple[int, ...]
    term_timers: Tuple[Tuple[int, ...], ...]

    @property
    def n_timers(self) -> int:
        return len(self.timer_ids)

    @property
    def n_groups(self) -> int:
        """Level groups per timer: one per threshold plus the absorbed level."""
        return len(self.timer.thresholds) + 1

    @property
    def register_shape(self) -> Tuple[int, ...]:
        return (self.timer.T + 1,) * self.n_timers

    def stage_for_group(self, group: int) -> int:
        return group if len(self.stages) > 1 else 0

    def group_slice(self, group: int) -> slice:
        levels = self.timer.stage_levels(group)
        return slice(levels.start, levels.stop)

    def active_terms(self, combo: Sequence[int]) -> List[LindbladTerm]:
        """Terms switched on when timer ``m`` is in level group ``combo[m]``."""
        active = []
        for s, stage in enumerate(self.stages):
            for term, m in zip(stage.terms, self.term_timers[s]):
                if self.stage_for_group(combo[m]) == s:
                    active.append(term)
        return active

    def combo_lindbladian(self, combo: Sequence[int]) -> Lindbladian:
        return Lindbladian(self.geometry, tuple(self.active_terms(combo)))

    @cached_property
    def combos(self) -> Dict[Tuple[int, ...], ComboGenerator]:
        """Dense generators for every stage combination of the timers."""
        out = {}
        for combo in product(range(self.n_groups), repeat=self.n_timers):
            compiled = self.combo_lindbladian(combo).compiled
            g = compiled.effective.toarray()
            jumps = tuple((j.toarray(), j.toarray().conj().T) for j in compiled.jumps)
            out[combo] = ComboGenerator(combo, g, g.conj().T, jumps)
        logger.debug(f"Prepared {len(out)} stage combinations for {self.n_timers} timers")
        return out

    def stage_norms(self) -> List[float]:
        return [stage.norm_estimate() for stage in self.stages]

    def __repr__(self) -> str:
        return (
            f"SwitchedLindbladian(stages={len(self.stages)}, timers={self.n_timers}, "
            f"T={self.timer.T}, gamma={self.timer.gamma})"
        )


def _timer_label(term: LindbladTerm, attachment: Attachment) -> int:
    if attachment == SITE_ATTACHMENT:
        return min(term.support)
    if attachment == SHARED_ATTACHMENT:
        return 0
    if isinstance(attachment, str):
        raise ValidationError(f"Unknown attachment '{attachment}'")
    key = tuple(term.support)
    for candidate in (key, tuple(sorted(key))):
        if candidate in attachment:
            return int(attachment[candidate])
    raise ValidationError(f"unattached term on support {key}")


def build_switched(
    stages: Sequence[Lindbladian],
    timer: TimerSpec,
    attachment: Attachment = SITE_ATTACHMENT,
) -> SwitchedLindbladian:
    """
    Couple stage generators to timers.

    Args:
        stages: Generators, one per level group (thresholds plus the absorbed
            level), or a single generator
        timer: Timer parameters; thresholds select the stage boundaries
        attachment: ``"site"`` (timer at the smallest site of each term),
            ``"shared"`` (one timer) or a mapping support -> timer label

    Raises:
        ValidationError: On an unattached term or a stage count mismatch
        DimensionError: If the stages live on different geometries
    """
    stages = tuple(stages)
    if not stages:
        raise ValidationError("At least one stage generator is required")
    geometry = stages[0].geometry
    for stage in stages[1:]:
        if stage.geometry.local_dims != geometry.local_dims:
            raise DimensionError("All stages must share the system geometry")
    groups = len(timer.thresholds) + 1
    if len(stages) not in (1, groups):
        raise ValidationError(
            f"{len(stages)} stages do not fit a timer with {groups} level groups"
        )
    labels = [[_timer_label(term, attachment) for term in stage.terms] for stage in stages]
    timer_ids = tuple(sorted({label for row in labels for label in row}))
    index = {label: i for i, label in enumerate(timer_ids)}
    term_timers = tuple(tuple(index[label] for label in row) for row in labels)
    logger.info(f"Switched Lindbladian with {len(stages)} stages and {len(timer_ids)} timers")
    return SwitchedLindbladian(geometry, stages, timer, timer_ids, term_timers)
