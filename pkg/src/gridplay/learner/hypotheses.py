"""Per-class posteriors over dynamic types.

Each object class gets an enumerated hypothesis set over how it moves; the
posterior is updated from the displacement of every instance that was not
involved in a contact this tick.  Motion likelihoods come from the same
proposal distribution the engine samples from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..core.dynamics import proposal_distribution
from ..core.types import (
    DIRECTIONS,
    DynamicType,
    GameState,
    ObjectInstance,
    VgdlType,
)

SPEEDS = (Fraction(1), Fraction(2))
COOLDOWNS = (1, 2, 3)


class ModelInadequacy(Exception):
    """Every hypothesis was ruled out; the space does not contain the truth."""


def enumerate_dynamic_type_space(
    class_id: str,
    other_classes: tuple[str, ...],
    known_dtype: Optional[DynamicType] = None,
    is_wall: bool = False,
) -> tuple[DynamicType, ...]:
    """The hypothesis support for one class, in fixed tie-break order.

    Walls and classes with a priori known dynamics (the avatar and its
    projectile) get singleton supports.  Everything else enumerates the six
    observationally distinguishable types over the speed/cooldown grid, with
    chase/flee targets drawn from the co-present classes.
    """
    if known_dtype is not None:
        return (known_dtype,)
    if is_wall:
        return (DynamicType(VgdlType.IMMOVABLE),)
    support: list[DynamicType] = [
        DynamicType(VgdlType.IMMOVABLE),
        DynamicType(VgdlType.PASSIVE),
    ]
    for orientation in DIRECTIONS:
        for speed in SPEEDS:
            for cooldown in COOLDOWNS:
                support.append(
                    DynamicType(
                        VgdlType.MISSILE, speed=speed, cooldown=cooldown,
                        orientation=orientation,
                    )
                )
    for speed in SPEEDS:
        for cooldown in COOLDOWNS:
            support.append(
                DynamicType(VgdlType.RANDOM_NPC, speed=speed, cooldown=cooldown)
            )
    for vgdl_type in (VgdlType.CHASER, VgdlType.FLEEING):
        for target in other_classes:
            if target == class_id:
                continue
            for speed in SPEEDS:
                for cooldown in COOLDOWNS:
                    support.append(
                        DynamicType(
                            vgdl_type, speed=speed, cooldown=cooldown,
                            target_class=target,
                        )
                    )
    return tuple(support)


def object_step_likelihood(
    prev_obj: ObjectInstance,
    next_pos: tuple[int, int],
    dtype: DynamicType,
    prev_state: GameState,
) -> float:
    """Probability that this type would move the object where it went."""
    dist = proposal_distribution(prev_obj, dtype, prev_state)
    return dist.get(next_pos, 0.0)


@dataclass
class DynamicTypePosterior:
    """Enumerated posterior for one class; uniform prior at construction."""

    class_id: str
    support: tuple[DynamicType, ...]
    log_weights: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.log_weights:
            self.log_weights = [-math.log(len(self.support))] * len(self.support)

    def weights(self) -> list[float]:
        return [math.exp(lw) if lw != -math.inf else 0.0 for lw in self.log_weights]

    def map_dtype(self) -> DynamicType:
        best = max(range(len(self.support)), key=lambda i: (self.log_weights[i], -i))
        return self.support[best]

    def update(
        self,
        instances: list[tuple[ObjectInstance, tuple[int, int]]],
        prev_state: GameState,
    ) -> bool:
        """Fold in one tick of (pre-instance, observed next position) pairs.
        Returns False when every hypothesis got zero likelihood (the posterior
        is then reset to uniform so learning can continue)."""
        if not instances:
            return True
        for i, dtype in enumerate(self.support):
            if self.log_weights[i] == -math.inf:
                continue
            for prev_obj, next_pos in instances:
                lik = object_step_likelihood(prev_obj, next_pos, dtype, prev_state)
                if lik <= 0.0:
                    self.log_weights[i] = -math.inf
                    break
                self.log_weights[i] += math.log(lik)
        total = _logsumexp(self.log_weights)
        if total == -math.inf:
            self.log_weights = [-math.log(len(self.support))] * len(self.support)
            return False
        self.log_weights = [
            lw - total if lw != -math.inf else -math.inf for lw in self.log_weights
        ]
        return True


def _logsumexp(values: list[float]) -> float:
    peak = max(values)
    if peak == -math.inf:
        return -math.inf
    return peak + math.log(sum(math.exp(v - peak) for v in values))
