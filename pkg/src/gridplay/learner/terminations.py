"""Termination-candidate filtering.

The learnable termination space is "count of class X reaches zero" for each
outcome.  A superset of candidates consistent with every observed tick is
kept: candidates whose condition held on a Continue tick are dropped, and a
terminal tick intersects the matching side with the classes actually at zero
(and drops them from the opposite side).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core.types import (
    GameState,
    Outcome,
    Status,
    TerminationKind,
    TerminationRule,
)


@dataclass
class TerminationCandidates:
    win: set[str] = field(default_factory=set)
    loss: set[str] = field(default_factory=set)
    initialized: bool = False
    inadequacies: list[str] = field(default_factory=list)

    def initialize(self, classes: set[str]) -> None:
        if not self.initialized:
            self.win = set(classes)
            self.loss = set(classes)
            self.initialized = True

    def update(self, next_state: GameState, known_classes: set[str]) -> None:
        counts = next_state.class_counts()
        at_zero = {c for c in (self.win | self.loss) if counts.get(c, 0) == 0}
        if next_state.status is Status.CONTINUE:
            self.win -= at_zero
            self.loss -= at_zero
            return
        zero_now = {c for c in known_classes if counts.get(c, 0) == 0}
        if next_state.status is Status.WIN:
            self.win &= zero_now
            self.loss -= zero_now
            if not self.win:
                self.inadequacies.append(
                    f"win at tick {next_state.tick} matches no count-zero candidate"
                )
        else:
            self.loss &= zero_now
            self.win -= zero_now
            if not self.loss:
                self.inadequacies.append(
                    f"loss at tick {next_state.tick} matches no count-zero candidate"
                )

    def rules(self) -> list[TerminationRule]:
        """Loss candidates first: a simulated tick satisfying both reads as a
        loss, which keeps the planner cautious."""
        out = [
            TerminationRule(TerminationKind.COUNT_REACHES, Outcome.LOSS, c, 0)
            for c in sorted(self.loss)
        ]
        out += [
            TerminationRule(TerminationKind.COUNT_REACHES, Outcome.WIN, c, 0)
            for c in sorted(self.win)
        ]
        return out
