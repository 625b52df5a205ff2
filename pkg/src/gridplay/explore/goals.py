"""Theory-based exploratory goals.

Two kinds: make an unobserved class pair touch, and drive a reducible class's
count to zero to reveal its termination consequence.  Both are derived fresh
from the learner state, so retirement (pair observed, zero-count consequence
seen) and reinstatement (avatar pairs after an inventory change) fall out of
the derivation rather than being tracked imperatively.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..core.types import GameDescription, GameState, Predicate
from ..learner.learner import GameModelLearner
from ..learner.rules import RuleSetMAP, pair_key

REDUCING_PREDICATES = (
    Predicate.DESTROY,
    Predicate.COLLECT_RESOURCE,
    Predicate.TRANSFORM,
)


@dataclass(frozen=True)
class ContactGoal:
    """Unordered pair of classes whose interaction is unobserved."""

    class_a: str
    class_b: str

    def key(self) -> tuple[str, str]:
        return pair_key(self.class_a, self.class_b)


@dataclass(frozen=True)
class CountZeroGoal:
    class_id: str


ExplorationGoal = Union[ContactGoal, CountZeroGoal]


def pending_contact_goals(
    model: GameDescription,
    rule_state: RuleSetMAP,
    state: GameState,
) -> set[ContactGoal]:
    """One goal per class pair reachable on this board whose collision outcome
    is unobserved under the current inventory signature (for avatar pairs).

    The avatar's emitted projectile counts as present even when no instance
    is on the board: it can be produced at will.
    """
    counts = state.class_counts()
    classes = set(counts)
    avatar_dtype = model.classes.get(model.avatar_class)
    if avatar_dtype is not None and avatar_dtype.projectile_class:
        classes.add(avatar_dtype.projectile_class)
    signature = state.agent_state.signature()
    goals: set[ContactGoal] = set()
    ordered = sorted(classes)
    for i, a in enumerate(ordered):
        for b in ordered[i:]:
            if a == b and counts.get(a, 0) < 2:
                continue
            key = pair_key(a, b)
            if rule_state.observed(key, signature):
                continue
            goals.add(ContactGoal(*key))
    return goals


def on_agent_state_changed(
    goals: set[ContactGoal],
    avatar_class: str,
    board_classes: set[str],
) -> set[ContactGoal]:
    """Reinstate every avatar pair; non-avatar pairs are untouched."""
    out = set(goals)
    for c in sorted(board_classes):
        if c == avatar_class:
            continue
        out.add(ContactGoal(*pair_key(avatar_class, c)))
    return out


def count_zero_goals(
    model: GameDescription,
    zero_observed: set[str],
    state: GameState,
) -> set[CountZeroGoal]:
    """Classes the model says can be removed from the board and whose
    count-zero consequence has never been observed."""
    reducible = {
        r.affected_class
        for r in model.interaction_set
        if r.predicate in REDUCING_PREDICATES
    }
    counts = state.class_counts()
    return {
        CountZeroGoal(c)
        for c in reducible
        if counts.get(c, 0) > 0 and c not in zero_observed
    }


class ExplorationTracker:
    """Derives the current goal set from a learner; disabled under the
    stochastic-exploration ablation (the planner then sees no goals)."""

    def __init__(self, learner: GameModelLearner, enabled: bool = True):
        self.learner = learner
        self.enabled = enabled
        self.zero_observed: set[str] = set()

    def note_state(self, state: GameState) -> None:
        counts = state.class_counts()
        for c in self.learner.known_classes:
            if counts.get(c, 0) == 0:
                self.zero_observed.add(c)

    def goals(self, model: GameDescription, state: GameState) -> set[ExplorationGoal]:
        if not self.enabled:
            return set()
        out: set[ExplorationGoal] = set(
            pending_contact_goals(model, self.learner.rule_set, state)
        )
        out |= count_zero_goals(model, self.zero_observed, state)
        return out
