"""Intrinsic reward over imagined states.

V(s) is a win/loss sentinel or the sum of two shaped terms derived from the
model's count-zero termination goals: a count-progress term that rises as a
win class shrinks (and falls as a loss class shrinks), and a proximity term
between each goal class and the classes able to remove it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..core.dynamics import manhattan
from ..core.types import (
    Comparator,
    GameDescription,
    GameState,
    Outcome,
    Predicate,
    Status,
    TerminationKind,
    VgdlType,
)

WIN_VALUE = math.inf
LOSS_VALUE = -math.inf

REMOVAL_PREDICATES = (
    Predicate.DESTROY,
    Predicate.COLLECT_RESOURCE,
    Predicate.TRANSFORM,
)


@dataclass(frozen=True)
class RewardConfig:
    count_weight: float = 100.0  # relative scale of count progress vs proximity
    use_count_progress: bool = True
    use_proximity: bool = True


def destroyer_classes(model: GameDescription, class_id: str) -> set[str]:
    """Classes whose contact can remove ``class_id`` from the board."""
    return {
        r.other_class
        for r in model.interaction_set
        if r.affected_class == class_id and r.predicate in REMOVAL_PREDICATES
    }


def count_progress_reward(state: GameState, model: GameDescription,
                          weight: float = 100.0) -> float:
    counts = state.class_counts()
    total = 0.0
    for g in model.termination_set:
        if g.kind is not TerminationKind.COUNT_REACHES:
            continue
        n = counts.get(g.class_id, 0)
        if n == 0:
            continue  # the goal term itself takes over at zero
        sign = -1.0 if g.outcome is Outcome.WIN else 1.0
        total += weight * sign * (g.target_count - n) / (n * n)
    return total


def resource_granting_classes(model: GameDescription, resource: str) -> set[str]:
    out = set()
    for r in model.interaction_set:
        if r.predicate is not Predicate.COLLECT_RESOURCE or r.delta <= 0:
            continue
        name = r.resource or r.affected_class
        if name == resource:
            out.add(r.affected_class)
    return out


def _gradient_sources(
    model: GameDescription, goal_class: str,
    resources: Optional[dict[str, int]] = None,
) -> set[str]:
    """Destroyers of the goal class, with two pieces of model analysis: a
    destroyer rule gated on a precondition the inventory does not meet points
    at the class granting the missing resource instead (the key, not the
    door), and avatar-emitted short-lived destroyers are replaced by the
    avatar itself (the sword is wherever its wielder is)."""
    sources: set[str] = set()
    for r in model.interaction_set:
        if r.affected_class != goal_class or r.predicate not in REMOVAL_PREDICATES:
            continue
        pre = r.precondition
        if resources is not None and pre is not None and not pre.holds(resources):
            if pre.comparator is Comparator.AT_LEAST:
                sources |= resource_granting_classes(model, pre.resource)
                continue
            # a less-than gate the inventory exceeds cannot be undone by
            # collecting more; no useful pull
            continue
        sources.add(r.other_class)
    avatar_dtype = model.classes.get(model.avatar_class)
    if avatar_dtype is None or not avatar_dtype.projectile_class:
        return sources
    proj = avatar_dtype.projectile_class
    proj_dtype = model.classes.get(proj)
    if proj in sources and proj_dtype is not None and proj_dtype.vgdl_type is VgdlType.FLICKER:
        sources = (sources - {proj}) | {model.avatar_class}
    return sources


def positions_by_class(state: GameState) -> dict[str, list]:
    positions: dict[str, list] = {}
    for obj in state.objects.values():
        positions.setdefault(obj.class_id, []).append(obj.pos)
    return positions


def producer_pairs(model: GameDescription, class_id: str) -> list[tuple[str, str]]:
    """Class pairs whose contact creates an instance of ``class_id``."""
    return sorted({
        (r.affected_class, r.other_class)
        for r in model.interaction_set
        if r.predicate is Predicate.TRANSFORM and r.transform_into == class_id
    })


def production_pull(
    model: GameDescription,
    positions: dict[str, list],
    class_id: str,
    visited: set[str] | None = None,
) -> tuple[str, str] | None:
    """A pair of present classes whose contact advances toward making an
    instance of the (currently absent) ``class_id`` exist, walking transform
    chains: no fire on the board, but a box and the purple potion that turns
    into fire are."""
    if visited is None:
        visited = set()
    if class_id in visited:
        return None
    visited.add(class_id)
    for a, b in producer_pairs(model, class_id):
        a_here = bool(positions.get(a))
        b_here = bool(positions.get(b))
        if a_here and b_here:
            return (a, b)
        if a_here and not b_here:
            found = production_pull(model, positions, b, visited)
            if found:
                return found
        elif b_here and not a_here:
            found = production_pull(model, positions, a, visited)
            if found:
                return found
    return None


def production_chain_classes(model: GameDescription) -> set[str]:
    """Classes that can be brought into existence by some transform rule and
    that destroy (directly or through further transforms) a win-goal class."""
    win_classes = {
        g.class_id
        for g in model.termination_set
        if g.kind is TerminationKind.COUNT_REACHES and g.outcome is Outcome.WIN
    }
    wanted: set[str] = set()
    frontier = set()
    for c in win_classes:
        frontier |= destroyer_classes(model, c)
    producible = {
        r.transform_into for r in model.interaction_set
        if r.predicate is Predicate.TRANSFORM and r.transform_into
    }
    seen: set[str] = set()
    while frontier:
        cls = frontier.pop()
        if cls in seen:
            continue
        seen.add(cls)
        if cls in producible:
            wanted.add(cls)
            for a, b in producer_pairs(model, cls):
                frontier.add(a)
                frontier.add(b)
    return wanted


def proximity_reward(
    state: GameState, model: GameDescription,
    positions: dict[str, list] | None = None,
) -> float:
    if positions is None:
        positions = positions_by_class(state)
    total = 0.0
    for g in model.termination_set:
        if g.kind is not TerminationKind.COUNT_REACHES:
            continue
        targets = positions.get(g.class_id, [])
        if not targets:
            continue
        sources = _gradient_sources(model, g.class_id, state.agent_state.resources)
        source_positions = []
        for src in sources:
            source_positions.extend(positions.get(src, []))
        sign = -1.0 if g.outcome is Outcome.WIN else 1.0
        if source_positions:
            d_min = min(
                manhattan(a, b) for a in source_positions for b in targets
            )
            total += sign * d_min / (len(targets) ** 2)
            continue
        if g.outcome is not Outcome.WIN:
            continue
        # every destroyer is absent: pull together a pair that produces one
        for src in sorted(sources):
            pair = production_pull(model, positions, src)
            if pair is None:
                continue
            pa, pb = positions.get(pair[0]), positions.get(pair[1])
            d_min = min(manhattan(a, b) for a in pa for b in pb)
            total += sign * d_min / (len(targets) ** 2)
            break
    return total


def intrinsic_value(
    state: GameState,
    model: GameDescription,
    config: RewardConfig = RewardConfig(),
    positions: dict[str, list] | None = None,
) -> float:
    if state.status is Status.WIN:
        return WIN_VALUE
    if state.status is Status.LOSS:
        return LOSS_VALUE
    value = 0.0
    if config.use_count_progress:
        value += count_progress_reward(state, model, config.count_weight)
    if config.use_proximity:
        value += proximity_reward(state, model, positions)
    return value


def exploration_gradient(
    state: GameState,
    model: GameDescription,
    contact_keys: set[tuple[str, str]],
    zero_targets: set[str],
    positions: dict[str, list] | None = None,
) -> float:
    """Distance shaping toward exploratory goals: pending pair contacts pull
    their nearest instances together (normalized by how many ways the contact
    could happen), and count-zero probes reuse the destroyer gradient."""
    if positions is None:
        positions = positions_by_class(state)
    avatar_dtype = model.classes.get(model.avatar_class)
    projectile = avatar_dtype.projectile_class if avatar_dtype else None
    avatar_side = {model.avatar_class, projectile}
    total = 0.0
    for a, b in contact_keys:
        # only contacts the agent can directly steer get a gradient; pairs
        # of other objects are observed as play unfolds
        if a not in avatar_side and b not in avatar_side:
            continue
        if a in avatar_side:
            pa = positions.get(model.avatar_class)
            pb = positions.get(b) if b not in avatar_side else pa
        else:
            pa = positions.get(a)
            pb = positions.get(model.avatar_class)
        if not pa or not pb:
            continue
        d = min(manhattan(p, q) for p in pa for q in pb)
        total -= d / (len(pa) * len(pb))
    for c in zero_targets:
        targets = positions.get(c)
        if not targets:
            continue
        source_positions = []
        for src in _gradient_sources(model, c, state.agent_state.resources):
            source_positions.extend(positions.get(src, []))
        if not source_positions:
            continue
        d = min(manhattan(p, q) for p in source_positions for q in targets)
        total -= d / (len(targets) ** 2)
    return total


def dangerous_classes(model: GameDescription) -> set[str]:
    """Classes the model says can end the game: they remove the avatar
    directly, or remove any class whose count-zero is a loss candidate."""
    out: set[str] = set()
    for r in model.interaction_set:
        if r.affected_class == model.avatar_class and r.predicate in (
            Predicate.DESTROY, Predicate.TRANSFORM,
        ):
            out.add(r.other_class)
    for g in model.termination_set:
        if g.kind is TerminationKind.COUNT_REACHES and g.outcome is Outcome.LOSS:
            out |= destroyer_classes(model, g.class_id)
    out.discard(model.avatar_class)
    return out


def resource_milestones(model: GameDescription) -> list[tuple[str, int]]:
    """(resource, target-count) milestones worth treating as subgoals:
    holding one unit of anything a precondition mentions, and holding a full
    load where a capacity is known."""
    resources = {
        r.precondition.resource
        for r in model.interaction_set
        if r.precondition is not None
    }
    milestones = [(res, 1) for res in sorted(resources)]
    for res in sorted(resources):
        cap = model.resource_capacities.get(res)
        if cap is not None and cap > 1:
            milestones.append((res, cap))
    return milestones
