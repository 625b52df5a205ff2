"""The trace likelihood, factorized per tick into goal, interaction, and
object terms.

goal term      : indicator that the model's termination rules predict the
                 observed Win/Loss/Continue status
interaction    : 1 - eps when every observed event is explained and every
                 implied event occurred, eps otherwise
object term    : product of per-object motion probabilities for objects not
                 involved in any contact
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..core.engine import evaluate_termination
from ..core.types import Action, GameDescription, GameState, Predicate
from .hypotheses import object_step_likelihood
from .rules import explain_event, implications

DEFAULT_EVENT_NOISE = 0.01


@dataclass(frozen=True)
class Observation:
    prev: GameState
    action: Action
    next: GameState


def contact_ids(state: GameState) -> set[int]:
    """Ids of every object involved in a contact this tick."""
    ids: set[int] = set()
    for c in state.contacts:
        ids.add(c.id_a)
        if c.id_b is not None:
            ids.add(c.id_b)
    return ids


def goal_factor(obs: Observation, desc: GameDescription) -> float:
    predicted, _ = evaluate_termination(obs.next, desc.termination_set)
    return 1.0 if predicted is obs.next.status else 0.0


def interaction_likelihood_step(
    events,
    rules,
    resources: dict[str, int],
    eps: float = DEFAULT_EVENT_NOISE,
) -> float:
    """1 - eps iff every event is explained and all implications occurred."""
    observed_keys = {e.event_key() for e in events}
    for e in events:
        if not explain_event(e, rules, resources):
            return eps
        if not implications(e, rules, resources) <= observed_keys:
            return eps
    return 1.0 - eps


def interaction_factor(obs: Observation, desc: GameDescription, eps: float) -> float:
    return interaction_likelihood_step(
        obs.next.events, desc.interaction_set, obs.prev.agent_state.resources, eps
    )


def object_factor(obs: Observation, desc: GameDescription) -> float:
    """Motion likelihood of every freely moving object under the model.

    Objects in a contact are excluded (their tick is governed by the rules),
    and an undoAll tick excludes everything because every object was moved
    back regardless of its own dynamics.
    """
    if any(e.predicate is Predicate.UNDO_ALL for e in obs.next.events):
        return 1.0
    excluded = contact_ids(obs.next)
    prob = 1.0
    for oid, prev_obj in obs.prev.objects.items():
        if oid in excluded:
            continue
        next_obj = obs.next.objects.get(oid)
        if next_obj is None:
            continue
        dtype = desc.classes.get(prev_obj.class_id)
        if dtype is None:
            continue
        if dtype.is_avatar:
            lik = _avatar_likelihood(prev_obj, next_obj.pos, dtype, obs)
        else:
            lik = object_step_likelihood(prev_obj, next_obj.pos, dtype, obs.prev)
        prob *= lik
        if prob == 0.0:
            return 0.0
    return prob


def _avatar_likelihood(prev_obj, next_pos, dtype, obs: Observation) -> float:
    from ..core.dynamics import proposal_distribution

    dist = proposal_distribution(prev_obj, dtype, obs.prev, obs.action)
    return dist.get(next_pos, 0.0)


def tick_log_likelihood(obs: Observation, desc: GameDescription, eps: float) -> float:
    factor = (
        goal_factor(obs, desc)
        * interaction_factor(obs, desc, eps)
        * object_factor(obs, desc)
    )
    return math.log(factor) if factor > 0.0 else -math.inf


def trace_log_likelihood(
    trace: list[Observation], desc: GameDescription, eps: float = DEFAULT_EVENT_NOISE
) -> float:
    total = 0.0
    for obs in trace:
        total += tick_log_likelihood(obs, desc, eps)
        if total == -math.inf:
            return total
    return total
