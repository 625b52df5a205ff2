"""Maximum a posteriori interaction-rule set.

Interactions are deterministic, so one observed collision pins a pair's rules.
When a later collision contradicts the current rules, the history for the pair
is re-split by the smallest resource threshold that separates the outcomes,
yielding a precondition-gated rule pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core.types import (
    EOS,
    AgentState,
    Comparator,
    EventRecord,
    InteractionRule,
    Precondition,
    Predicate,
)

Signature = tuple[tuple[str, int], ...]
PairKey = tuple[str, str]

# fingerprint: everything needed to rebuild the rule that fired
Fingerprint = tuple


def _fingerprint(e: EventRecord) -> Fingerprint:
    return (
        e.affected_class, e.other_class, e.predicate,
        e.resource, e.delta, e.limit, e.score_delta,
        e.transform_into, e.teleport_exit,
    )


def _rule_from_fingerprint(fp: Fingerprint, precondition: Optional[Precondition]) -> InteractionRule:
    affected, other, predicate, resource, delta, limit, score_delta, into, exit_ = fp
    return InteractionRule(
        affected_class=affected,
        other_class=other,
        predicate=predicate,
        precondition=precondition,
        resource=resource,
        delta=delta,
        limit=limit,
        score_delta=score_delta,
        transform_into=into,
        teleport_exit=exit_,
    )


def pair_key(class_a: str, class_b: str) -> PairKey:
    return (class_a, class_b) if class_a <= class_b else (class_b, class_a)


@dataclass(frozen=True)
class PairOutcome:
    signature: Signature
    events: frozenset[Fingerprint]


@dataclass
class RuleSetMAP:
    """MAP rule hypothesis plus the pair-observation history behind it."""

    avatar_class: str
    rules_by_pair: dict[PairKey, list[InteractionRule]] = field(default_factory=dict)
    history: dict[PairKey, list[PairOutcome]] = field(default_factory=dict)
    inadequacies: list[str] = field(default_factory=list)

    def rules(self) -> list[InteractionRule]:
        """Stable flat view: pairs in sorted order; inside a pair, rules that
        remove their affected object run last so every learned event can fire
        again in simulation."""
        out: list[InteractionRule] = []
        for key in sorted(self.rules_by_pair):
            out.extend(self.rules_by_pair[key])
        return out

    def involves_avatar(self, key: PairKey) -> bool:
        return self.avatar_class in key

    def observed(self, key: PairKey, signature: Signature) -> bool:
        """Has this pair's outcome been seen (under this inventory signature,
        for pairs involving the avatar)?"""
        outcomes = self.history.get(key)
        if not outcomes:
            return False
        if not self.involves_avatar(key):
            return True
        return any(o.signature == signature for o in outcomes)

    def predicted_events(self, key: PairKey, resources: dict[str, int]) -> set[Fingerprint]:
        return {
            _fingerprint_of_rule(r)
            for r in self.rules_by_pair.get(key, [])
            if r.precondition is None or r.precondition.holds(resources)
        }

    def record(
        self,
        key: PairKey,
        signature: Signature,
        events: frozenset[Fingerprint],
    ) -> None:
        """Fold in one class-pair contact outcome, repairing rules when the
        outcome contradicts the current hypothesis."""
        resources = dict(signature)
        outcomes = self.history.setdefault(key, [])
        if self.predicted_events(key, resources) == events and outcomes:
            if not any(o.signature == signature and o.events == events for o in outcomes):
                outcomes.append(PairOutcome(signature, events))
            return
        outcome = PairOutcome(signature, events)
        if not any(o.signature == signature and o.events == events for o in outcomes):
            outcomes.append(outcome)
        self._rebuild(key)

    def _rebuild(self, key: PairKey) -> None:
        outcomes = self.history[key]
        distinct = sorted({o.events for o in outcomes}, key=sorted)
        if len(distinct) == 1:
            self.rules_by_pair[key] = _order_rules(
                [_rule_from_fingerprint(fp, None) for fp in distinct[0]]
            )
            return
        if len(distinct) > 2:
            self.inadequacies.append(
                f"pair {key}: {len(distinct)} distinct outcomes, only two-way "
                "preconditions are expressible"
            )
            return
        split = self._find_split(outcomes, distinct)
        if split is None:
            self.inadequacies.append(
                f"pair {key}: no resource threshold separates the outcomes"
            )
            return
        resource, threshold, low_events, high_events = split
        rules = [
            _rule_from_fingerprint(
                fp, Precondition(resource, Comparator.LESS_THAN, threshold)
            )
            for fp in sorted(low_events)
        ] + [
            _rule_from_fingerprint(
                fp, Precondition(resource, Comparator.AT_LEAST, threshold)
            )
            for fp in sorted(high_events)
        ]
        self.rules_by_pair[key] = _order_rules(rules)

    def _find_split(self, outcomes, distinct):
        """Smallest (resource, threshold) whose at-least/less-than split puts
        each observed outcome in a consistent bucket."""
        resources = sorted({r for o in outcomes for r, _ in o.signature})
        counts_of = lambda o: dict(o.signature)
        for resource in resources:
            observed_counts = sorted(
                {counts_of(o).get(resource, 0) for o in outcomes}
            )
            for threshold in [c for c in observed_counts if c > 0]:
                low = {o.events for o in outcomes if counts_of(o).get(resource, 0) < threshold}
                high = {o.events for o in outcomes if counts_of(o).get(resource, 0) >= threshold}
                if len(low) == 1 and len(high) == 1 and low != high:
                    return resource, threshold, next(iter(low)), next(iter(high))
        return None


def _fingerprint_of_rule(r: InteractionRule) -> Fingerprint:
    return (
        r.affected_class, r.other_class, r.predicate,
        r.resource, r.delta, r.limit, r.score_delta,
        r.transform_into, r.teleport_exit,
    )


_REMOVES_AFFECTED = {Predicate.DESTROY, Predicate.TRANSFORM, Predicate.COLLECT_RESOURCE}


def _order_rules(rules: list[InteractionRule]) -> list[InteractionRule]:
    return sorted(
        rules,
        key=lambda r: (
            r.predicate in _REMOVES_AFFECTED,
            r.affected_class,
            r.predicate.value,
        ),
    )


def explain_event(
    e: EventRecord, rules: list[InteractionRule], resources: dict[str, int]
) -> bool:
    """True iff some rule whose precondition holds accounts for the event."""
    key = e.event_key()
    for r in rules:
        if r.event_key() != key:
            continue
        if r.precondition is None or r.precondition.holds(resources):
            return True
    return False


def implications(
    e: EventRecord, rules: list[InteractionRule], resources: dict[str, int]
) -> set[tuple[str, str, Predicate]]:
    """Events expected to co-occur with ``e``: every precondition-satisfied
    rule on the same class pair."""
    pk = e.pair_key()
    out = set()
    for r in rules:
        if r.pair_key() != pk:
            continue
        if r.precondition is None or r.precondition.holds(resources):
            out.add(r.event_key())
    return out


def update_interaction_rules(
    rule_set: RuleSetMAP,
    prev_agent_state: AgentState,
    contacts,
    events,
) -> RuleSetMAP:
    """Fold one tick of contacts/events into the MAP rule set."""
    signature = prev_agent_state.signature()
    by_pair: dict[PairKey, set[Fingerprint]] = {}
    for c in contacts:
        by_pair.setdefault(pair_key(c.class_a, c.class_b), set())
    for e in events:
        by_pair.setdefault(e.pair_key(), set()).add(_fingerprint(e))
    for key in sorted(by_pair):
        rule_set.record(key, signature, frozenset(by_pair[key]))
    return rule_set
