"""Learner facade: owns the per-class posteriors, the MAP rule set, and the
termination candidates, and assembles the highest-probability model.

A priori knowledge, matching how the agents are evaluated: the avatar's class
and dynamics (including any projectile it emits), and which classes are walls.
Everything else is inferred from observation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..core.types import (
    DynamicType,
    GameDescription,
    GameState,
    Orientation,
    VgdlType,
)
from .hypotheses import DynamicTypePosterior, enumerate_dynamic_type_space
from .likelihood import DEFAULT_EVENT_NOISE, Observation, contact_ids
from .rules import RuleSetMAP, update_interaction_rules
from .terminations import TerminationCandidates


@dataclass(frozen=True)
class LearnerPriors:
    avatar_class: str
    avatar_dtype: DynamicType
    wall_classes: frozenset[str] = frozenset()
    projectile_dtypes: dict[str, DynamicType] = field(default_factory=dict)


def priors_from_description(desc: GameDescription, level_index: int = 0) -> LearnerPriors:
    """Derive the given knowledge from a ground-truth description: the avatar
    (and its projectile), plus walls identified as the most numerous class
    that never moves on its own."""
    projectiles: dict[str, DynamicType] = {}
    avatar_dtype = desc.classes[desc.avatar_class]
    if avatar_dtype.projectile_class:
        pc = avatar_dtype.projectile_class
        projectiles[pc] = desc.classes[pc]
    counts: dict[str, int] = {}
    legend = desc.levels[level_index].legend or desc.legend
    for row in desc.levels[level_index].grid:
        for ch in row:
            if ch in (".", " "):
                continue
            cls = legend[ch]
            counts[cls] = counts.get(cls, 0) + 1
    walls: set[str] = set()
    if counts:
        top = max(counts, key=lambda c: (counts[c], c))
        if not desc.classes[top].moves and not desc.classes[top].is_avatar:
            walls.add(top)
    return LearnerPriors(
        avatar_class=desc.avatar_class,
        avatar_dtype=avatar_dtype,
        wall_classes=frozenset(walls),
        projectile_dtypes=projectiles,
    )


class GameModelLearner:
    def __init__(self, priors: LearnerPriors, eps: float = DEFAULT_EVENT_NOISE):
        self.priors = priors
        self.eps = eps
        self.posteriors: dict[str, DynamicTypePosterior] = {}
        self.rule_set = RuleSetMAP(avatar_class=priors.avatar_class)
        self.candidates = TerminationCandidates()
        self.known_classes: set[str] = set()
        self.inadequacies: list[str] = []
        self.ticks_observed = 0

    # -- observation -------------------------------------------------------

    def start_episode(self, state: GameState) -> None:
        self._note_classes(state)
        self.candidates.initialize(set(self.known_classes))

    def observe(self, prev: GameState, action, next_state: GameState) -> None:
        obs = Observation(prev, action, next_state)
        self._note_classes(prev)
        self._note_classes(next_state)
        self.candidates.initialize(set(self.known_classes))
        self._update_posteriors(obs)
        update_interaction_rules(
            self.rule_set, prev.agent_state, next_state.contacts, next_state.events
        )
        self.candidates.update(next_state, self.known_classes)
        self.ticks_observed += 1
        self._drain_signals()

    def _note_classes(self, state: GameState) -> None:
        for obj in state.objects.values():
            if obj.class_id not in self.known_classes:
                self.known_classes.add(obj.class_id)

    def _ensure_posterior(self, class_id: str) -> DynamicTypePosterior:
        post = self.posteriors.get(class_id)
        if post is not None:
            return post
        known = None
        if class_id == self.priors.avatar_class:
            known = self.priors.avatar_dtype
        elif class_id in self.priors.projectile_dtypes:
            known = self.priors.projectile_dtypes[class_id]
        others = tuple(sorted(self.known_classes - {class_id}))
        support = enumerate_dynamic_type_space(
            class_id, others, known_dtype=known,
            is_wall=class_id in self.priors.wall_classes,
        )
        post = DynamicTypePosterior(class_id=class_id, support=support)
        self.posteriors[class_id] = post
        return post

    def _update_posteriors(self, obs: Observation) -> None:
        from ..core.types import Predicate

        if any(e.predicate is Predicate.UNDO_ALL for e in obs.next.events):
            return  # every object was dragged back; motion says nothing
        excluded = contact_ids(obs.next)
        by_class: dict[str, list] = {}
        for oid, prev_obj in obs.prev.objects.items():
            if oid in excluded:
                continue
            next_obj = obs.next.objects.get(oid)
            if next_obj is None:
                continue
            by_class.setdefault(prev_obj.class_id, []).append((prev_obj, next_obj.pos))
        for class_id, instances in sorted(by_class.items()):
            if class_id == self.priors.avatar_class:
                continue  # avatar dynamics are given
            post = self._ensure_posterior(class_id)
            if not post.update(instances, obs.prev):
                self.inadequacies.append(
                    f"class {class_id!r}: no motion hypothesis fits tick {obs.next.tick}"
                )

    def _drain_signals(self) -> None:
        self.inadequacies.extend(self.rule_set.inadequacies)
        self.rule_set.inadequacies = []
        self.inadequacies.extend(self.candidates.inadequacies)
        self.candidates.inadequacies = []

    # -- the highest-probability model --------------------------------------

    def map_model(self) -> GameDescription:
        classes: dict[str, DynamicType] = {}
        for class_id in sorted(self.known_classes):
            classes[class_id] = self._ensure_posterior(class_id).map_dtype()
        # the avatar's projectile is known a priori even before it is emitted
        for class_id, dtype in self.priors.projectile_dtypes.items():
            classes.setdefault(class_id, dtype)
        # classes only mentioned by rules (e.g. a transform target not yet on
        # the board) still need a definition for the model to be loadable
        rules = self.rule_set.rules()
        for rule in rules:
            for ref in (rule.transform_into, rule.teleport_exit):
                if ref is not None and ref not in classes:
                    classes[ref] = DynamicType(VgdlType.IMMOVABLE)
        capacities: dict[str, int] = {}
        for rule in rules:
            if rule.limit is not None:
                name = rule.resource or rule.affected_class
                capacities[name] = rule.limit
        return GameDescription(
            classes=classes,
            avatar_class=self.priors.avatar_class,
            interaction_set=rules,
            termination_set=self.candidates.rules(),
            levels=[],
            resource_capacities=capacities,
        )

    # -- checkpointing -------------------------------------------------------

    def export_state(self) -> str:
        def dtype_dict(d: DynamicType) -> dict:
            return {
                "type": d.vgdl_type.value,
                "speed": str(d.speed),
                "orientation": d.orientation.value,
                "cooldown": d.cooldown,
                "target": d.target_class,
                "projectile": d.projectile_class,
                "lifetime": d.lifetime,
                "period": d.spawn_period,
                "portal_exit": d.portal_exit_class,
            }

        payload = {
            "eps": self.eps,
            "known_classes": sorted(self.known_classes),
            "ticks_observed": self.ticks_observed,
            "posteriors": {
                c: {
                    "support": [dtype_dict(d) for d in p.support],
                    "log_weights": p.log_weights,
                }
                for c, p in self.posteriors.items()
            },
            "pair_history": {
                "|".join(k): [
                    {
                        "signature": list(map(list, o.signature)),
                        "events": [list(fp) for fp in sorted(o.events)],
                    }
                    for o in outcomes
                ]
                for k, outcomes in self.rule_set.history.items()
            },
            "candidates": {
                "win": sorted(self.candidates.win),
                "loss": sorted(self.candidates.loss),
                "initialized": self.candidates.initialized,
            },
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def import_state(cls, text: str, priors: LearnerPriors) -> "GameModelLearner":
        from ..core.types import Predicate

        def dtype_from(d: dict) -> DynamicType:
            return DynamicType(
                vgdl_type=VgdlType(d["type"]),
                speed=Fraction(d["speed"]),
                orientation=Orientation(d["orientation"]),
                cooldown=d["cooldown"],
                target_class=d["target"],
                projectile_class=d["projectile"],
                lifetime=d["lifetime"],
                spawn_period=d["period"],
                portal_exit_class=d["portal_exit"],
            )

        payload = json.loads(text)
        learner = cls(priors, eps=payload["eps"])
        learner.known_classes = set(payload["known_classes"])
        learner.ticks_observed = payload["ticks_observed"]
        for class_id, data in payload["posteriors"].items():
            learner.posteriors[class_id] = DynamicTypePosterior(
                class_id=class_id,
                support=tuple(dtype_from(d) for d in data["support"]),
                log_weights=[
                    float(w) if w is not None else float("-inf")
                    for w in data["log_weights"]
                ],
            )
        from .rules import PairOutcome

        for key_text, outcomes in payload["pair_history"].items():
            parts = tuple(key_text.split("|"))
            restored = []
            for o in outcomes:
                events = frozenset(
                    (
                        fp[0], fp[1], Predicate(fp[2]), fp[3], fp[4],
                        fp[5], fp[6], fp[7], fp[8],
                    )
                    for fp in o["events"]
                )
                restored.append(
                    PairOutcome(
                        signature=tuple((r, c) for r, c in o["signature"]),
                        events=events,
                    )
                )
            learner.rule_set.history[parts] = restored
            learner.rule_set._rebuild(parts)
        cands = payload["candidates"]
        learner.candidates.win = set(cands["win"])
        learner.candidates.loss = set(cands["loss"])
        learner.candidates.initialized = cands["initialized"]
        return learner
