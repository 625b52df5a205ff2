"""Best-first search over imagined futures.

Pops the highest-value frontier node, expands every action through the model,
prunes non-novel children, and returns as soon as the mode's completion
criterion fires; on budget exhaustion it returns the path to the best
surviving node.  Imagined randomness comes from a stream seeded per search,
so planning never perturbs the real environment's replay.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from ..core.engine import step_engine
from ..core.rng import Rng, _splitmix64
from ..core.types import (
    Action,
    GameDescription,
    GameState,
    Predicate,
    Status,
    TerminationKind,
    Outcome,
    VgdlType,
)
from ..explore.goals import ContactGoal, CountZeroGoal, ExplorationGoal
from .novelty import AtomTable, PositionPenalty, location_tracked_classes, penalty_alpha, volatile_classes
from .rewards import (
    RewardConfig,
    dangerous_classes,
    exploration_gradient,
    intrinsic_value,
    positions_by_class,
    production_chain_classes,
    resource_milestones,
)


class PlannerMode(Enum):
    LONG_TERM = "LongTerm"
    SHORT_TERM = "ShortTerm"
    STALL = "Stall"


LONG_TERM_INITIAL_BUDGET = 1000
SHORT_TERM_BUDGETS = (200, 500, 1000)
STALL_BUDGET = 50

DANGER_RADIUS = 3  # Chebyshev blocks

_MOVE_ACTIONS = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)


@dataclass(frozen=True)
class PlannerConfig:
    rewards: RewardConfig = RewardConfig()
    use_novelty: bool = True


@dataclass
class SearchTrace:
    mode: PlannerMode
    budget: int
    nodes_expanded: int = 0
    pruned: int = 0
    rollout_steps: int = 0
    satisfied: Optional[str] = None


@dataclass
class Plan:
    actions: list[Action]
    predicted_states: list[GameState]
    satisfied: Optional[str]
    trace: SearchTrace

    def __len__(self) -> int:
        return len(self.actions)


@dataclass
class _Node:
    state: GameState
    action: Optional[Action]
    parent: Optional["_Node"]
    value: float = 0.0


def available_actions(model: GameDescription) -> tuple[Action, ...]:
    avatar = model.classes.get(model.avatar_class)
    if (
        avatar is not None
        and avatar.vgdl_type is VgdlType.SHOOT_AVATAR
        and avatar.projectile_class
    ):
        return _MOVE_ACTIONS + (Action.USE, Action.NOOP)
    return _MOVE_ACTIONS + (Action.NOOP,)


def _path(node: _Node) -> tuple[list[Action], list[GameState]]:
    actions: list[Action] = []
    states: list[GameState] = []
    while node.parent is not None:
        actions.append(node.action)
        states.append(node.state)
        node = node.parent
    actions.reverse()
    states.reverse()
    return actions, states


class _Criterion:
    """Mode-dependent plan-completion test.  Removing the subgoal
    representation (the ablation) disables both its reward term and its
    short-term completion credit, so the flag lives on the reward config."""

    def __init__(
        self,
        mode: PlannerMode,
        model: GameDescription,
        root: GameState,
        goals: Iterable[ExplorationGoal],
        subgoals_enabled: bool = True,
    ):
        self.mode = mode
        self.model = model
        self.subgoals_enabled = subgoals_enabled
        self.contact_keys = {g.key() for g in goals if isinstance(g, ContactGoal)}
        self.zero_targets = {g.class_id for g in goals if isinstance(g, CountZeroGoal)}
        root_counts = root.class_counts()
        self.win_classes = {
            g.class_id: root_counts.get(g.class_id, 0)
            for g in model.termination_set
            if g.kind is TerminationKind.COUNT_REACHES and g.outcome is Outcome.WIN
        }
        self.zero_counts = {c: root_counts.get(c, 0) for c in self.zero_targets}
        self.milestones = [
            (res, target)
            for res, target in resource_milestones(model)
            if root.agent_state.resources.get(res, 0) < target
        ]
        # producible classes on a chain toward a win goal that are missing at
        # the root: making one exist is a stepping stone worth returning for
        self.missing_producibles = {
            c for c in production_chain_classes(model)
            if root_counts.get(c, 0) == 0
        }

    def check(self, state: GameState) -> Optional[str]:
        if state.status is Status.WIN:
            return "goal"
        if self.mode is PlannerMode.STALL:
            return None
        # epistemic goals count even when the model predicts the probe ends
        # the episode: the whole point of the probe is that the outcome is
        # uncertain (an inventory change may have altered it, and a count
        # reaching zero has unknown consequences until observed)
        counts = None
        for contact in state.contacts:
            if contact.pair_key() in self.contact_keys:
                return "exploration"
        if self.zero_targets:
            counts = state.class_counts()
            for c in self.zero_targets:
                if self.zero_counts.get(c, 0) > 0 and counts.get(c, 0) == 0:
                    return "exploration"
        if state.status is not Status.CONTINUE:
            return None
        if self.mode is not PlannerMode.SHORT_TERM or not self.subgoals_enabled:
            return None
        counts = counts if counts is not None else state.class_counts()
        for c, root_n in self.win_classes.items():
            if root_n > 0 and counts.get(c, 0) < root_n:
                return "subgoal"
        for c, root_n in self.zero_counts.items():
            if root_n > 0 and counts.get(c, 0) < root_n:
                return "subgoal"
        for res, target in self.milestones:
            if state.agent_state.resources.get(res, 0) >= target:
                return "subgoal"
        for c in self.missing_producibles:
            if counts.get(c, 0) > 0:
                return "subgoal"
        return None


def _danger_near(state: GameState, avatar_class: str, dangerous: set[str]) -> bool:
    avatar = state.avatar(avatar_class)
    if avatar is None:
        return True
    for obj in state.objects.values():
        if obj.class_id in dangerous:
            dx = abs(obj.pos[0] - avatar.pos[0])
            dy = abs(obj.pos[1] - avatar.pos[1])
            if max(dx, dy) <= DANGER_RADIUS:
                return True
    return False


def plan(
    root: GameState,
    model: GameDescription,
    mode: PlannerMode,
    budget: int,
    goals: Iterable[ExplorationGoal] = (),
    seed: int = 0,
    config: PlannerConfig = PlannerConfig(),
) -> Plan:
    """Algorithm: best-first expansion with novelty pruning; children that
    satisfy the mode's criterion return immediately; loss children are
    dropped; ties in the frontier break by insertion order."""
    assert budget > 0
    trace = SearchTrace(mode=mode, budget=budget)
    criterion = _Criterion(
        mode, model, root, goals,
        subgoals_enabled=config.rewards.use_count_progress,
    )

    sim_root = root.clone()
    sim_root.rng_state = (_splitmix64(seed ^ 0x5EED), 0)
    root_node = _Node(sim_root, None, None)

    actions = available_actions(model)
    avatar_dtype = model.classes.get(model.avatar_class)
    projectile = avatar_dtype.projectile_class if avatar_dtype else None
    proj_dtype = model.classes.get(projectile) if projectile else None
    projectile_moves = proj_dtype is not None and proj_dtype.moves
    dangerous = dangerous_classes(model)
    rollout_rng = Rng(_splitmix64(seed ^ 0x0110))

    volatile = volatile_classes(model)
    table = AtomTable(
        avatar_class=model.avatar_class,
        tracked=location_tracked_classes(model),
        universe_ids=frozenset(
            oid for oid, obj in sim_root.objects.items()
            if obj.class_id in volatile
        ),
        projectile_class=projectile,
        volatile=volatile,
    )
    if config.use_novelty:
        table.is_novel(sim_root)
    penalty = PositionPenalty(alpha=penalty_alpha(model, sim_root))

    def node_value(state: GameState) -> float:
        positions = positions_by_class(state)
        value = intrinsic_value(state, model, config.rewards, positions)
        value += exploration_gradient(
            state, model, criterion.contact_keys, criterion.zero_targets, positions
        )
        return value + penalty.charge(state, model.avatar_class)

    root_node.value = node_value(sim_root)

    # ties in the frontier break by a seeded draw: deterministic per seed,
    # but restarts and fresh searches explore different equal-value routes
    tie_rng = Rng(_splitmix64(seed ^ 0x71E5))
    counter = itertools.count()
    frontier: list[tuple[float, int, int, _Node]] = []
    heapq.heappush(
        frontier, (-root_node.value, tie_rng.next_uint(), next(counter), root_node)
    )
    survivors: list[tuple[float, int, int, _Node]] = []

    def finish(node: _Node, satisfied: Optional[str]) -> Plan:
        trace.satisfied = satisfied
        acts, states = _path(node)
        return Plan(acts, states, satisfied, trace)

    while frontier and trace.nodes_expanded < budget:
        _, _, _, node = heapq.heappop(frontier)
        acts = actions
        if projectile_moves and any(
            o.class_id == projectile for o in node.state.objects.values()
        ):
            # while our own shot is in flight, stay put unless danger is close
            if not _danger_near(node.state, model.avatar_class, dangerous):
                acts = (Action.NOOP,)
        for action in acts:
            if trace.nodes_expanded >= budget:
                break
            child_state = step_engine(node.state, action, model)
            trace.nodes_expanded += 1
            child = _Node(child_state, action, node)
            satisfied = criterion.check(child_state)
            if satisfied is None and action is Action.USE and projectile_moves:
                satisfied, boost = _projectile_rollout(
                    child_state, model, projectile, criterion, rollout_rng,
                    trace, config,
                )
            else:
                boost = None
            if satisfied is not None:
                return finish(child, satisfied)
            if child_state.status is Status.LOSS:
                continue
            if config.use_novelty and not table.is_novel(child_state):
                trace.pruned += 1
                continue
            child.value = node_value(child_state)
            if boost is not None and boost > child.value:
                child.value = boost
            entry = (-child.value, tie_rng.next_uint(), next(counter), child)
            heapq.heappush(frontier, entry)
            survivors.append(entry)

    best = None
    for neg_value, tiebreak, order, node in survivors:
        key = (neg_value, tiebreak, order)
        if best is None or key < best[0]:
            best = (key, node)
    if best is None:
        return finish(root_node, None)
    return finish(best[1], None)


def _projectile_rollout(
    child_state: GameState,
    model: GameDescription,
    projectile: str,
    criterion: _Criterion,
    rng: Rng,
    trace: SearchTrace,
    config: PlannerConfig,
) -> tuple[Optional[str], Optional[float]]:
    """After firing, simulate random play until the shot leaves the board (or
    a cap of the longest board axis); any subgoal the shot brings about is
    credited to the act of firing."""
    if not any(o.class_id == projectile for o in child_state.objects.values()):
        return None, None
    cap = max(child_state.width, child_state.height)
    roll = child_state
    acts = available_actions(model)
    best_value = None
    for _ in range(cap):
        if roll.status is not Status.CONTINUE:
            break
        if not any(o.class_id == projectile for o in roll.objects.values()):
            break
        action = acts[rng.randrange(len(acts))]
        roll = step_engine(roll, action, model)
        trace.rollout_steps += 1
        shot_events = [
            e for e in roll.events
            if projectile in (e.affected_class, e.other_class)
        ]
        if not shot_events:
            continue
        if roll.status is Status.WIN:
            return "goal", None
        for e in shot_events:
            if (
                e.affected_class in criterion.win_classes
                or e.affected_class in criterion.zero_targets
            ) and e.predicate in (
                Predicate.DESTROY, Predicate.COLLECT_RESOURCE, Predicate.TRANSFORM,
            ):
                if criterion.mode is PlannerMode.SHORT_TERM:
                    return "subgoal", None
                value = intrinsic_value(roll, model, config.rewards)
                if not math.isinf(value) and (best_value is None or value > best_value):
                    best_value = value
    return None, best_value
