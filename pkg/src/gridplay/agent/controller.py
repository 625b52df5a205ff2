"""The explore-model-plan-act loop.

Every observation updates the learner first.  The agent waits and watches at
the start of a game (15 ticks) and of each level (5), executes plans while
their predictions hold, and re-plans when its own position or a nearby
dangerous object deviates from prediction.  Mode selection: short-term by
default; stall for one cycle after an ordinary failure; long-term once stuck
(lost twice the same way, or nothing else moves); a second long-term failure
from the same state restarts the level and doubles the search budget.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from ..core.rng import Rng, _splitmix64
from ..core.types import Action, GameDescription, GameState, Status
from ..explore.goals import ExplorationTracker
from ..learner.learner import GameModelLearner, LearnerPriors
from ..planner.rewards import dangerous_classes
from ..planner.search import (
    LONG_TERM_INITIAL_BUDGET,
    Plan,
    PlannerConfig,
    PlannerMode,
    SHORT_TERM_BUDGETS,
    STALL_BUDGET,
    plan as run_search,
)

DANGER_RADIUS = 3  # Chebyshev blocks, same radius the planner uses

RESTART_LEVEL = "RestartLevel"
Decision = Union[Action, str]

INITIAL_WAIT = 15
LEVEL_WAIT = 5


@dataclass(frozen=True)
class AgentConfig:
    planner: PlannerConfig = PlannerConfig()
    exploration_enabled: bool = True
    epsilon_anneal_steps: Optional[int] = None  # stochastic-exploration variant
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    reset_budget_on_restart: bool = False
    initial_wait: int = INITIAL_WAIT
    level_wait: int = LEVEL_WAIT
    # repeated failures double the long-term budget; the cap keeps a level
    # that is genuinely unsolvable from growing searches without bound
    max_long_term_budget: int = 16 * LONG_TERM_INITIAL_BUDGET


@dataclass(frozen=True)
class PredictionCheck:
    avatar_match: bool
    danger_misprediction_nearby: bool

    @property
    def should_replan(self) -> bool:
        return (not self.avatar_match) or self.danger_misprediction_nearby


def prediction_error_check(
    observed: GameState, predicted: GameState, model: GameDescription
) -> PredictionCheck:
    avatar_class = model.avatar_class
    obs_avatar = observed.avatar(avatar_class)
    pred_avatar = predicted.avatar(avatar_class)
    if obs_avatar is None or pred_avatar is None:
        return PredictionCheck(obs_avatar is None and pred_avatar is None, True)
    avatar_match = obs_avatar.pos == pred_avatar.pos
    danger = False
    dangerous = dangerous_classes(model)
    if dangerous:
        ax, ay = obs_avatar.pos
        for obj in observed.objects.values():
            if obj.class_id not in dangerous:
                continue
            if max(abs(obj.pos[0] - ax), abs(obj.pos[1] - ay)) > DANGER_RADIUS:
                continue
            pred_obj = predicted.objects.get(obj.id)
            if pred_obj is None or pred_obj.pos != obj.pos:
                danger = True
                break
    return PredictionCheck(avatar_match, danger)


def _decision_key(state: GameState, avatar_class: str) -> tuple:
    """Where planning is being attempted from: avatar pose, inventory, and
    class counts.  Coarser than a full state hash on purpose: with roaming
    objects no exact state ever repeats, and the repeated-failure restart
    rule would never fire."""
    avatar = state.avatar(avatar_class)
    pose = (avatar.pos, avatar.orientation) if avatar is not None else None
    return (
        pose,
        state.agent_state.signature(),
        tuple(sorted(state.class_counts().items())),
    )


def loss_signature(final_state: GameState, model: GameDescription) -> tuple:
    """What kind of loss this was: the termination that fired plus the final
    tick's events involving the avatar."""
    fired = final_state.fired_termination
    rule_text = fired.describe() if fired is not None else "unknown"
    avatar_class = model.avatar_class
    events = tuple(sorted(
        (e.affected_class, e.other_class, e.predicate.value)
        for e in final_state.events
        if avatar_class in (e.affected_class, e.other_class)
    ))
    return (rule_text, events)


@dataclass
class ControllerState:
    mode: PlannerMode = PlannerMode.SHORT_TERM
    long_term_budget: int = LONG_TERM_INITIAL_BUDGET
    current_plan: Optional[Plan] = None
    plan_cursor: int = 0
    wait_remaining: int = 0
    loss_signatures: dict = field(default_factory=dict)  # signature -> count
    failure_count_by_state: dict = field(default_factory=dict)
    stall_pending_return: bool = False


class PlanningAgent:
    """Full agent; ablations are switched through AgentConfig."""

    def __init__(self, priors: LearnerPriors, seed: int, config: AgentConfig = AgentConfig()):
        self.config = config
        self.learner = GameModelLearner(priors)
        self.tracker = ExplorationTracker(self.learner, enabled=config.exploration_enabled)
        self.ctrl = ControllerState()
        self.rng = Rng(_splitmix64(seed ^ 0xA6E27))
        self.steps_taken = 0
        self.search_traces: list = []
        self._predicted: Optional[GameState] = None
        self._search_seed = seed

    # -- lifecycle -----------------------------------------------------------

    def start_game(self, state: GameState) -> None:
        self.ctrl = ControllerState(wait_remaining=self.config.initial_wait)
        self.learner.start_episode(state)
        self.tracker.note_state(state)

    def start_level(self, state: GameState, restart: bool) -> None:
        self.ctrl.wait_remaining = self.config.level_wait
        self.ctrl.current_plan = None
        self.ctrl.plan_cursor = 0
        self.ctrl.mode = PlannerMode.SHORT_TERM
        self.ctrl.stall_pending_return = False
        self.ctrl.failure_count_by_state = {}
        if restart and self.config.reset_budget_on_restart:
            self.ctrl.long_term_budget = LONG_TERM_INITIAL_BUDGET
        self._predicted = None
        self.learner.start_episode(state)
        self.tracker.note_state(state)

    def end_episode(self, final_state: GameState) -> None:
        if final_state.status is Status.LOSS:
            sig = loss_signature(final_state, self.learner.map_model())
            self.ctrl.loss_signatures[sig] = self.ctrl.loss_signatures.get(sig, 0) + 1
        self.ctrl.current_plan = None
        self._predicted = None

    def observe_transition(self, prev: GameState, action: Action, next_state: GameState) -> None:
        self.learner.observe(prev, action, next_state)
        self.tracker.note_state(next_state)
        if self._predicted is not None:
            check = prediction_error_check(
                next_state, self._predicted, self.learner.map_model()
            )
            if check.should_replan:
                self.ctrl.current_plan = None
                self.ctrl.plan_cursor = 0
            self._predicted = None

    # -- action selection ----------------------------------------------------

    def select_action(self, state: GameState) -> Decision:
        self.steps_taken += 1
        if self.ctrl.wait_remaining > 0:
            self.ctrl.wait_remaining -= 1
            return Action.NOOP
        if self._epsilon_fires():
            self.ctrl.current_plan = None
            self.ctrl.plan_cursor = 0
            return self.rng.choice(list(Action))
        if self._plan_exhausted():
            decision = self._plan_for(state)
            if decision is not None:
                return decision
        return self._next_planned_action()

    def _epsilon_fires(self) -> bool:
        anneal = self.config.epsilon_anneal_steps
        if anneal is None:
            return False
        t = min(1.0, self.steps_taken / anneal)
        eps = self.config.epsilon_start + t * (
            self.config.epsilon_end - self.config.epsilon_start
        )
        return self.rng.uniform() < eps

    def _plan_exhausted(self) -> bool:
        p = self.ctrl.current_plan
        return p is None or self.ctrl.plan_cursor >= len(p.actions)

    def _next_planned_action(self) -> Action:
        p = self.ctrl.current_plan
        if p is None or self.ctrl.plan_cursor >= len(p.actions):
            return Action.NOOP
        action = p.actions[self.ctrl.plan_cursor]
        self._predicted = p.predicted_states[self.ctrl.plan_cursor]
        self.ctrl.plan_cursor += 1
        if self.ctrl.plan_cursor >= len(p.actions):
            finished_stall = p.trace.mode is PlannerMode.STALL
            if finished_stall and self.ctrl.stall_pending_return:
                self.ctrl.mode = PlannerMode.SHORT_TERM
                self.ctrl.stall_pending_return = False
        return action

    def _adopt(self, p: Plan) -> None:
        self.ctrl.current_plan = p
        self.ctrl.plan_cursor = 0

    def _search(self, state: GameState, mode: PlannerMode, budget: int) -> Plan:
        model = self.learner.map_model()
        goals = self.tracker.goals(model, state)
        seed = _splitmix64(self._search_seed ^ (self.steps_taken * 0x9E37))
        result = run_search(
            state, model, mode, budget, goals=goals, seed=seed,
            config=self.config.planner,
        )
        self.search_traces.append(result.trace)
        return result

    def _stuck_short_term(self, state: GameState) -> bool:
        if any(n >= 2 for n in self.ctrl.loss_signatures.values()):
            return True
        model = self.learner.map_model()
        counts = state.class_counts()
        for class_id, dtype in model.classes.items():
            if class_id == model.avatar_class:
                continue
            if dtype.moves and counts.get(class_id, 0) > 0:
                return False
        return True

    def _plan_for(self, state: GameState) -> Optional[Decision]:
        """Run the metacontroller until a plan is adopted.  Returns a level
        restart decision when long-term planning is stuck, else None."""
        if self.ctrl.mode is PlannerMode.SHORT_TERM:
            budget = SHORT_TERM_BUDGETS[self.rng.randrange(len(SHORT_TERM_BUDGETS))]
            result = self._search(state, PlannerMode.SHORT_TERM, budget)
            if result.satisfied and result.actions:
                self._adopt(result)
                return None
            if self._stuck_short_term(state):
                self.ctrl.mode = PlannerMode.LONG_TERM
            else:
                stall = self._search(state, PlannerMode.STALL, STALL_BUDGET)
                self.ctrl.stall_pending_return = True
                if stall.actions:
                    self._adopt(stall)
                else:
                    self.ctrl.mode = PlannerMode.SHORT_TERM
                    self.ctrl.stall_pending_return = False
                return None
        if self.ctrl.mode is PlannerMode.LONG_TERM:
            result = self._search(state, PlannerMode.LONG_TERM, self.ctrl.long_term_budget)
            if result.satisfied and result.actions:
                self._adopt(result)
                return None
            key = _decision_key(state, self.learner.priors.avatar_class)
            failures = self.ctrl.failure_count_by_state.get(key, 0) + 1
            self.ctrl.failure_count_by_state[key] = failures
            if failures > 1:
                self.ctrl.long_term_budget = min(
                    self.ctrl.long_term_budget * 2, self.config.max_long_term_budget
                )
                return RESTART_LEVEL
            if result.actions:
                self._adopt(result)
            return None
        # stall mode as a resting state only happens transiently
        stall = self._search(state, PlannerMode.STALL, STALL_BUDGET)
        self.ctrl.mode = PlannerMode.SHORT_TERM
        if stall.actions:
            self._adopt(stall)
        return None

    @property
    def mode(self) -> PlannerMode:
        return self.ctrl.mode


class RandomAgent:
    """Uniform over the six actions; the floor every learner should beat."""

    def __init__(self, seed: int):
        self.rng = Rng(_splitmix64(seed ^ 0x7A2D))
        self.steps_taken = 0
        self.search_traces: list = []

    def start_game(self, state: GameState) -> None:
        pass

    def start_level(self, state: GameState, restart: bool) -> None:
        pass

    def end_episode(self, final_state: GameState) -> None:
        pass

    def observe_transition(self, prev, action, next_state) -> None:
        pass

    def select_action(self, state: GameState) -> Decision:
        self.steps_taken += 1
        return self.rng.choice(list(Action))
