"""Agent variants: the full agent, its planner/exploration ablations, and the
random baseline."""
from __future__ import annotations

from ..learner.learner import LearnerPriors
from ..planner.rewards import RewardConfig
from ..planner.search import PlannerConfig
from .controller import AgentConfig, PlanningAgent, RandomAgent

VARIANTS = (
    "full",
    "no-subgoal",
    "no-gradient",
    "no-subgoal-no-gradient",
    "no-iw",
    "no-all-three",
    "egreedy-1000",
    "egreedy-2000",
    "egreedy-df",
    "random",
)


def agent_config(variant: str) -> AgentConfig:
    if variant == "full":
        return AgentConfig()
    if variant == "no-subgoal":
        return AgentConfig(planner=PlannerConfig(rewards=RewardConfig(use_count_progress=False)))
    if variant == "no-gradient":
        return AgentConfig(planner=PlannerConfig(rewards=RewardConfig(use_proximity=False)))
    if variant == "no-subgoal-no-gradient":
        return AgentConfig(
            planner=PlannerConfig(
                rewards=RewardConfig(use_count_progress=False, use_proximity=False)
            )
        )
    if variant == "no-iw":
        return AgentConfig(planner=PlannerConfig(use_novelty=False))
    if variant == "no-all-three":
        return AgentConfig(
            planner=PlannerConfig(
                rewards=RewardConfig(use_count_progress=False, use_proximity=False),
                use_novelty=False,
            )
        )
    if variant == "egreedy-1000":
        return AgentConfig(exploration_enabled=False, epsilon_anneal_steps=1000)
    if variant == "egreedy-2000":
        return AgentConfig(exploration_enabled=False, epsilon_anneal_steps=2000)
    if variant == "egreedy-df":
        return AgentConfig(
            exploration_enabled=False, epsilon_anneal_steps=1000,
            reset_budget_on_restart=True,
        )
    raise ValueError(f"unknown agent variant {variant!r}")


def make_agent(variant: str, priors: LearnerPriors, seed: int):
    if variant == "random":
        return RandomAgent(seed)
    return PlanningAgent(priors, seed, agent_config(variant))
