"""Experiment runner: one (game, agent variant, seed) run through the level
sequence, producing an episode log and an efficiency score."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..agent.controller import RESTART_LEVEL
from ..agent.variants import make_agent
from ..core.types import Action, GameDescription, Status
from ..learner.learner import priors_from_description
from .corpus import load_game
from .env import GameEnv
from .episode import EpisodeLog, tick_record
from .metrics import EfficiencyScore, learning_efficiency


@dataclass(frozen=True)
class RunConfig:
    game: str
    variant: str = "full"
    seed: int = 0
    max_steps: int = 2000
    max_hours: float = 24.0
    out_dir: Optional[Path] = None
    corpus_dir: Optional[Path] = None
    desc: Optional[GameDescription] = None  # bypass corpus lookup in tests


@dataclass
class RunResult:
    score: EfficiencyScore
    log: EpisodeLog
    log_path: Optional[Path]
    truncated_by_wallclock: bool = False


def run_experiment(cfg: RunConfig) -> RunResult:
    desc = cfg.desc if cfg.desc is not None else load_game(cfg.game, cfg.corpus_dir)
    env = GameEnv(desc, cfg.seed)
    agent = make_agent(cfg.variant, priors_from_description(desc), cfg.seed)

    records: list[dict] = [{
        "type": "header",
        "game": cfg.game,
        "variant": cfg.variant,
        "seed": cfg.seed,
        "levels": env.level_count,
        "max_steps": cfg.max_steps,
        "avatar_class": desc.avatar_class,
        "step_unit": "agent",
    }]

    deadline = time.monotonic() + cfg.max_hours * 3600.0
    truncated = False
    steps = 0
    level = 0
    completed = 0
    steps_to_completion = 0

    state = env.reset(level)
    records.append(_episode_record(env, level))
    agent.start_game(state)
    searches_seen = len(getattr(agent, "search_traces", []))

    while steps < cfg.max_steps and level < env.level_count:
        if time.monotonic() > deadline:
            truncated = True
            break
        decision = agent.select_action(state)
        steps += 1
        traces = getattr(agent, "search_traces", [])
        for trace in traces[searches_seen:]:
            records.append({
                "type": "search",
                "step": steps,
                "mode": trace.mode.value,
                "budget": trace.budget,
                "expanded": trace.nodes_expanded,
                "pruned": trace.pruned,
                "rollout": trace.rollout_steps,
                "satisfied": trace.satisfied,
            })
        searches_seen = len(traces)
        if decision == RESTART_LEVEL:
            records.append({
                "type": "level_event", "event": "restart", "level": level, "step": steps,
            })
            state = env.reset(level)
            records.append(_episode_record(env, level))
            agent.start_level(state, restart=True)
            continue
        action = decision
        next_state = env.step(action)
        agent.observe_transition(state, action, next_state)
        mode = getattr(agent, "mode", None)
        records.append(tick_record(
            steps, level, env.episode_index, next_state, action,
            mode.value if mode is not None else "random", desc.avatar_class,
        ))
        if next_state.status is Status.WIN:
            agent.end_episode(next_state)
            completed += 1
            steps_to_completion = steps
            records.append({
                "type": "level_event", "event": "win", "level": level, "step": steps,
            })
            level += 1
            if level >= env.level_count:
                break
            state = env.reset(level)
            records.append(_episode_record(env, level))
            agent.start_level(state, restart=False)
        elif next_state.status is Status.LOSS:
            agent.end_episode(next_state)
            records.append({
                "type": "level_event", "event": "loss", "level": level, "step": steps,
            })
            state = env.reset(level)
            records.append(_episode_record(env, level))
            agent.start_level(state, restart=True)
        else:
            state = next_state

    value = learning_efficiency(
        completed, env.level_count, max(steps_to_completion, 1)
    )
    score = EfficiencyScore(completed, env.level_count, steps_to_completion, value)
    records.append({
        "type": "result",
        "levels_completed": completed,
        "steps_to_completion": steps_to_completion,
        "steps_taken": steps,
        "efficiency": value,
        "truncated_by_wallclock": truncated,
    })
    log = EpisodeLog(records)
    log_path = None
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        log_path = out / f"{cfg.game}__{cfg.variant}__seed{cfg.seed}.jsonl"
        log.dump(log_path)
    return RunResult(score, log, log_path, truncated)


def _episode_record(env: GameEnv, level: int) -> dict:
    return {
        "type": "episode",
        "level": level,
        "episode": env.episode_index,
        "engine_seed": env.episode_seed(env.episode_index),
        "start_hash": f"{env.state.state_hash():016x}",
    }
