"""Level-sequenced environment wrapper around the engine."""
from __future__ import annotations

from ..core.engine import initial_state, step_engine
from ..core.rng import _splitmix64
from ..core.types import Action, GameDescription, GameState


class GameEnv:
    """One run of one game: levels play in order, each episode (fresh level,
    restart after a loss, agent-requested restart) gets a derived engine seed
    so whole runs replay bit-exactly from (game, run seed)."""

    def __init__(self, desc: GameDescription, run_seed: int):
        self.desc = desc
        self.run_seed = run_seed
        self.episode_index = -1
        self.level = 0
        self.state: GameState | None = None

    @property
    def level_count(self) -> int:
        return len(self.desc.levels)

    def episode_seed(self, episode_index: int) -> int:
        return _splitmix64((self.run_seed << 1) ^ (episode_index * 0x9E3779B9))

    def reset(self, level: int) -> GameState:
        self.level = level
        self.episode_index += 1
        self.state = initial_state(self.desc, level, self.episode_seed(self.episode_index))
        return self.state

    def step(self, action: Action) -> GameState:
        self.state = step_engine(self.state, action, self.desc)
        return self.state
