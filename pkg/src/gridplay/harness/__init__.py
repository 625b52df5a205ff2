from .corpus import default_corpus_dir, list_games, load_game, validate_corpus
from .env import GameEnv
from .episode import EpisodeLog, ReplayResult, tick_record, verify_replay
from .metrics import (
    BootstrapRatio,
    EfficiencyScore,
    InteractionProfile,
    bootstrap_efficiency_ratio,
    interaction_profile,
    learning_efficiency,
    occupancy_heatmap,
    score_from_log,
)
from .runner import RunConfig, RunResult, run_experiment

__all__ = [
    "BootstrapRatio",
    "EfficiencyScore",
    "EpisodeLog",
    "GameEnv",
    "InteractionProfile",
    "ReplayResult",
    "RunConfig",
    "RunResult",
    "bootstrap_efficiency_ratio",
    "default_corpus_dir",
    "interaction_profile",
    "learning_efficiency",
    "list_games",
    "load_game",
    "occupancy_heatmap",
    "run_experiment",
    "score_from_log",
    "tick_record",
    "validate_corpus",
    "verify_replay",
]
