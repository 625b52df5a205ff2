"""Grid-game workbench: a deterministic engine for a small game-description
language, a Bayesian model learner, a novelty-pruned planner, an experiment
harness, and a live play service."""

__version__ = "0.1.0"
