"""Learning-efficiency scoring and the behavioral analyses: bootstrap ratio
intervals, occupancy heatmaps, and object-interaction profiles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .episode import EpisodeLog


@dataclass(frozen=True)
class EfficiencyScore:
    levels_completed: int
    levels_in_game: int
    steps_to_completion: int
    value: float


def learning_efficiency(
    levels_completed: int, levels_in_game: int, steps_to_completion: int
) -> float:
    """(levels completed / levels in game) x (levels completed / steps),
    zero when nothing was completed."""
    if levels_in_game < 1:
        raise ValueError("levels_in_game must be >= 1")
    if levels_completed == 0:
        return 0.0
    if steps_to_completion < 1:
        raise ValueError("steps_to_completion must be >= 1 once a level is done")
    return (levels_completed / levels_in_game) * (
        levels_completed / steps_to_completion
    )


def score_from_log(log: EpisodeLog) -> EfficiencyScore:
    header = log.header
    levels_in_game = header["levels"]
    completed = 0
    steps_to_completion = 0
    for event in log.level_events():
        if event["event"] == "win":
            completed += 1
            steps_to_completion = event["step"]
    value = learning_efficiency(completed, levels_in_game, max(steps_to_completion, 1))
    return EfficiencyScore(completed, levels_in_game, steps_to_completion, value)


@dataclass(frozen=True)
class BootstrapRatio:
    mean_ratio: float
    low: float
    high: float
    resampled_agent: bool
    resampled_human: bool
    flagged: bool


def bootstrap_efficiency_ratio(
    agent_scores: Sequence[float],
    human_scores: Sequence[float],
    resamples: int = 10_000,
    seed: int = 0,
) -> BootstrapRatio:
    """Ratio of resampled means with a percentile 95% interval.  A side with
    fewer than three nonzero scores is held fixed at its plain mean and only
    the other side is resampled; degenerate cases are flagged."""
    agent = np.asarray(agent_scores, dtype=float)
    human = np.asarray(human_scores, dtype=float)
    if len(agent) == 0 or len(human) == 0:
        raise ValueError("need at least one score per side")
    resample_agent = int(np.count_nonzero(agent)) >= 3
    resample_human = int(np.count_nonzero(human)) >= 3
    if agent.mean() == 0.0:
        return BootstrapRatio(0.0, 0.0, 0.0, False, False, True)
    rng = np.random.default_rng(seed)
    agent_means = (
        rng.choice(agent, size=(resamples, len(agent)), replace=True).mean(axis=1)
        if resample_agent
        else np.full(resamples, agent.mean())
    )
    human_means = (
        rng.choice(human, size=(resamples, len(human)), replace=True).mean(axis=1)
        if resample_human
        else np.full(resamples, human.mean())
    )
    with np.errstate(divide="ignore"):
        ratios = np.where(human_means > 0, agent_means / human_means, np.inf)
    finite = ratios[np.isfinite(ratios)]
    flagged = len(finite) < resamples or not (resample_agent or resample_human)
    if len(finite) == 0:
        return BootstrapRatio(float("inf"), float("inf"), float("inf"),
                              resample_agent, resample_human, True)
    low, high = np.percentile(finite, [2.5, 97.5])
    return BootstrapRatio(
        float(finite.mean()), float(low), float(high),
        resample_agent, resample_human, flagged,
    )


def occupancy_heatmap(
    logs: Iterable[EpisodeLog], level: int, width: int, height: int
) -> np.ndarray:
    """Fraction of the agent's experience on a level spent in each cell."""
    grid = np.zeros((height, width), dtype=float)
    total = 0
    for log in logs:
        for t in log.ticks():
            if t["level"] != level or t["avatar"] is None:
                continue
            x, y = t["avatar"]
            grid[y, x] += 1.0
            total += 1
    if total:
        grid /= total
    return grid


CATEGORIES = ("positive", "instrumental", "neutral", "negative")


@dataclass(frozen=True)
class InteractionProfile:
    fractions: dict[str, float]
    counts: dict[str, int]
    loss_object_contacts: int
    flagged_empty: bool


def interaction_profile(
    logs: Iterable[EpisodeLog],
    labels: dict[str, str],
    avatar_class: str,
) -> InteractionProfile:
    """Distribution of the avatar's interaction events over object labels,
    plus the absolute number of contacts with immediate-loss objects."""
    counts = {c: 0 for c in CATEGORIES}
    loss_contacts = 0
    for log in logs:
        for t in log.ticks():
            seen_pairs = set()
            for affected, other, _pred in t["events"]:
                if avatar_class not in (affected, other):
                    continue
                partner = other if affected == avatar_class else affected
                if partner == "EOS":
                    continue
                label = labels.get(partner)
                if label is None:
                    raise ValueError(f"class {partner!r} missing from the label file")
                if label not in CATEGORIES:
                    raise ValueError(f"class {partner!r} has unknown label {label!r}")
                pair = (min(affected, other), max(affected, other))
                if pair in seen_pairs:
                    continue  # one contact may fire several rules; count once
                seen_pairs.add(pair)
                counts[label] += 1
                if label == "negative":
                    loss_contacts += 1
    total = sum(counts.values())
    fractions = {c: (counts[c] / total if total else 0.0) for c in CATEGORIES}
    return InteractionProfile(
        fractions=fractions,
        counts=counts,
        loss_object_contacts=loss_contacts,
        flagged_empty=total == 0,
    )
