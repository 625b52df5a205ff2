"""Episode logs: line-delimited JSON, one record per tick plus episode and
level markers, written identically by the experiment runner and the live play
service so both feed the same analyses.

Replay verification re-runs each episode's actions through the engine from
the logged seed and compares state hashes tick by tick.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from ..core.engine import initial_state, step_engine
from ..core.types import Action, GameDescription, GameState


def tick_record(
    step: int,
    level: int,
    episode: int,
    state: GameState,
    action: Action,
    mode: str,
    avatar_class: str,
) -> dict:
    avatar = state.avatar(avatar_class)
    return {
        "type": "tick",
        "step": step,
        "level": level,
        "episode": episode,
        "tick": state.tick,
        "action": action.value,
        "events": [
            [e.affected_class, e.other_class, e.predicate.value] for e in state.events
        ],
        "hash": f"{state.state_hash():016x}",
        "mode": mode,
        "avatar": list(avatar.pos) if avatar is not None else None,
        "score": state.score,
        "status": state.status.value,
    }


@dataclass
class EpisodeLog:
    records: list[dict]

    @classmethod
    def load(cls, path: Path | str) -> "EpisodeLog":
        records = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if line:
                records.append(json.loads(line))
        return cls(records)

    def dump(self, path: Path | str) -> None:
        Path(path).write_text(
            "\n".join(json.dumps(r, separators=(",", ":")) for r in self.records) + "\n"
        )

    @property
    def header(self) -> dict:
        return next(r for r in self.records if r["type"] == "header")

    def ticks(self) -> list[dict]:
        return [r for r in self.records if r["type"] == "tick"]

    def level_events(self) -> list[dict]:
        return [r for r in self.records if r["type"] == "level_event"]

    def search_records(self) -> list[dict]:
        return [r for r in self.records if r["type"] == "search"]

    def episodes(self) -> list[tuple[dict, list[dict]]]:
        out = []
        current = None
        for r in self.records:
            if r["type"] == "episode":
                current = (r, [])
                out.append(current)
            elif r["type"] == "tick" and current is not None:
                current[1].append(r)
        return out


@dataclass
class ReplayResult:
    ok: bool
    first_divergence: Optional[tuple[int, int]] = None  # (episode, tick)

    def __bool__(self) -> bool:
        return self.ok


def verify_replay(log: EpisodeLog, desc: GameDescription) -> ReplayResult:
    """Re-run every logged episode and compare state hashes."""
    for episode_record, ticks in log.episodes():
        state = initial_state(
            desc, episode_record["level"], episode_record["engine_seed"]
        )
        start = f"{state.state_hash():016x}"
        if start != episode_record["start_hash"]:
            return ReplayResult(False, (episode_record["episode"], 0))
        for t in ticks:
            state = step_engine(state, Action(t["action"]), desc)
            if f"{state.state_hash():016x}" != t["hash"]:
                return ReplayResult(False, (episode_record["episode"], t["tick"]))
    return ReplayResult(True)
