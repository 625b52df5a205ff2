"""Live play sessions: one engine per session, a fixed-cadence tick loop,
color-only frames out, buffered key input in (latest key wins within a tick),
and an episode log identical in shape to the experiment runner's so the
harness ingests human play directly."""
from __future__ import annotations

import asyncio
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from ..core.engine import initial_state, step_engine
from ..core.rng import Rng, _splitmix64
from ..core.types import Action, GameDescription, GameState, Status
from ..harness.episode import EpisodeLog, tick_record
from .protocol import FrameMessage, SessionInfo

DEFAULT_TICK_RATE = 10.0

_KEY_TO_ACTION = {
    "Up": Action.UP,
    "Down": Action.DOWN,
    "Left": Action.LEFT,
    "Right": Action.RIGHT,
    "Space": Action.USE,
}


def color_permutation(classes: list[str], seed: int) -> dict[str, int]:
    """Seeded bijection class -> palette index; fixed for a session."""
    rng = Rng(_splitmix64(seed ^ 0xC0105))
    indices = list(range(len(classes)))
    # Fisher-Yates with the session stream
    for i in range(len(indices) - 1, 0, -1):
        j = rng.randrange(i + 1)
        indices[i], indices[j] = indices[j], indices[i]
    return {c: indices[i] for i, c in enumerate(sorted(classes))}


@dataclass
class Session:
    session_id: str
    participant_id: str
    game_id: str
    desc: GameDescription
    seed: int
    tick_rate: float = DEFAULT_TICK_RATE
    score_visible: bool = False
    max_ticks: Optional[int] = None  # safety stop for abandoned sessions

    level: int = 0
    episode: int = -1
    state: Optional[GameState] = None
    colors: dict[str, int] = field(default_factory=dict)
    pending_key: Optional[str] = None
    records: list[dict] = field(default_factory=list)
    step: int = 0
    game_over: bool = False
    forfeited: bool = False
    survey: Optional[dict] = None
    started_at: float = field(default_factory=time.monotonic)
    tick_times: list[float] = field(default_factory=list)
    subscribers: list = field(default_factory=list)
    task: Optional[asyncio.Task] = None

    @classmethod
    def create(
        cls,
        participant_id: str,
        game_id: str,
        desc: GameDescription,
        seed: int,
        tick_rate: float = DEFAULT_TICK_RATE,
        max_ticks: Optional[int] = None,
    ) -> "Session":
        session = cls(
            session_id=uuid.uuid4().hex[:12],
            participant_id=participant_id,
            game_id=game_id,
            desc=desc,
            seed=seed,
            tick_rate=tick_rate,
            max_ticks=max_ticks,
        )
        session.colors = color_permutation(sorted(desc.classes), seed)
        session.records.append({
            "type": "header",
            "game": game_id,
            "variant": "human",
            "seed": seed,
            "levels": len(desc.levels),
            "participant": participant_id,
            "avatar_class": desc.avatar_class,
            "step_unit": "environment",
        })
        session.reset_level(session.level)
        return session

    def info(self) -> SessionInfo:
        return SessionInfo(
            session_id=self.session_id,
            game_id=self.game_id,
            level_count=len(self.desc.levels),
            width=self.state.width,
            height=self.state.height,
            palette_size=len(self.colors),
            tick_rate=self.tick_rate,
            score_visible=self.score_visible,
        )

    def reset_level(self, level: int) -> None:
        self.level = level
        self.episode += 1
        engine_seed = _splitmix64((self.seed << 1) ^ (self.episode * 0x9E3779B9))
        self.state = initial_state(self.desc, level, engine_seed)
        self.records.append({
            "type": "episode",
            "level": level,
            "episode": self.episode,
            "engine_seed": engine_seed,
            "start_hash": f"{self.state.state_hash():016x}",
        })

    # -- input ---------------------------------------------------------------

    def receive_key(self, key: str) -> None:
        if self.game_over:
            return
        if key == "Forfeit":
            self.forfeited = True
            self.game_over = True
            self.records.append({
                "type": "level_event", "event": "forfeit",
                "level": self.level, "step": self.step,
            })
            return
        if key == "Restart":
            self.records.append({
                "type": "level_event", "event": "restart",
                "level": self.level, "step": self.step,
            })
            self.reset_level(self.level)
            self.pending_key = None
            return
        # movement and fire: latest key in a tick window wins
        self.pending_key = key

    # -- ticking -------------------------------------------------------------

    def advance_tick(self) -> FrameMessage:
        """One environment tick: apply the buffered key (or no-op), log, and
        handle level transitions."""
        action = _KEY_TO_ACTION.get(self.pending_key or "", Action.NOOP)
        self.pending_key = None
        self.step += 1
        self.tick_times.append(time.monotonic())
        state = step_engine(self.state, action, self.desc)
        self.state = state
        self.records.append(tick_record(
            self.step, self.level, self.episode, state, action,
            "human", self.desc.avatar_class,
        ))
        status = state.status
        if status is Status.WIN:
            self.records.append({
                "type": "level_event", "event": "win",
                "level": self.level, "step": self.step,
            })
            if self.level + 1 < len(self.desc.levels):
                self.reset_level(self.level + 1)
            else:
                self.game_over = True
        elif status is Status.LOSS:
            self.records.append({
                "type": "level_event", "event": "loss",
                "level": self.level, "step": self.step,
            })
            self.reset_level(self.level)
        if self.max_ticks is not None and self.step >= self.max_ticks:
            self.game_over = True
        return self.frame()

    def frame(self) -> FrameMessage:
        state = self.state
        grid = [[-1] * state.width for _ in range(state.height)]
        for oid in sorted(state.objects):
            obj = state.objects[oid]
            x, y = obj.pos
            grid[y][x] = self.colors[obj.class_id]
        return FrameMessage(
            tick=state.tick,
            level=self.level,
            status=state.status.value,
            grid=grid,
            score_visible=self.score_visible,
            score=state.score if self.score_visible else None,
            game_over=self.game_over,
        )

    def log(self) -> EpisodeLog:
        records = list(self.records)
        records.append({
            "type": "result",
            "levels_completed": sum(
                1 for r in self.records
                if r["type"] == "level_event" and r["event"] == "win"
            ),
            "steps_taken": self.step,
            "forfeited": self.forfeited,
        })
        return EpisodeLog(records)

    def mean_tick_interval(self) -> Optional[float]:
        if len(self.tick_times) < 2:
            return None
        spans = [
            b - a for a, b in zip(self.tick_times, self.tick_times[1:])
        ]
        return sum(spans) / len(spans)

    async def run(self) -> None:
        """Fixed-cadence loop against a monotonic schedule so drift does not
        accumulate; halts cleanly when the session ends."""
        interval = 1.0 / self.tick_rate
        next_due = time.monotonic() + interval
        while not self.game_over:
            delay = next_due - time.monotonic()
            if delay > 0:
                await asyncio.sleep(delay)
            next_due += interval
            frame = self.advance_tick()
            await self.broadcast(frame)
        await self.broadcast(self.frame())

    async def broadcast(self, frame: FrameMessage) -> None:
        dead = []
        for queue in self.subscribers:
            try:
                queue.put_nowait(frame)
            except asyncio.QueueFull:
                dead.append(queue)
        for queue in dead:
            if queue in self.subscribers:
                self.subscribers.remove(queue)

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue(maxsize=64)
        self.subscribers.append(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        if queue in self.subscribers:
            self.subscribers.remove(queue)
