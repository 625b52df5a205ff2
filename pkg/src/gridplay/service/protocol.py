"""Wire messages for live play.

Frames carry a grid of palette indices only: class identity never crosses
the wire, and each session's palette is a seeded permutation, so color
carries no cross-participant meaning.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

PROTOCOL_VERSION = 1

KEYS = ("Up", "Down", "Left", "Right", "Space", "Restart", "Forfeit")


class CreateSessionRequest(BaseModel):
    participant_id: str = Field(min_length=1, max_length=64)
    game_id: str
    tick_rate: Optional[float] = Field(default=None, gt=0, le=60)


class SessionInfo(BaseModel):
    session_id: str
    game_id: str
    level_count: int
    width: int
    height: int
    palette_size: int
    tick_rate: float
    score_visible: bool
    protocol_version: int = PROTOCOL_VERSION


class FrameMessage(BaseModel):
    type: Literal["frame"] = "frame"
    tick: int
    level: int
    status: Literal["Continue", "Win", "Loss"]
    grid: list[list[int]]  # palette index per cell, -1 = empty
    score_visible: bool
    score: Optional[int] = None
    game_over: bool = False


class InputMessage(BaseModel):
    type: Literal["input"] = "input"
    key: Literal["Up", "Down", "Left", "Right", "Space", "Restart", "Forfeit"]


class SurveyRequest(BaseModel):
    played_before: bool
    difficulty: int = Field(ge=1, le=7)
    interest: int = Field(ge=1, le=7)


class SurveyRecord(BaseModel):
    session_id: str
    played_before: bool
    difficulty: int
    interest: int
    excluded: bool
    resubmission: bool = False
