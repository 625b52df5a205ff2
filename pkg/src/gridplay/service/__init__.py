from .app import create_app, participant_seed
from .protocol import (
    CreateSessionRequest,
    FrameMessage,
    InputMessage,
    SessionInfo,
    SurveyRecord,
    SurveyRequest,
)
from .session import DEFAULT_TICK_RATE, Session, color_permutation

__all__ = [
    "CreateSessionRequest",
    "DEFAULT_TICK_RATE",
    "FrameMessage",
    "InputMessage",
    "Session",
    "SessionInfo",
    "SurveyRecord",
    "SurveyRequest",
    "color_permutation",
    "create_app",
    "participant_seed",
]
