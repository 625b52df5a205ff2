from .controller import (
    AgentConfig,
    ControllerState,
    Decision,
    PlanningAgent,
    PredictionCheck,
    RESTART_LEVEL,
    RandomAgent,
    loss_signature,
    prediction_error_check,
)
from .variants import VARIANTS, agent_config, make_agent

__all__ = [
    "AgentConfig",
    "ControllerState",
    "Decision",
    "PlanningAgent",
    "PredictionCheck",
    "RESTART_LEVEL",
    "RandomAgent",
    "VARIANTS",
    "agent_config",
    "loss_signature",
    "make_agent",
    "prediction_error_check",
]
