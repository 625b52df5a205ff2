from .goals import (
    ContactGoal,
    CountZeroGoal,
    ExplorationGoal,
    ExplorationTracker,
    count_zero_goals,
    on_agent_state_changed,
    pending_contact_goals,
)

__all__ = [
    "ContactGoal",
    "CountZeroGoal",
    "ExplorationGoal",
    "ExplorationTracker",
    "count_zero_goals",
    "on_agent_state_changed",
    "pending_contact_goals",
]
