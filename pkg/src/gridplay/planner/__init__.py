from .novelty import AtomTable, PositionPenalty, atoms_of, location_tracked_classes, penalty_alpha, volatile_classes
from .rewards import (
    RewardConfig,
    count_progress_reward,
    dangerous_classes,
    destroyer_classes,
    intrinsic_value,
    proximity_reward,
    resource_milestones,
    LOSS_VALUE,
    WIN_VALUE,
)
from .search import (
    LONG_TERM_INITIAL_BUDGET,
    Plan,
    PlannerConfig,
    PlannerMode,
    SHORT_TERM_BUDGETS,
    STALL_BUDGET,
    SearchTrace,
    available_actions,
    plan,
)

__all__ = [
    "AtomTable",
    "LONG_TERM_INITIAL_BUDGET",
    "LOSS_VALUE",
    "Plan",
    "PlannerConfig",
    "PlannerMode",
    "PositionPenalty",
    "RewardConfig",
    "SHORT_TERM_BUDGETS",
    "STALL_BUDGET",
    "SearchTrace",
    "WIN_VALUE",
    "atoms_of",
    "available_actions",
    "count_progress_reward",
    "dangerous_classes",
    "destroyer_classes",
    "intrinsic_value",
    "location_tracked_classes",
    "penalty_alpha",
    "plan",
    "proximity_reward",
    "resource_milestones",
]
