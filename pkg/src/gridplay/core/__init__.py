from .types import (
    EOS,
    Action,
    AgentState,
    Comparator,
    ContactRecord,
    DynamicType,
    EventRecord,
    GameDescription,
    GameState,
    GridPos,
    InteractionRule,
    LevelSpec,
    ObjectInstance,
    Orientation,
    Outcome,
    Precondition,
    Predicate,
    Status,
    TerminationKind,
    TerminationRule,
    VgdlType,
)
from .dynamics import proposal_distribution, manhattan
from .engine import (
    ContractViolation,
    apply_predicate,
    collision_pairs,
    evaluate_termination,
    initial_state,
    step_engine,
)
from .rng import Rng

__all__ = [
    "EOS",
    "Action",
    "AgentState",
    "Comparator",
    "ContactRecord",
    "ContractViolation",
    "DynamicType",
    "EventRecord",
    "GameDescription",
    "GameState",
    "GridPos",
    "InteractionRule",
    "LevelSpec",
    "ObjectInstance",
    "Orientation",
    "Outcome",
    "Precondition",
    "Predicate",
    "Rng",
    "Status",
    "TerminationKind",
    "TerminationRule",
    "VgdlType",
    "apply_predicate",
    "collision_pairs",
    "evaluate_termination",
    "initial_state",
    "manhattan",
    "proposal_distribution",
    "step_engine",
]
