from .hypotheses import (
    DynamicTypePosterior,
    ModelInadequacy,
    enumerate_dynamic_type_space,
    object_step_likelihood,
)
from .learner import GameModelLearner, LearnerPriors, priors_from_description
from .likelihood import (
    DEFAULT_EVENT_NOISE,
    Observation,
    goal_factor,
    interaction_factor,
    interaction_likelihood_step,
    object_factor,
    tick_log_likelihood,
    trace_log_likelihood,
)
from .rules import RuleSetMAP, explain_event, implications, update_interaction_rules
from .terminations import TerminationCandidates

__all__ = [
    "DEFAULT_EVENT_NOISE",
    "DynamicTypePosterior",
    "GameModelLearner",
    "LearnerPriors",
    "ModelInadequacy",
    "Observation",
    "RuleSetMAP",
    "TerminationCandidates",
    "enumerate_dynamic_type_space",
    "explain_event",
    "goal_factor",
    "implications",
    "interaction_factor",
    "interaction_likelihood_step",
    "object_factor",
    "object_step_likelihood",
    "priors_from_description",
    "tick_log_likelihood",
    "trace_log_likelihood",
    "update_interaction_rules",
]
