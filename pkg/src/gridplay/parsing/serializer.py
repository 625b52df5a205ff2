"""Serialize a GameDescription back to description text.

parse(serialize(d)) is structurally equal to d for any valid description.
"""
from __future__ import annotations

from ..core.types import (
    Comparator,
    DynamicType,
    GameDescription,
    InteractionRule,
    Orientation,
    Outcome,
    Predicate,
    TerminationKind,
    TerminationRule,
)


def serialize_description(desc: GameDescription) -> str:
    lines = ["SpriteSet"]
    for name, dtype in desc.classes.items():
        lines.append(f"    {name} > {_sprite_params(name, dtype, desc)}")
    lines.append("InteractionSet")
    for rule in desc.interaction_set:
        lines.append(f"    {_rule_line(rule)}")
    lines.append("TerminationSet")
    for term in desc.termination_set:
        lines.append(f"    {_termination_line(term)}")
    lines.append("LevelMapping")
    for char, class_id in desc.legend.items():
        lines.append(f"    {char} > {class_id}")
    return "\n".join(lines) + "\n"


def serialize_level(grid: tuple[str, ...]) -> str:
    return "\n".join(grid) + "\n"


def _sprite_params(name: str, dtype: DynamicType, desc: GameDescription) -> str:
    parts = [dtype.vgdl_type.value]
    if dtype.speed != 1:
        parts.append(f"speed={dtype.speed}")
    if dtype.cooldown != 1:
        parts.append(f"cooldown={dtype.cooldown}")
    if dtype.orientation is not Orientation.NONE:
        parts.append(f"orientation={dtype.orientation.value}")
    if dtype.target_class:
        parts.append(f"target={dtype.target_class}")
    if dtype.projectile_class:
        parts.append(f"projectile={dtype.projectile_class}")
    if dtype.lifetime is not None:
        parts.append(f"lifetime={dtype.lifetime}")
    if dtype.spawn_period is not None:
        parts.append(f"period={dtype.spawn_period}")
    if dtype.portal_exit_class:
        parts.append(f"exit={dtype.portal_exit_class}")
    if name in desc.palette:
        parts.append(f"color={desc.palette[name]}")
    return " ".join(parts)


def _rule_line(rule: InteractionRule) -> str:
    parts = [rule.affected_class, rule.other_class, ">", rule.predicate.value]
    if rule.precondition is not None:
        op = ">=" if rule.precondition.comparator is Comparator.AT_LEAST else "<"
        parts.append(f"if={rule.precondition.resource}{op}{rule.precondition.threshold}")
    if rule.resource is not None:
        parts.append(f"resource={rule.resource}")
    if rule.delta != 1:
        parts.append(f"delta={rule.delta}")
    if rule.limit is not None:
        parts.append(f"limit={rule.limit}")
    if rule.score_delta != 0:
        parts.append(f"score={rule.score_delta}")
    if rule.transform_into is not None:
        parts.append(f"into={rule.transform_into}")
    if rule.teleport_exit is not None:
        parts.append(f"exit={rule.teleport_exit}")
    return " ".join(parts)


def _termination_line(term: TerminationRule) -> str:
    win = "True" if term.outcome is Outcome.WIN else "False"
    if term.kind is TerminationKind.TIMEOUT:
        return f"Timeout limit={term.ticks} win={win}"
    return f"SpriteCounter stype={term.class_id} limit={term.target_count} win={win}"
