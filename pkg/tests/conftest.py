from __future__ import annotations

import pytest

from gridplay.core import (
    Action,
    DynamicType,
    GameDescription,
    InteractionRule,
    LevelSpec,
    Orientation,
    Outcome,
    Precondition,
    Predicate,
    TerminationKind,
    TerminationRule,
    VgdlType,
    Comparator,
)


def make_description(
    classes: dict[str, DynamicType],
    rules: list[InteractionRule],
    terminations: list[TerminationRule],
    grid: tuple[str, ...],
    legend: dict[str, str],
    capacities: dict[str, int] | None = None,
) -> GameDescription:
    avatar = next(c for c, d in classes.items() if d.is_avatar)
    desc = GameDescription(
        classes=classes,
        avatar_class=avatar,
        interaction_set=rules,
        termination_set=terminations,
        levels=[LevelSpec(grid=grid, legend=legend)],
        resource_capacities=capacities or {},
        legend=legend,
    )
    assert desc.validate() == []
    return desc


@pytest.fixture
def keydoor_desc() -> GameDescription:
    """Avatar picks up a key, then the door opens; walls block."""
    classes = {
        "avatar": DynamicType(VgdlType.MOVING_AVATAR),
        "wall": DynamicType(VgdlType.IMMOVABLE),
        "key": DynamicType(VgdlType.RESOURCE_PACK),
        "door": DynamicType(VgdlType.IMMOVABLE),
    }
    rules = [
        InteractionRule("avatar", "wall", Predicate.STEP_BACK),
        InteractionRule("key", "avatar", Predicate.COLLECT_RESOURCE, resource="key"),
        InteractionRule(
            "door", "avatar", Predicate.DESTROY,
            precondition=Precondition("key", Comparator.AT_LEAST, 1),
        ),
        InteractionRule(
            "avatar", "door", Predicate.STEP_BACK,
            precondition=Precondition("key", Comparator.LESS_THAN, 1),
        ),
    ]
    terminations = [
        TerminationRule(TerminationKind.COUNT_REACHES, Outcome.WIN, "door", 0),
    ]
    return make_description(
        classes, rules, terminations,
        grid=("wwwwww", "wA.k.w", "w....w", "w..d.w", "wwwwww"),
        legend={"A": "avatar", "w": "wall", "k": "key", "d": "door"},
    )
