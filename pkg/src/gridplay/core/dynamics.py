"""Per-class motion proposals.

``proposal_distribution`` is the single source of truth for how each dynamic
type moves: the engine samples from it and the model learner scores observed
displacements against it, so the two can never disagree.

An object activates when the upcoming tick is a multiple of its cooldown; on
an activation it is displaced ``speed * cooldown`` whole blocks.  Off
activation every type stays put with probability 1.
"""
from __future__ import annotations

from ..core.types import (
    DIRECTIONS,
    Action,
    DynamicType,
    GameState,
    GridPos,
    ObjectInstance,
    Orientation,
    VgdlType,
)

Distribution = dict[GridPos, float]


def manhattan(a: GridPos, b: GridPos) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _point(pos: GridPos) -> Distribution:
    return {pos: 1.0}


def _shift(pos: GridPos, direction: Orientation, blocks: int) -> GridPos:
    dx, dy = direction.delta
    return (pos[0] + dx * blocks, pos[1] + dy * blocks)


def is_active(dtype: DynamicType, next_tick: int) -> bool:
    return next_tick % dtype.cooldown == 0


def proposal_distribution(
    obj: ObjectInstance,
    dtype: DynamicType,
    state: GameState,
    action: Action | None = None,
) -> Distribution:
    """Distribution over proposed positions for the next tick, before any
    collision handling.  ``action`` must be given exactly for the avatar.

    Proposals may leave the board; edge handling happens at commit time.
    Deterministic types return a point mass.
    """
    t = dtype.vgdl_type
    pos = obj.pos
    next_tick = state.tick + 1

    if dtype.is_avatar:
        if action is None:
            raise ValueError("avatar proposals require an action")
        direction = action.orientation
        if direction is Orientation.NONE:
            return _point(pos)
        return _point(_shift(pos, direction, dtype.blocks_per_activation))

    if action is not None:
        raise ValueError("only the avatar takes actions")

    if t in (
        VgdlType.IMMOVABLE,
        VgdlType.PASSIVE,
        VgdlType.FLICKER,
        VgdlType.SPAWN_POINT,
        VgdlType.PORTAL,
        VgdlType.RESOURCE_PACK,
    ):
        return _point(pos)

    if not is_active(dtype, next_tick):
        return _point(pos)

    blocks = dtype.blocks_per_activation

    if t is VgdlType.MISSILE:
        direction = obj.orientation
        if direction is Orientation.NONE:
            direction = dtype.orientation
        if direction is Orientation.NONE:
            return _point(pos)
        return _point(_shift(pos, direction, blocks))

    if t is VgdlType.RANDOM_NPC:
        options = [pos] + [_shift(pos, d, blocks) for d in DIRECTIONS]
        p = 1.0 / len(options)
        return {opt: p for opt in options}

    if t in (VgdlType.CHASER, VgdlType.FLEEING):
        targets = [
            o.pos for o in state.objects.values()
            if o.class_id == dtype.target_class and o.id != obj.id
        ]
        if not targets:
            return _point(pos)
        candidates = [
            c for c in (_shift(pos, d, blocks) for d in DIRECTIONS)
            if state.in_bounds(c)
        ]
        if not candidates:
            return _point(pos)
        scored = [(min(manhattan(c, tg) for tg in targets), c) for c in candidates]
        best = min(s for s, _ in scored) if t is VgdlType.CHASER else max(
            s for s, _ in scored
        )
        chosen = [c for s, c in scored if s == best]
        p = 1.0 / len(chosen)
        return {c: p for c in chosen}

    raise ValueError(f"unknown dynamic type {t!r}")


def displacement_path(start: GridPos, end: GridPos) -> list[GridPos]:
    """Unit-step cells from ``start`` (exclusive) to ``end`` (inclusive).

    Displacements are always axis-aligned; multi-block moves are checked cell
    by cell so fast objects cannot pass through blockers.
    """
    dx = end[0] - start[0]
    dy = end[1] - start[1]
    if dx != 0 and dy != 0:
        raise ValueError(f"diagonal displacement {start}->{end}")
    steps = abs(dx) + abs(dy)
    if steps == 0:
        return []
    if steps == 1:
        return [end]
    ux = (dx > 0) - (dx < 0)
    uy = (dy > 0) - (dy < 0)
    return [(start[0] + ux * i, start[1] + uy * i) for i in range(1, steps + 1)]


def sample_proposal(
    obj: ObjectInstance,
    dtype: DynamicType,
    state: GameState,
    action: Action | None,
    rng,
) -> GridPos:
    """Draw one proposed position; equivalent to sampling from
    ``proposal_distribution`` with outcomes in sorted order, without building
    the distribution for the common deterministic and random cases."""
    t = dtype.vgdl_type
    pos = obj.pos

    if dtype.is_avatar:
        if action is None:
            raise ValueError("avatar proposals require an action")
        direction = action.orientation
        if direction is Orientation.NONE:
            return pos
        return _shift(pos, direction, dtype.blocks_per_activation)

    if t in (
        VgdlType.IMMOVABLE,
        VgdlType.PASSIVE,
        VgdlType.FLICKER,
        VgdlType.SPAWN_POINT,
        VgdlType.PORTAL,
        VgdlType.RESOURCE_PACK,
    ):
        return pos
    if (state.tick + 1) % dtype.cooldown != 0:
        return pos

    blocks = dtype.blocks_per_activation

    if t is VgdlType.MISSILE:
        direction = obj.orientation
        if direction is Orientation.NONE:
            direction = dtype.orientation
        if direction is Orientation.NONE:
            return pos
        return _shift(pos, direction, blocks)

    if t is VgdlType.RANDOM_NPC:
        x, y = pos
        # sorted order of {stay, left, right, up, down}
        options = (
            (x - blocks, y), (x, y - blocks), (x, y), (x, y + blocks),
            (x + blocks, y),
        )
        return options[rng.randrange(5)]

    dist = proposal_distribution(obj, dtype, state)
    if len(dist) == 1:
        return next(iter(dist))
    options = sorted(dist)
    return options[rng.randrange(len(options))]
