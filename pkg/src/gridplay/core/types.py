"""Domain types for the grid-game engine.

A game is described by class-level dynamics (how each object class moves on
its own), an ordered list of interaction rules (what happens when two objects
touch), and an ordered list of termination rules.  Positions are integer
block coordinates; (0, 0) is the top-left corner, x grows right, y grows
down.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

GridPos = tuple[int, int]

# Reserved pseudo-class for the screen edge, usable as the other class of an
# interaction rule.
EOS = "EOS"


class Orientation(str, Enum):
    UP = "Up"
    DOWN = "Down"
    LEFT = "Left"
    RIGHT = "Right"
    NONE = "None"

    @property
    def delta(self) -> GridPos:
        return _ORIENT_DELTAS[self]

    @property
    def opposite(self) -> "Orientation":
        return _OPPOSITES[self]


_ORIENT_DELTAS = {
    Orientation.UP: (0, -1),
    Orientation.DOWN: (0, 1),
    Orientation.LEFT: (-1, 0),
    Orientation.RIGHT: (1, 0),
    Orientation.NONE: (0, 0),
}
_OPPOSITES = {
    Orientation.UP: Orientation.DOWN,
    Orientation.DOWN: Orientation.UP,
    Orientation.LEFT: Orientation.RIGHT,
    Orientation.RIGHT: Orientation.LEFT,
    Orientation.NONE: Orientation.NONE,
}

DIRECTIONS = (Orientation.UP, Orientation.DOWN, Orientation.LEFT, Orientation.RIGHT)


class Action(str, Enum):
    UP = "Up"
    DOWN = "Down"
    LEFT = "Left"
    RIGHT = "Right"
    USE = "Use"
    NOOP = "NoOp"

    @property
    def orientation(self) -> Orientation:
        if self in (Action.USE, Action.NOOP):
            return Orientation.NONE
        return Orientation(self.value)


class VgdlType(str, Enum):
    IMMOVABLE = "Immovable"
    PASSIVE = "Passive"
    MISSILE = "Missile"
    RANDOM_NPC = "RandomNPC"
    CHASER = "Chaser"
    FLEEING = "Fleeing"
    FLICKER = "Flicker"
    SPAWN_POINT = "SpawnPoint"
    PORTAL = "Portal"
    RESOURCE_PACK = "ResourcePack"
    MOVING_AVATAR = "MovingAvatar"
    SHOOT_AVATAR = "ShootAvatar"


MOVING_TYPES = frozenset(
    {VgdlType.MISSILE, VgdlType.RANDOM_NPC, VgdlType.CHASER, VgdlType.FLEEING}
)
AVATAR_TYPES = frozenset({VgdlType.MOVING_AVATAR, VgdlType.SHOOT_AVATAR})


import functools


@functools.lru_cache(maxsize=None)
def _blocks_cached(num: int, den: int, cooldown: int) -> int:
    if (num * cooldown) % den != 0:
        raise ValueError(f"speed {num}/{den} x cooldown {cooldown} is not integral")
    return (num * cooldown) // den


def _blocks_per_activation(speed: Fraction, cooldown: int) -> int:
    return _blocks_cached(speed.numerator, speed.denominator, cooldown)


class Predicate(str, Enum):
    STEP_BACK = "stepBack"
    BOUNCE_FORWARD = "bounceForward"
    REVERSE_DIRECTION = "reverseDirection"
    TURN_AROUND = "turnAround"
    WRAP_AROUND = "wrapAround"
    PULL_WITH_IT = "pullWithIt"
    UNDO_ALL = "undoAll"
    COLLECT_RESOURCE = "collectResource"
    CHANGE_RESOURCE = "changeResource"
    CHANGE_SCORE = "changeScore"
    TELEPORT = "teleport"
    CLONE = "clone"
    DESTROY = "destroy"
    TRANSFORM = "transform"


class Comparator(str, Enum):
    LESS_THAN = "LessThan"
    AT_LEAST = "AtLeast"


@dataclass(frozen=True, slots=True)
class Precondition:
    """Resource-count test against the avatar's inventory.

    A missing resource counts as 0.
    """

    resource: str
    comparator: Comparator
    threshold: int

    def holds(self, resources: dict[str, int]) -> bool:
        count = resources.get(self.resource, 0)
        if self.comparator is Comparator.AT_LEAST:
            return count >= self.threshold
        return count < self.threshold

    def describe(self) -> str:
        op = ">=" if self.comparator is Comparator.AT_LEAST else "<"
        return f"{self.resource}{op}{self.threshold}"


@dataclass(frozen=True, slots=True)
class DynamicType:
    """Class-level motion parameters.

    Only the fields applicable to ``vgdl_type`` are set.  ``speed`` is blocks
    per active tick; an object activates every ``cooldown`` ticks and moves
    ``speed * cooldown`` blocks per activation, which must be integral.
    """

    vgdl_type: VgdlType
    speed: Fraction = Fraction(1)
    orientation: Orientation = Orientation.NONE
    cooldown: int = 1
    target_class: Optional[str] = None
    projectile_class: Optional[str] = None
    lifetime: Optional[int] = None
    spawn_period: Optional[int] = None
    portal_exit_class: Optional[str] = None

    @property
    def blocks_per_activation(self) -> int:
        return _blocks_per_activation(self.speed, self.cooldown)

    @property
    def moves(self) -> bool:
        return self.vgdl_type in MOVING_TYPES

    @property
    def is_avatar(self) -> bool:
        return self.vgdl_type in AVATAR_TYPES

    def validate(self) -> list[str]:
        """Return invariant violations ('' when fine)."""
        problems = []
        t = self.vgdl_type
        if self.speed <= 0:
            problems.append("speed must be positive")
        if self.cooldown < 1:
            problems.append("cooldown must be >= 1")
        if t in (VgdlType.CHASER, VgdlType.FLEEING) and not self.target_class:
            problems.append(f"{t.value} needs target_class")
        if t not in (VgdlType.CHASER, VgdlType.FLEEING) and self.target_class:
            problems.append("target_class only applies to Chaser/Fleeing")
        if t in (VgdlType.SHOOT_AVATAR, VgdlType.SPAWN_POINT) and not self.projectile_class:
            problems.append(f"{t.value} needs projectile_class")
        if (
            t not in (VgdlType.SHOOT_AVATAR, VgdlType.SPAWN_POINT)
            and self.projectile_class
        ):
            problems.append("projectile_class only applies to ShootAvatar/SpawnPoint")
        if t is VgdlType.FLICKER and (self.lifetime is None or self.lifetime < 1):
            problems.append("Flicker needs lifetime >= 1")
        if t is not VgdlType.FLICKER and self.lifetime is not None:
            problems.append("lifetime only applies to Flicker")
        if t is VgdlType.SPAWN_POINT and (self.spawn_period is None or self.spawn_period < 1):
            problems.append("SpawnPoint needs spawn_period >= 1")
        if t is not VgdlType.SPAWN_POINT and self.spawn_period is not None:
            problems.append("spawn_period only applies to SpawnPoint")
        if t is VgdlType.PORTAL and not self.portal_exit_class:
            problems.append("Portal needs portal_exit_class")
        if t is not VgdlType.PORTAL and self.portal_exit_class:
            problems.append("portal_exit_class only applies to Portal")
        if self.vgdl_type in MOVING_TYPES or self.is_avatar:
            step = self.speed * self.cooldown
            if step.denominator != 1:
                problems.append("speed x cooldown must be an integer displacement")
        return problems


ALWAYS = None  # always-true precondition marker


@dataclass(frozen=True, slots=True)
class InteractionRule:
    """(affected, other, predicate, precondition): applied to an object of
    ``affected_class`` when it touches an object of ``other_class``."""

    affected_class: str
    other_class: str
    predicate: Predicate
    precondition: Optional[Precondition] = ALWAYS
    resource: Optional[str] = None
    delta: int = 1
    limit: Optional[int] = None
    score_delta: int = 0
    transform_into: Optional[str] = None
    teleport_exit: Optional[str] = None

    def event_key(self) -> tuple[str, str, Predicate]:
        return (self.affected_class, self.other_class, self.predicate)

    def pair_key(self) -> tuple[str, str]:
        a, b = self.affected_class, self.other_class
        return (a, b) if a <= b else (b, a)


class Outcome(str, Enum):
    WIN = "Win"
    LOSS = "Loss"


class TerminationKind(str, Enum):
    COUNT_REACHES = "CountReaches"
    TIMEOUT = "Timeout"


@dataclass(frozen=True, slots=True)
class TerminationRule:
    kind: TerminationKind
    outcome: Outcome
    class_id: Optional[str] = None
    target_count: int = 0
    ticks: Optional[int] = None

    def describe(self) -> str:
        if self.kind is TerminationKind.TIMEOUT:
            return f"Timeout({self.ticks})->{self.outcome.value}"
        return f"count({self.class_id})=={self.target_count}->{self.outcome.value}"


@dataclass(frozen=True)
class LevelSpec:
    grid: tuple[str, ...]
    legend: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    @property
    def width(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @property
    def height(self) -> int:
        return len(self.grid)


@dataclass
class GameDescription:
    """Full game model: both the ground truth run by the engine and the
    hypothesis object produced by the model learner."""

    classes: dict[str, DynamicType]
    avatar_class: str
    interaction_set: list[InteractionRule]
    termination_set: list[TerminationRule]
    levels: list[LevelSpec] = field(default_factory=list)
    palette: dict[str, str] = field(default_factory=dict)
    resource_capacities: dict[str, int] = field(default_factory=dict)
    legend: dict[str, str] = field(default_factory=dict)

    def validate(self) -> list[str]:
        problems = []
        if self.avatar_class not in self.classes:
            problems.append(f"avatar class {self.avatar_class!r} is not defined")
        avatars = [c for c, d in self.classes.items() if d.is_avatar]
        if len(avatars) != 1:
            problems.append(f"expected exactly one avatar class, got {avatars}")
        for name, dtype in self.classes.items():
            for issue in dtype.validate():
                problems.append(f"class {name!r}: {issue}")
            for ref in (dtype.target_class, dtype.projectile_class, dtype.portal_exit_class):
                if ref is not None and ref not in self.classes:
                    problems.append(f"class {name!r} references undefined class {ref!r}")
        for rule in self.interaction_set:
            if rule.affected_class not in self.classes:
                problems.append(f"rule references undefined class {rule.affected_class!r}")
            if rule.other_class != EOS and rule.other_class not in self.classes:
                problems.append(f"rule references undefined class {rule.other_class!r}")
            if rule.predicate is Predicate.TRANSFORM and rule.transform_into not in self.classes:
                problems.append(
                    f"transform rule targets undefined class {rule.transform_into!r}"
                )
            if (
                rule.predicate is Predicate.TELEPORT
                and rule.teleport_exit is not None
                and rule.teleport_exit not in self.classes
            ):
                problems.append(
                    f"teleport rule targets undefined class {rule.teleport_exit!r}"
                )
        for term in self.termination_set:
            if term.kind is TerminationKind.COUNT_REACHES and term.class_id not in self.classes:
                problems.append(
                    f"termination references undefined class {term.class_id!r}"
                )
        for i, level in enumerate(self.levels):
            widths = {len(row) for row in level.grid}
            if len(widths) > 1:
                problems.append(f"level {i} is not rectangular")
        return problems


@dataclass(slots=True)
class ObjectInstance:
    """One object on the board.  Ids are unique per episode, never reused."""

    id: int
    class_id: str
    pos: GridPos
    orientation: Orientation = Orientation.NONE
    age_ticks: int = 0
    remaining_lifetime: Optional[int] = None

    def clone(self) -> "ObjectInstance":
        return ObjectInstance(
            self.id, self.class_id, self.pos, self.orientation,
            self.age_ticks, self.remaining_lifetime,
        )


@dataclass(frozen=True, slots=True)
class EventRecord:
    """A rule firing: predicate applied to ``affected`` on contact with
    ``other`` (ids; other_id is None for the screen edge).

    The effect parameters are part of the record because they are visible
    state changes (inventory and score deltas, what an object turned into,
    where a teleport landed).
    """

    affected_class: str
    other_class: str
    predicate: Predicate
    affected_id: int
    other_id: Optional[int]
    resource: Optional[str] = None
    delta: int = 1
    limit: Optional[int] = None
    score_delta: int = 0
    transform_into: Optional[str] = None
    teleport_exit: Optional[str] = None

    def event_key(self) -> tuple[str, str, Predicate]:
        return (self.affected_class, self.other_class, self.predicate)

    def pair_key(self) -> tuple[str, str]:
        a, b = self.affected_class, self.other_class
        return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, slots=True)
class ContactRecord:
    """Two instances in contact this tick (or one instance against the
    screen edge), whether or not any rule fired."""

    class_a: str
    class_b: str
    id_a: int
    id_b: Optional[int]  # None for EOS

    def pair_key(self) -> tuple[str, str]:
        a, b = self.class_a, self.class_b
        return (a, b) if a <= b else (b, a)


class Status(str, Enum):
    CONTINUE = "Continue"
    WIN = "Win"
    LOSS = "Loss"


@dataclass(slots=True)
class AgentState:
    resources: dict[str, int] = field(default_factory=dict)

    def clone(self) -> "AgentState":
        return AgentState(dict(self.resources))

    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted((k, v) for k, v in self.resources.items() if v != 0))

    def add(self, resource: str, delta: int, capacity: Optional[int]) -> None:
        value = self.resources.get(resource, 0) + delta
        if value < 0:
            value = 0
        if capacity is not None and value > capacity:
            value = capacity
        self.resources[resource] = value


@dataclass(slots=True)
class GameState:
    tick: int
    width: int
    height: int
    objects: dict[int, ObjectInstance]
    agent_state: AgentState
    score: int = 0
    status: Status = Status.CONTINUE
    events: tuple[EventRecord, ...] = ()
    contacts: tuple[ContactRecord, ...] = ()
    rng_state: tuple[int, int] = (0, 0)
    next_id: int = 0
    fired_termination: Optional[TerminationRule] = None
    counts: dict[str, int] = field(default_factory=dict)
    occupancy: dict[GridPos, tuple[int, ...]] = field(default_factory=dict)
    ids_by_class: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # the engine maintains these indices incrementally; derive them here
        # for states assembled by hand
        if self.objects and not self.counts:
            for obj in self.objects.values():
                self.counts[obj.class_id] = self.counts.get(obj.class_id, 0) + 1
        if self.objects and not self.occupancy:
            cells: dict[GridPos, list[int]] = {}
            by_class: dict[str, list[int]] = {}
            for oid in sorted(self.objects):
                obj = self.objects[oid]
                cells.setdefault(obj.pos, []).append(oid)
                by_class.setdefault(obj.class_id, []).append(oid)
            self.occupancy = {pos: tuple(ids) for pos, ids in cells.items()}
            self.ids_by_class = {c: tuple(ids) for c, ids in by_class.items()}

    def clone(self) -> "GameState":
        """Cheap clone: dicts are copied shallowly; object instances and
        index tuples are shared.  The engine copies an instance before its
        first mutation in a tick (copy-on-write), so parent states are never
        disturbed."""
        return GameState(
            tick=self.tick,
            width=self.width,
            height=self.height,
            objects=dict(self.objects),
            agent_state=self.agent_state.clone(),
            score=self.score,
            status=self.status,
            events=self.events,
            contacts=self.contacts,
            rng_state=self.rng_state,
            next_id=self.next_id,
            fired_termination=self.fired_termination,
            counts=dict(self.counts),
            occupancy=dict(self.occupancy),
            ids_by_class=dict(self.ids_by_class),
        )

    def in_bounds(self, pos: GridPos) -> bool:
        return 0 <= pos[0] < self.width and 0 <= pos[1] < self.height

    def instances_of(self, class_id: str) -> list[ObjectInstance]:
        return [self.objects[oid] for oid in self.ids_by_class.get(class_id, ())]

    def count(self, class_id: str) -> int:
        return self.counts.get(class_id, 0)

    def class_counts(self) -> dict[str, int]:
        return self.counts

    def avatar(self, avatar_class: str) -> Optional[ObjectInstance]:
        ids = self.ids_by_class.get(avatar_class)
        if not ids:
            return None
        return self.objects[ids[0]]

    def state_hash(self) -> int:
        """Stable 64-bit hash over object layout, inventory, score, tick."""
        return self._hash_with(self.tick)

    def layout_hash(self) -> int:
        """Like state_hash but tick-free: equal iff the board would present
        the same decision problem again."""
        return self._hash_with(None)

    def _hash_with(self, tick) -> int:
        h = hashlib.blake2b(digest_size=8)
        for oid in sorted(self.objects):
            obj = self.objects[oid]
            h.update(
                f"{oid}|{obj.class_id}|{obj.pos[0]}|{obj.pos[1]}|{obj.orientation.value};".encode()
            )
        h.update(repr(self.agent_state.signature()).encode())
        h.update(f"|{self.score}|{tick}".encode())
        return int.from_bytes(h.digest(), "big")


def fresh_dynamic_type(vgdl_type: VgdlType, **kwargs) -> DynamicType:
    return DynamicType(vgdl_type=vgdl_type, **kwargs)


def replace_dtype(dtype: DynamicType, **kwargs) -> DynamicType:
    return replace(dtype, **kwargs)
