"""Width-1 novelty pruning and the repeated-position penalty.

A state survives only if it makes some atom true for the first time in this
search.  Atoms: per-object presence, per-object location, and the avatar's
(x, y, orientation) pose.  Location atoms are not generated for objects the
model believes move randomly, for short-lived objects, or for the avatar's
own projectiles, so their churn cannot flood the table with false novelty.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core.types import GameDescription, GameState, Predicate, VgdlType

SHORT_LIFETIME_TICKS = 50  # ~5 seconds at the nominal 10 ticks/second

# predicates that can change the affected object's position or existence
_VOLATILE_PREDICATES = frozenset(
    p for p in Predicate
    if p not in (Predicate.CHANGE_RESOURCE, Predicate.CHANGE_SCORE,
                 Predicate.REVERSE_DIRECTION)
)


def volatile_classes(model: GameDescription) -> set[str]:
    """Classes whose instances can ever move, appear, or disappear under the
    model.  Everything else contributes constant atoms in every state of a
    search, so novelty never needs to look at it."""
    out: set[str] = set()
    for cid, dtype in model.classes.items():
        if dtype.moves or dtype.is_avatar or dtype.vgdl_type in (
            VgdlType.FLICKER, VgdlType.SPAWN_POINT,
        ):
            out.add(cid)
        if dtype.vgdl_type is VgdlType.SPAWN_POINT and dtype.projectile_class:
            out.add(dtype.projectile_class)
        if dtype.projectile_class:
            out.add(dtype.projectile_class)
    for rule in model.interaction_set:
        if rule.predicate in _VOLATILE_PREDICATES:
            out.add(rule.affected_class)
        if rule.transform_into:
            out.add(rule.transform_into)
    return out

Atom = int

# orientation codes for packed location atoms
_ORIENT_CODE = {o: i for i, o in enumerate(
    ("Up", "Down", "Left", "Right", "None")
)}
_LOCATION_BASE = 1 << 40


def location_tracked_classes(model: GameDescription) -> set[str]:
    tracked: set[str] = set()
    avatar_dtype = model.classes.get(model.avatar_class)
    projectile = avatar_dtype.projectile_class if avatar_dtype else None
    for class_id, dtype in model.classes.items():
        if class_id == projectile:
            continue
        if dtype.vgdl_type is VgdlType.RANDOM_NPC:
            continue
        if (
            dtype.vgdl_type is VgdlType.FLICKER
            and (dtype.lifetime or 0) < SHORT_LIFETIME_TICKS
        ):
            continue
        tracked.add(class_id)
    return tracked


def atoms_of(
    state: GameState,
    avatar_class: str,
    tracked: set[str],
    universe_ids: frozenset[int],
    projectile_class: str | None = None,
    volatile: set[str] | None = None,
) -> list[Atom]:
    """Packed ints: presence = oid*2 + alive; location = BASE + a mixed-radix
    encoding of (oid, x, y, orientation).  Orientation only discriminates for
    the avatar; other objects use a fixed code.

    Objects of classes that can never change are skipped (their atoms would
    be identical in every state), and the avatar's own projectiles generate
    no atoms at all: every shot is a fresh instance, and treating each one
    as novel would let the search spend its whole budget firing.
    """
    atoms: list[Atom] = []
    add = atoms.append
    w, h = state.width, state.height
    objects = state.objects
    for oid in universe_ids:
        if oid not in objects:
            add(oid * 2)
    if volatile is None:
        class_ids = state.ids_by_class.keys()
    else:
        class_ids = volatile
    for cid in class_ids:
        if cid == projectile_class:
            continue
        if cid == avatar_class:
            is_avatar = True
            located = True
        else:
            is_avatar = False
            located = cid in tracked
        for oid in state.ids_by_class.get(cid, ()):
            add(oid * 2 + 1)
            if not located:
                continue
            obj = objects[oid]
            orient = _ORIENT_CODE[obj.orientation.value] if is_avatar else 4
            add(
                _LOCATION_BASE
                + (((oid * h + obj.pos[1]) * w + obj.pos[0]) * 5)
                + orient
            )
    return atoms


@dataclass
class AtomTable:
    """Atoms made true at some point in one search; reset per plan call."""

    avatar_class: str
    tracked: set[str]
    universe_ids: frozenset[int]
    projectile_class: str | None = None
    volatile: set[str] | None = None
    seen: set[Atom] = field(default_factory=set)

    def is_novel(self, state: GameState) -> bool:
        """True iff the state contributes a first-time atom; its atoms are
        folded into the table either way."""
        atoms = atoms_of(
            state, self.avatar_class, self.tracked, self.universe_ids,
            self.projectile_class, self.volatile,
        )
        novel = False
        for atom in atoms:
            if atom not in self.seen:
                self.seen.add(atom)
                novel = True
        return novel


@dataclass
class PositionPenalty:
    """alpha * n^2 for the n-th node at the same avatar pose this search;
    alpha is steep when other things move (waiting can be informative) and
    mild in static worlds."""

    alpha: float
    counts: dict = field(default_factory=dict)

    def charge(self, state: GameState, avatar_class: str) -> float:
        avatar = state.avatar(avatar_class)
        if avatar is None:
            return 0.0
        pose = (avatar.pos[0], avatar.pos[1], avatar.orientation)
        n = self.counts.get(pose, 0) + 1
        self.counts[pose] = n
        return self.alpha * n * n


def penalty_alpha(model: GameDescription, root: GameState) -> float:
    counts = root.class_counts()
    for class_id, dtype in model.classes.items():
        if class_id == model.avatar_class:
            continue
        if dtype.moves and counts.get(class_id, 0) > 0:
            return -10.0
    return -1.0
