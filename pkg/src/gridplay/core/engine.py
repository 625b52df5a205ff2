"""Deterministic forward simulator.

One tick runs: motion proposals (consuming the seeded stream in object-id
order) -> flicker expiry -> spawns -> sub-step commit -> collision rounds
(rules applied in listed order per pair) -> termination check.

Contacts are recorded for every colliding pair, with or without a matching
rule; events are recorded only when a rule fires.  A pair fires its rules at
most once per tick.  Effects can create new overlaps (a pushed box landing on
a wall), so pair detection is re-run in cascade rounds until no unprocessed
pair remains.

States are cloned copy-on-write: instances are shared between parent and
child states and copied just before their first mutation of the tick, which
keeps tree search over imagined futures cheap.
"""
from __future__ import annotations

from typing import Optional

from .dynamics import displacement_path, proposal_distribution, sample_proposal
from .rng import Rng
from .types import (
    EOS,
    Action,
    AgentState,
    ContactRecord,
    DynamicType,
    EventRecord,
    GameDescription,
    GameState,
    GridPos,
    InteractionRule,
    ObjectInstance,
    Orientation,
    Outcome,
    Predicate,
    Status,
    TerminationKind,
    TerminationRule,
    VgdlType,
)

CASCADE_ROUNDS = 10

_CLONE_ORDER = (Orientation.UP, Orientation.DOWN, Orientation.LEFT, Orientation.RIGHT)


class ContractViolation(Exception):
    pass


def initial_state(desc: GameDescription, level_index: int, seed: int) -> GameState:
    level = desc.levels[level_index]
    legend = level.legend or desc.legend
    state = GameState(
        tick=0,
        width=level.width,
        height=level.height,
        objects={},
        agent_state=AgentState(),
        rng_state=Rng(seed).state(),
    )
    next_id = 0
    for y, row in enumerate(level.grid):
        for x, ch in enumerate(row):
            if ch in (".", " "):
                continue
            class_id = legend.get(ch)
            if class_id is None:
                raise ContractViolation(f"level char {ch!r} missing from legend")
            _spawn(state, desc, class_id, (x, y), next_id)
            next_id += 1
    state.next_id = next_id
    return state


def _spawn(
    state: GameState,
    desc: GameDescription,
    class_id: str,
    pos: GridPos,
    oid: int,
    orientation: Optional[Orientation] = None,
) -> ObjectInstance:
    dtype = desc.classes[class_id]
    obj = ObjectInstance(
        id=oid,
        class_id=class_id,
        pos=pos,
        orientation=orientation if orientation is not None else dtype.orientation,
        remaining_lifetime=dtype.lifetime if dtype.vgdl_type is VgdlType.FLICKER else None,
    )
    state.objects[oid] = obj
    state.counts[class_id] = state.counts.get(class_id, 0) + 1
    state.occupancy[pos] = state.occupancy.get(pos, ()) + (oid,)
    state.ids_by_class[class_id] = state.ids_by_class.get(class_id, ()) + (oid,)
    return obj


def _sample(rng: Rng, dist: dict[GridPos, float]) -> GridPos:
    if len(dist) == 1:
        return next(iter(dist))
    options = sorted(dist)
    # all stochastic proposals are uniform over their support
    return options[rng.randrange(len(options))]


class _Tick:
    """Mutable context for one engine tick.  The state's occupancy and
    per-class id indices were freshly (shallowly) copied by clone, so they
    may be updated in place here."""

    __slots__ = (
        "ns", "desc", "rng", "prev_pos", "events", "contacts",
        "owned", "effects_moved", "start_resources",
    )

    def __init__(self, ns: GameState, desc: GameDescription, rng: Rng):
        self.ns = ns
        self.desc = desc
        self.rng = rng
        # pre-tick positions, recorded lazily on an object's first move; an
        # object absent from the map has not moved this tick
        self.prev_pos: dict[int, GridPos] = {}
        self.events: list[EventRecord] = []
        self.contacts: list[ContactRecord] = []
        self.owned: set[int] = set()
        self.effects_moved = False
        # preconditions are judged against the inventory as the tick began,
        # so the outcome of a contact cannot depend on rule listing order
        self.start_resources = dict(ns.agent_state.resources)

    def own(self, oid: int) -> ObjectInstance:
        """Instance ready for mutation (copied once per tick)."""
        obj = self.ns.objects[oid]
        if oid not in self.owned:
            obj = obj.clone()
            self.ns.objects[oid] = obj
            self.owned.add(oid)
        return obj

    def spawn(self, class_id: str, pos: GridPos,
              orientation: Optional[Orientation] = None) -> ObjectInstance:
        obj = _spawn(self.ns, self.desc, class_id, pos, self.ns.next_id, orientation)
        self.ns.next_id += 1
        self.owned.add(obj.id)
        return obj

    def move_to(self, oid: int, pos: GridPos) -> None:
        obj = self.own(oid)
        occ = self.ns.occupancy
        old = obj.pos
        if oid not in self.prev_pos:
            self.prev_pos[oid] = old
        cell = occ.get(old)
        if cell is not None:
            remaining = tuple(x for x in cell if x != oid)
            if remaining:
                occ[old] = remaining
            else:
                del occ[old]
        obj.pos = pos
        occ[pos] = occ.get(pos, ()) + (oid,)

    def remove(self, oid: int) -> None:
        ns = self.ns
        obj = ns.objects.pop(oid)
        ns.counts[obj.class_id] -= 1
        ns.ids_by_class[obj.class_id] = tuple(
            x for x in ns.ids_by_class[obj.class_id] if x != oid
        )
        cell = ns.occupancy.get(obj.pos)
        if cell is not None:
            remaining = tuple(x for x in cell if x != oid)
            if remaining:
                ns.occupancy[obj.pos] = remaining
            else:
                del ns.occupancy[obj.pos]


def step_engine(state: GameState, action: Action, desc: GameDescription) -> GameState:
    """Advance one tick.  Raises ContractViolation on a terminated state."""
    if state.status is not Status.CONTINUE:
        raise ContractViolation("cannot step a terminated state")

    ns = state.clone()
    ns.events = ()
    ns.contacts = ()
    ns.fired_termination = None
    rng = Rng.from_state(ns.rng_state)
    ctx = _Tick(ns, desc, rng)
    next_tick = ns.tick + 1

    avatar = ns.avatar(desc.avatar_class)
    if avatar is not None and action.orientation is not Orientation.NONE:
        if avatar.orientation is not action.orientation:
            avatar = ctx.own(avatar.id)
            avatar.orientation = action.orientation

    mover_classes, flicker_classes, spawner_classes = _class_flags(desc)
    occupancy = ns.occupancy
    by_class = ns.ids_by_class
    mover_ids = _gather(by_class, mover_classes)
    flicker_ids = _gather(by_class, flicker_classes)
    spawner_ids = _gather(by_class, spawner_classes)

    # pairs already sharing a cell at tick start (a rider on its raft)
    pre_share: list[tuple[int, int]] = []
    for ids in occupancy.values():
        if len(ids) > 1:
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    pre_share.append((ids[i], ids[j]))

    # 1. Motion proposals against the pre-tick layout, id order.
    proposals: dict[int, GridPos] = {}
    for oid in mover_ids:
        obj = ns.objects[oid]
        dtype = desc.classes[obj.class_id]
        act = action if obj.class_id == desc.avatar_class else None
        target = sample_proposal(obj, dtype, ns, act, rng)
        if target != obj.pos:
            proposals[oid] = target

    # 2. Age flickers; those past their lifetime vanish before moving.
    for oid in flicker_ids:
        obj = ctx.own(oid)
        obj.age_ticks += 1
        if obj.remaining_lifetime is not None:
            obj.remaining_lifetime -= 1
            if obj.remaining_lifetime < 0:
                ctx.remove(oid)
                proposals.pop(oid, None)

    # 3. Spawns: avatar emission first, then spawn points in id order.
    if avatar is not None and avatar.id in ns.objects and action is Action.USE:
        _emit_from_avatar(ctx, avatar.id)
    for oid in spawner_ids:
        obj = ns.objects.get(oid)
        if obj is None:
            continue
        dtype = desc.classes[obj.class_id]
        if dtype.spawn_period and next_tick % dtype.spawn_period == 0:
            ctx.spawn(dtype.projectile_class, obj.pos)

    # 4. Commit moves cell by cell; entering an occupied cell ends the move.
    eos_ids: list[int] = []
    moved: dict[int, GridPos] = {}
    for oid in sorted(proposals):
        obj = ns.objects.get(oid)
        if obj is None:
            continue
        start = obj.pos
        hit_edge = False
        final = start
        for cell in displacement_path(start, proposals[oid]):
            if not (0 <= cell[0] < ns.width and 0 <= cell[1] < ns.height):
                hit_edge = True
                break
            final = cell
            occupants = occupancy.get(cell)
            if occupants and any(o != oid for o in occupants):
                break
        if final != start:
            ctx.move_to(oid, final)
            moved[oid] = start
        if hit_edge:
            eos_ids.append(oid)

    # 5. Collision rounds.
    pending: set[tuple] = set(
        (a, b) if a < b else (b, a) for a, b in pre_share
    )
    for ids in occupancy.values():
        if len(ids) > 1:
            ids_sorted = sorted(ids)
            for i in range(len(ids_sorted)):
                for j in range(i + 1, len(ids_sorted)):
                    pending.add((ids_sorted[i], ids_sorted[j]))
    # swaps: both moved, each into the other's starting cell
    if moved:
        start_of = moved
        by_start: dict[GridPos, list[int]] = {}
        for oid, start in moved.items():
            by_start.setdefault(start, []).append(oid)
        for oid, start in moved.items():
            cur = ns.objects[oid].pos
            for other in by_start.get(cur, ()):
                if other == oid:
                    continue
                if ns.objects[other].pos == start and cur != ns.objects[other].pos:
                    pending.add((oid, other) if oid < other else (other, oid))
    for oid in eos_ids:
        if oid in ns.objects:
            pending.add((oid, None))

    processed: set[tuple] = set()
    for _ in range(CASCADE_ROUNDS):
        fresh = [p for p in pending if p not in processed]
        if not fresh:
            break
        ctx.effects_moved = False
        for key in sorted(fresh, key=_pair_sort_key):
            processed.add(key)
            _run_pair(ctx, key)
        if not ctx.effects_moved:
            break
        pending = set()
        for ids in ns.occupancy.values():
            if len(ids) > 1:
                ids_sorted = sorted(ids)
                for i in range(len(ids_sorted)):
                    for j in range(i + 1, len(ids_sorted)):
                        pending.add((ids_sorted[i], ids_sorted[j]))

    # 6. Close out the tick.
    ns.tick = next_tick
    ns.events = tuple(ctx.events)
    ns.contacts = tuple(ctx.contacts)
    ns.rng_state = rng.state()
    status, fired = evaluate_termination(ns, desc.termination_set)
    ns.status = status
    ns.fired_termination = fired
    return ns


def _emit_from_avatar(ctx: _Tick, avatar_id: int) -> None:
    ns, desc = ctx.ns, ctx.desc
    avatar = ns.objects[avatar_id]
    dtype = desc.classes[avatar.class_id]
    if dtype.vgdl_type is not VgdlType.SHOOT_AVATAR or not dtype.projectile_class:
        return
    proj_type = desc.classes[dtype.projectile_class]
    if proj_type.vgdl_type is VgdlType.FLICKER:
        if avatar.orientation is Orientation.NONE:
            return
        dx, dy = avatar.orientation.delta
        pos = (avatar.pos[0] + dx, avatar.pos[1] + dy)
        if not ns.in_bounds(pos):
            return
        orient = avatar.orientation
    else:
        pos = avatar.pos
        orient = proj_type.orientation
        if orient is Orientation.NONE:
            orient = avatar.orientation
    ctx.spawn(dtype.projectile_class, pos, orientation=orient)


def _class_flags(desc: GameDescription):
    """Mover/flicker/spawner class lists, memoized on the description."""
    flags = desc.__dict__.get("_class_flags")
    if flags is None:
        mover = []
        flicker = []
        spawner = []
        for cid, dtype in desc.classes.items():
            if dtype.moves or dtype.is_avatar:
                mover.append(cid)
            if dtype.vgdl_type is VgdlType.FLICKER:
                flicker.append(cid)
            if dtype.vgdl_type is VgdlType.SPAWN_POINT:
                spawner.append(cid)
        flags = (tuple(mover), tuple(flicker), tuple(spawner))
        desc.__dict__["_class_flags"] = flags
    return flags


def _gather(by_class: dict[str, tuple[int, ...]], classes: tuple[str, ...]) -> list[int]:
    """Ids of the given classes in ascending id order."""
    if not classes:
        return []
    ids: list[int] = []
    for c in classes:
        ids.extend(by_class.get(c, ()))
    ids.sort()
    return ids


def _pair_sort_key(key: tuple) -> tuple:
    a, b = key
    return (a, float("inf") if b is None else b)


def _rules_for_pair(desc: GameDescription, class_a: str, class_b: str):
    memo = desc.__dict__.get("_pair_rule_memo")
    if memo is None:
        memo = {}
        desc.__dict__["_pair_rule_memo"] = memo
    hit = memo.get((class_a, class_b))
    if hit is None:
        hit = [
            rule
            for rule in desc.interaction_set
            if (rule.affected_class == class_a and rule.other_class == class_b)
            or (rule.affected_class == class_b and rule.other_class == class_a)
        ]
        memo[(class_a, class_b)] = hit
    return hit


def _run_pair(ctx: _Tick, key: tuple) -> None:
    ns, desc = ctx.ns, ctx.desc
    a_id, b_id = key
    a = ns.objects.get(a_id)
    if a is None:
        # removed by an earlier pair this tick; the contact never happens
        return
    if b_id is None:
        ctx.contacts.append(ContactRecord(a.class_id, EOS, a_id, None))
        for rule in _rules_for_pair(desc, a.class_id, EOS):
            if rule.other_class != EOS or rule.affected_class != a.class_id:
                continue
            if a_id not in ns.objects:
                break
            if rule.precondition is not None and not rule.precondition.holds(
                ctx.start_resources
            ):
                continue
            ctx.events.append(_event(rule, a.class_id, EOS, a_id, None))
            apply_predicate(ctx, rule, a_id, None)
        return
    b = ns.objects.get(b_id)
    if b is None:
        return
    ctx.contacts.append(ContactRecord(a.class_id, b.class_id, a_id, b_id))
    rules = _rules_for_pair(desc, a.class_id, b.class_id)
    if not rules:
        return
    class_of = {a_id: a.class_id, b_id: b.class_id}
    # within the pair, rules keep firing even if one side was just removed
    # by an earlier rule of the same contact (a box and the hole it fills
    # destroy each other); only the affected side must still exist
    for rule in rules:
        for affected_id, other_id in ((a_id, b_id), (b_id, a_id)):
            if ns.objects.get(affected_id) is None:
                continue
            if (
                rule.affected_class != class_of[affected_id]
                or rule.other_class != class_of[other_id]
            ):
                continue
            if rule.precondition is not None and not rule.precondition.holds(
                ctx.start_resources
            ):
                continue
            ctx.events.append(
                _event(rule, class_of[affected_id], class_of[other_id],
                       affected_id, other_id)
            )
            apply_predicate(ctx, rule, affected_id, other_id)


def _event(
    rule: InteractionRule,
    affected_class: str,
    other_class: str,
    affected_id: int,
    other_id: Optional[int],
) -> EventRecord:
    return EventRecord(
        affected_class=affected_class,
        other_class=other_class,
        predicate=rule.predicate,
        affected_id=affected_id,
        other_id=other_id,
        resource=rule.resource,
        delta=rule.delta,
        limit=rule.limit,
        score_delta=rule.score_delta,
        transform_into=rule.transform_into,
        teleport_exit=rule.teleport_exit,
    )


def apply_predicate(
    ctx: _Tick,
    rule: InteractionRule,
    affected_id: int,
    other_id: Optional[int],
) -> None:
    """Mutate the tick's state with the rule's effect.  Effects that would
    leave the board are dropped; clone with no free neighbour and teleport
    with no exit are no-ops."""
    ns, desc, prev_pos = ctx.ns, ctx.desc, ctx.prev_pos
    pred = rule.predicate
    affected = ns.objects.get(affected_id)
    if affected is None:
        return
    other = ns.objects.get(other_id) if other_id is not None else None

    if pred is Predicate.STEP_BACK:
        back = prev_pos.get(affected_id)
        if back is not None and back != affected.pos:
            ctx.move_to(affected_id, back)
            ctx.effects_moved = True
    elif pred is Predicate.BOUNCE_FORWARD:
        if other is not None:
            d = _unit_displacement(other.pos, prev_pos.get(other_id, other.pos))
            target = (affected.pos[0] + d[0], affected.pos[1] + d[1])
            if d != (0, 0) and ns.in_bounds(target):
                ctx.move_to(affected_id, target)
                ctx.effects_moved = True
    elif pred is Predicate.REVERSE_DIRECTION:
        obj = ctx.own(affected_id)
        obj.orientation = obj.orientation.opposite
    elif pred is Predicate.TURN_AROUND:
        obj = ctx.own(affected_id)
        obj.orientation = obj.orientation.opposite
        below = (obj.pos[0], obj.pos[1] + 1)
        if ns.in_bounds(below):
            ctx.move_to(affected_id, below)
            ctx.effects_moved = True
    elif pred is Predicate.WRAP_AROUND:
        d = affected.orientation.delta
        if d != (0, 0):
            x, y = affected.pos
            if d[0]:
                x = 0 if d[0] > 0 else ns.width - 1
            if d[1]:
                y = 0 if d[1] > 0 else ns.height - 1
            if (x, y) != affected.pos:
                ctx.move_to(affected_id, (x, y))
                ctx.effects_moved = True
    elif pred is Predicate.PULL_WITH_IT:
        if other is not None:
            prev = prev_pos.get(other_id, other.pos)
            dx = other.pos[0] - prev[0]
            dy = other.pos[1] - prev[1]
            target = (affected.pos[0] + dx, affected.pos[1] + dy)
            if (dx, dy) != (0, 0) and ns.in_bounds(target):
                ctx.move_to(affected_id, target)
                ctx.effects_moved = True
    elif pred is Predicate.UNDO_ALL:
        # only objects that actually moved this tick have an entry to revert
        for oid in sorted(prev_pos):
            back = prev_pos[oid]
            if oid in ns.objects and ns.objects[oid].pos != back:
                ctx.move_to(oid, back)
                ctx.effects_moved = True
    elif pred is Predicate.COLLECT_RESOURCE:
        name = rule.resource or affected.class_id
        cap = rule.limit if rule.limit is not None else desc.resource_capacities.get(name)
        ns.agent_state.add(name, rule.delta, cap)
        ctx.remove(affected_id)
    elif pred is Predicate.CHANGE_RESOURCE:
        name = rule.resource or affected.class_id
        cap = rule.limit if rule.limit is not None else desc.resource_capacities.get(name)
        ns.agent_state.add(name, rule.delta, cap)
    elif pred is Predicate.CHANGE_SCORE:
        ns.score += rule.score_delta
    elif pred is Predicate.TELEPORT:
        exit_class = rule.teleport_exit
        exits = sorted(
            (o for o in ns.objects.values()
             if o.class_id == exit_class and o.id != affected_id),
            key=lambda o: o.id,
        )
        if exits:
            target = exits[ctx.rng.randrange(len(exits))].pos
            if target != affected.pos:
                ctx.move_to(affected_id, target)
                ctx.effects_moved = True
    elif pred is Predicate.CLONE:
        taken = {o.pos for o in ns.objects.values()}
        for direction in _CLONE_ORDER:
            dx, dy = direction.delta
            cell = (affected.pos[0] + dx, affected.pos[1] + dy)
            if ns.in_bounds(cell) and cell not in taken:
                clone = ctx.spawn(affected.class_id, cell, orientation=affected.orientation)
                clone.remaining_lifetime = affected.remaining_lifetime
                ctx.effects_moved = True
                break
    elif pred is Predicate.DESTROY:
        ctx.remove(affected_id)
    elif pred is Predicate.TRANSFORM:
        pos = affected.pos
        old_orient = affected.orientation
        ctx.remove(affected_id)
        new_dtype = desc.classes[rule.transform_into]
        orient = new_dtype.orientation
        if orient is Orientation.NONE:
            orient = old_orient
        ctx.spawn(rule.transform_into, pos, orientation=orient)
        ctx.effects_moved = True
    else:
        raise ValueError(f"unknown predicate {pred!r}")


def _unit_displacement(cur: GridPos, prev: GridPos) -> GridPos:
    dx = cur[0] - prev[0]
    dy = cur[1] - prev[1]
    return ((dx > 0) - (dx < 0), (dy > 0) - (dy < 0))


def collision_pairs(
    ns: GameState, prev_pos: dict[int, GridPos], eos_ids: list[int]
) -> list[tuple]:
    """Canonically ordered contact pairs for a tick: cell sharers (at tick
    start or end), cell swappers, and off-board proposers paired with EOS."""
    pairs: set[tuple] = set()
    by_pos: dict[GridPos, list[int]] = {}
    prev_by_pos: dict[GridPos, list[int]] = {}
    for oid, obj in ns.objects.items():
        by_pos.setdefault(obj.pos, []).append(oid)
    for oid, pos in prev_pos.items():
        if oid in ns.objects:
            prev_by_pos.setdefault(pos, []).append(oid)
    for index in (by_pos, prev_by_pos):
        for ids in index.values():
            ids.sort()
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    pairs.add((ids[i], ids[j]))
    for oid, obj in ns.objects.items():
        for other in prev_by_pos.get(obj.pos, ()):
            if other == oid:
                continue
            if (
                ns.objects[other].pos == prev_pos.get(oid)
                and obj.pos != ns.objects[other].pos
            ):
                pairs.add((min(oid, other), max(oid, other)))
    for oid in eos_ids:
        if oid in ns.objects:
            pairs.add((oid, None))
    return sorted(pairs, key=_pair_sort_key)


def evaluate_termination(
    state: GameState, rules: list[TerminationRule]
) -> tuple[Status, Optional[TerminationRule]]:
    """First rule in order whose condition holds decides; else Continue."""
    counts = state.class_counts()
    for rule in rules:
        if rule.kind is TerminationKind.COUNT_REACHES:
            if counts.get(rule.class_id, 0) == rule.target_count:
                return _status_for(rule.outcome), rule
        elif rule.kind is TerminationKind.TIMEOUT:
            if rule.ticks is not None and state.tick >= rule.ticks:
                return _status_for(rule.outcome), rule
    return Status.CONTINUE, None


def _status_for(outcome: Outcome) -> Status:
    return Status.WIN if outcome is Outcome.WIN else Status.LOSS
