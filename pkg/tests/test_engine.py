from __future__ import annotations

import random

import pytest

from gridplay.core import (
    Action,
    AgentState,
    Comparator,
    ContractViolation,
    DynamicType,
    EOS,
    GameState,
    InteractionRule,
    ObjectInstance,
    Orientation,
    Outcome,
    Precondition,
    Predicate,
    Status,
    TerminationKind,
    TerminationRule,
    VgdlType,
    evaluate_termination,
    initial_state,
    proposal_distribution,
    step_engine,
)
from gridplay.harness.corpus import list_games, load_game

from conftest import make_description


def blank_state(width=8, height=8, objects=(), tick=0):
    return GameState(
        tick=tick,
        width=width,
        height=height,
        objects={o.id: o for o in objects},
        agent_state=AgentState(),
    )


class TestProposals:
    def test_missile_speed_two_right(self):
        obj = ObjectInstance(0, "m", (3, 4), Orientation.RIGHT)
        dtype = DynamicType(VgdlType.MISSILE, speed=2, orientation=Orientation.RIGHT)
        dist = proposal_distribution(obj, dtype, blank_state(10, 10, [obj]))
        assert dist == {(5, 4): 1.0}

    def test_random_npc_uniform_over_five(self):
        obj = ObjectInstance(0, "n", (4, 4))
        dtype = DynamicType(VgdlType.RANDOM_NPC)
        dist = proposal_distribution(obj, dtype, blank_state(10, 10, [obj]))
        assert dist == {
            (4, 4): 0.2, (5, 4): 0.2, (3, 4): 0.2, (4, 5): 0.2, (4, 3): 0.2,
        }

    def test_immovable_point_mass(self):
        obj = ObjectInstance(0, "w", (2, 2))
        dtype = DynamicType(VgdlType.IMMOVABLE)
        dist = proposal_distribution(obj, dtype, blank_state(5, 5, [obj]))
        assert dist == {(2, 2): 1.0}

    def test_cooldown_gates_activation(self):
        obj = ObjectInstance(0, "m", (1, 1), Orientation.RIGHT)
        dtype = DynamicType(VgdlType.MISSILE, cooldown=2, orientation=Orientation.RIGHT)
        # producing tick 1: 1 % 2 != 0 -> stay
        assert proposal_distribution(obj, dtype, blank_state(8, 8, [obj], tick=0)) == {
            (1, 1): 1.0
        }
        # producing tick 2: active, displaced speed*cooldown = 2
        assert proposal_distribution(obj, dtype, blank_state(8, 8, [obj], tick=1)) == {
            (3, 1): 1.0
        }

    def test_chaser_steps_toward_nearest_target(self):
        chaser = ObjectInstance(0, "c", (2, 2))
        prey = ObjectInstance(1, "p", (6, 2))
        dtype = DynamicType(VgdlType.CHASER, target_class="p")
        dist = proposal_distribution(chaser, dtype, blank_state(8, 8, [chaser, prey]))
        assert dist == {(3, 2): 1.0}

    def test_fleeing_maximizes_distance(self):
        runner = ObjectInstance(0, "c", (2, 2))
        hunter = ObjectInstance(1, "p", (2, 4))
        dtype = DynamicType(VgdlType.FLEEING, target_class="p")
        dist = proposal_distribution(runner, dtype, blank_state(8, 8, [runner, hunter]))
        # Manhattan distance ties three ways: straight away and both sideways
        assert dist == pytest.approx(
            {(2, 1): 1 / 3, (1, 2): 1 / 3, (3, 2): 1 / 3}
        )
        assert (2, 3) not in dist  # never steps toward the hunter

    def test_unknown_type_rejected(self):
        obj = ObjectInstance(0, "x", (0, 0))
        bad = DynamicType.__new__(DynamicType)
        object.__setattr__(bad, "vgdl_type", "NotAType")
        object.__setattr__(bad, "speed", 1)
        object.__setattr__(bad, "cooldown", 1)
        object.__setattr__(bad, "orientation", Orientation.NONE)
        with pytest.raises((ValueError, AttributeError)):
            proposal_distribution(obj, bad, blank_state(4, 4, [obj]))


class TestStepEngine:
    def test_move_right_in_empty_row(self):
        desc = make_description(
            classes={"avatar": DynamicType(VgdlType.MOVING_AVATAR)},
            rules=[],
            terminations=[],
            grid=("A....",),
            legend={"A": "avatar"},
        )
        s0 = initial_state(desc, 0, seed=0)
        s1 = step_engine(s0, Action.RIGHT, desc)
        assert s1.objects[0].pos == (1, 0)
        assert s1.events == ()

    def test_step_back_off_wall(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "wall": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("avatar", "wall", Predicate.STEP_BACK)],
            terminations=[],
            grid=(".Aw.",),
            legend={"A": "avatar", "w": "wall"},
        )
        s0 = initial_state(desc, 0, seed=0)
        s1 = step_engine(s0, Action.RIGHT, desc)
        avatar = s1.objects[0]
        assert avatar.pos == (1, 0)
        step_backs = [e for e in s1.events if e.predicate is Predicate.STEP_BACK]
        assert len(step_backs) == 1
        assert step_backs[0].affected_class == "avatar"

    def test_determinism_same_seed_same_hashes(self):
        desc = load_game("zelda")
        actions = [random.Random(3).choice(list(Action)) for _ in range(50)]
        runs = []
        for _ in range(2):
            s = initial_state(desc, 0, seed=42)
            hashes = []
            for a in actions:
                if s.status is not Status.CONTINUE:
                    break
                s = step_engine(s, a, desc)
                hashes.append(s.state_hash())
            runs.append(hashes)
        assert runs[0] == runs[1]

    def test_step_on_terminated_state_rejected(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "goal": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("goal", "avatar", Predicate.DESTROY)],
            terminations=[
                TerminationRule(TerminationKind.COUNT_REACHES, Outcome.WIN, "goal", 0)
            ],
            grid=("AG",),
            legend={"A": "avatar", "G": "goal"},
        )
        s = initial_state(desc, 0, seed=0)
        s = step_engine(s, Action.RIGHT, desc)
        assert s.status is Status.WIN
        with pytest.raises(ContractViolation):
            step_engine(s, Action.RIGHT, desc)

    def test_fast_missile_does_not_tunnel(self):
        # speed-2 missile one cell away from a blocker must stop on it, not skip
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "m": DynamicType(VgdlType.MISSILE, speed=2, orientation=Orientation.RIGHT),
                "block": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("m", "block", Predicate.STEP_BACK)],
            terminations=[],
            grid=("mb...", "A...."),
            legend={"A": "avatar", "m": "m", "b": "block"},
        )
        s0 = initial_state(desc, 0, seed=0)
        s1 = step_engine(s0, Action.NOOP, desc)
        missile = next(o for o in s1.objects.values() if o.class_id == "m")
        assert missile.pos == (0, 0)  # entered blocker cell, then stepped back
        assert any(e.predicate is Predicate.STEP_BACK for e in s1.events)

    def test_cell_swap_counts_as_collision(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "m": DynamicType(VgdlType.MISSILE, orientation=Orientation.LEFT),
            },
            rules=[InteractionRule("avatar", "m", Predicate.DESTROY)],
            terminations=[],
            grid=("Am",),
            legend={"A": "avatar", "m": "m"},
        )
        s0 = initial_state(desc, 0, seed=0)
        s1 = step_engine(s0, Action.RIGHT, desc)
        assert all(o.class_id != "avatar" for o in s1.objects.values())

    def test_eos_contact_recorded_for_offboard_proposal(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "m": DynamicType(VgdlType.MISSILE, orientation=Orientation.LEFT),
            },
            rules=[],
            terminations=[],
            grid=("m.A",),
            legend={"A": "avatar", "m": "m"},
        )
        s0 = initial_state(desc, 0, seed=0)
        s1 = step_engine(s0, Action.NOOP, desc)
        assert any(c.class_b == EOS for c in s1.contacts)
        missile = next(o for o in s1.objects.values() if o.class_id == "m")
        assert missile.pos == (0, 0)  # no rule: stays on the board


class TestPredicates:
    def test_destroy_removes_affected(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "fly": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("fly", "avatar", Predicate.DESTROY)],
            terminations=[],
            grid=("Af",),
            legend={"A": "avatar", "f": "fly"},
        )
        s0 = initial_state(desc, 0, seed=0)
        assert s0.count("fly") == 1
        s1 = step_engine(s0, Action.RIGHT, desc)
        assert s1.count("fly") == 0

    def test_pull_with_it_carries_rider(self):
        # avatar steps onto a slow log (one block every other tick); when the
        # log slides, the avatar standing on it is displaced with it
        from fractions import Fraction

        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "log": DynamicType(
                    VgdlType.MISSILE, speed=Fraction(1, 2), cooldown=2,
                    orientation=Orientation.RIGHT,
                ),
            },
            rules=[InteractionRule("avatar", "log", Predicate.PULL_WITH_IT)],
            terminations=[],
            grid=("l....", ".....", "A...."),
            legend={"A": "avatar", "l": "log"},
        )
        s = initial_state(desc, 0, seed=0)
        for a in (Action.UP, Action.UP, Action.RIGHT):
            s = step_engine(s, a, desc)
        av = next(o for o in s.objects.values() if o.class_id == "avatar")
        log = next(o for o in s.objects.values() if o.class_id == "log")
        assert av.pos == log.pos == (1, 0)  # avatar standing on the log
        s = step_engine(s, Action.NOOP, desc)  # log activates: moves (+1,0)
        av = next(o for o in s.objects.values() if o.class_id == "avatar")
        log = next(o for o in s.objects.values() if o.class_id == "log")
        assert log.pos == (2, 0)
        assert av.pos == (2, 0)  # displaced by the log's displacement

    def test_collect_then_conditional_destroy(self, keydoor_desc):
        s = initial_state(keydoor_desc, 0, seed=0)
        # door contact without key: stepBack holds the avatar out
        s1 = step_engine(s, Action.DOWN, keydoor_desc)
        s2 = step_engine(s1, Action.DOWN, keydoor_desc)
        s3 = step_engine(s2, Action.RIGHT, keydoor_desc)
        s4 = step_engine(s3, Action.RIGHT, keydoor_desc)  # into door cell
        assert s4.count("door") == 1
        av = next(o for o in s4.objects.values() if o.class_id == "avatar")
        assert av.pos == (2, 3)  # bounced back
        # collect key, then the door falls
        s5 = step_engine(s4, Action.UP, keydoor_desc)
        s6 = step_engine(s5, Action.UP, keydoor_desc)
        s7 = step_engine(s6, Action.RIGHT, keydoor_desc)  # onto key at (3,1)
        assert s7.agent_state.resources.get("key") == 1
        s8 = step_engine(s7, Action.DOWN, keydoor_desc)
        s9 = step_engine(s8, Action.DOWN, keydoor_desc)
        assert s9.count("door") == 0
        assert s9.status is Status.WIN

    def test_resource_capacity_clamped(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "gem": DynamicType(VgdlType.RESOURCE_PACK),
            },
            rules=[
                InteractionRule(
                    "gem", "avatar", Predicate.COLLECT_RESOURCE,
                    resource="gem", limit=1,
                )
            ],
            terminations=[],
            grid=("Agg",),
            legend={"A": "avatar", "g": "gem"},
            capacities={"gem": 1},
        )
        s = initial_state(desc, 0, seed=0)
        s = step_engine(s, Action.RIGHT, desc)
        s = step_engine(s, Action.RIGHT, desc)
        assert s.agent_state.resources["gem"] == 1  # clamped at capacity

    def test_clone_into_first_free_neighbour(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "blob": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("blob", "avatar", Predicate.CLONE)],
            terminations=[],
            grid=("...", ".b.", ".A."),
            legend={"A": "avatar", "b": "blob"},
        )
        s = initial_state(desc, 0, seed=0)
        s = step_engine(s, Action.UP, desc)
        assert s.count("blob") == 2
        positions = {o.pos for o in s.objects.values() if o.class_id == "blob"}
        assert positions == {(1, 1), (1, 0)}  # clone went up (first free slot)

    def test_teleport_moves_to_exit(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "entry": DynamicType(VgdlType.PORTAL, portal_exit_class="pad"),
                "pad": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[
                InteractionRule("avatar", "entry", Predicate.TELEPORT, teleport_exit="pad")
            ],
            terminations=[],
            grid=("Ae..p",),
            legend={"A": "avatar", "e": "entry", "p": "pad"},
        )
        s = initial_state(desc, 0, seed=0)
        s = step_engine(s, Action.RIGHT, desc)
        av = next(o for o in s.objects.values() if o.class_id == "avatar")
        assert av.pos == (4, 0)

    def test_transform_replaces_with_fresh_id(self):
        desc = make_description(
            classes={
                "avatar": DynamicType(VgdlType.MOVING_AVATAR),
                "cocoon": DynamicType(VgdlType.IMMOVABLE),
                "moth": DynamicType(VgdlType.IMMOVABLE),
            },
            rules=[InteractionRule("cocoon", "avatar", Predicate.TRANSFORM, transform_into="moth")],
            terminations=[],
            grid=("Ac",),
            legend={"A": "avatar", "c": "cocoon"},
        )
        s0 = initial_state(desc, 0, seed=0)
        old_ids = set(s0.objects)
        s1 = step_engine(s0, Action.RIGHT, desc)
        moth = next(o for o in s1.objects.values() if o.class_id == "moth")
        assert moth.pos == (1, 0)
        assert moth.id not in old_ids

    def test_box_into_hole_mutual_destroy_and_undo_all(self):
        desc = load_game("bait")
        s = initial_state(desc, 1, seed=0)
        # avatar (1,1) walks down to (1,3) then pushes box (2,3) right into hole (4,3)
        s = step_engine(s, Action.DOWN, desc)
        s = step_engine(s, Action.DOWN, desc)
        s = step_engine(s, Action.RIGHT, desc)  # push: box to (3,3)
        assert s.count("box") == 1
        box = next(o for o in s.objects.values() if o.class_id == "box")
        assert box.pos == (3, 3)
        s = step_engine(s, Action.RIGHT, desc)  # push: box into hole (4,3)
        assert s.count("box") == 0 and s.count("hole") == 0

    def test_push_against_wall_undone(self):
        desc = load_game("bait")
        s = initial_state(desc, 0, seed=0)
        # box at (4,2), wall ring; push box up against the top wall
        # route avatar to (4,3)... instead push sideways: avatar (1,1) -> (3,2), push right
        for a in [Action.DOWN, Action.RIGHT, Action.RIGHT]:
            s = step_engine(s, a, desc)
        av = next(o for o in s.objects.values() if o.class_id == "avatar")
        assert av.pos == (3, 2)
        box = next(o for o in s.objects.values() if o.class_id == "box")
        s2 = step_engine(s, Action.RIGHT, desc)  # push box (4,2)->(5,2), fine
        box2 = next(o for o in s2.objects.values() if o.class_id == "box")
        assert box2.pos == (5, 2)
        s3 = step_engine(s2, Action.RIGHT, desc)
        s4 = step_engine(s3, Action.RIGHT, desc)  # box now at (7,2), wall at (8,2)
        box4 = next(o for o in s4.objects.values() if o.class_id == "box")
        assert box4.pos == (7, 2)
        s5 = step_engine(s4, Action.RIGHT, desc)  # push into wall: undoAll
        box5 = next(o for o in s5.objects.values() if o.class_id == "box")
        av5 = next(o for o in s5.objects.values() if o.class_id == "avatar")
        assert box5.pos == (7, 2)
        assert av5.pos == (6, 2)  # avatar move undone too


class TestTermination:
    def test_count_zero_win(self):
        rules = [TerminationRule(TerminationKind.COUNT_REACHES, Outcome.WIN, "goal", 0)]
        s = blank_state(4, 4, [ObjectInstance(0, "avatar", (0, 0))])
        status, fired = evaluate_termination(s, rules)
        assert status is Status.WIN and fired is rules[0]

    def test_timeout_at_500(self):
        rules = [TerminationRule(TerminationKind.TIMEOUT, Outcome.WIN, ticks=500)]
        s = blank_state(4, 4, [ObjectInstance(0, "avatar", (0, 0))], tick=500)
        status, _ = evaluate_termination(s, rules)
        assert status is Status.WIN
        s_early = blank_state(4, 4, [ObjectInstance(0, "avatar", (0, 0))], tick=499)
        assert evaluate_termination(s_early, rules)[0] is Status.CONTINUE

    def test_first_match_wins_loss_listed_first(self):
        rules = [
            TerminationRule(TerminationKind.COUNT_REACHES, Outcome.LOSS, "a", 0),
            TerminationRule(TerminationKind.COUNT_REACHES, Outcome.WIN, "b", 0),
        ]
        s = blank_state(4, 4, [])  # both counts are zero
        status, fired = evaluate_termination(s, rules)
        assert status is Status.LOSS and fired is rules[0]


class TestInvariants:
    def test_avatar_uniqueness_and_bounds_over_random_play(self):
        for name in ("zelda", "frogs", "aliens"):
            desc = load_game(name)
            s = initial_state(desc, 0, seed=9)
            r = random.Random(7)
            for _ in range(80):
                if s.status is not Status.CONTINUE:
                    break
                s = step_engine(s, r.choice(list(Action)), desc)
                assert s.count(desc.avatar_class) <= 1
                for obj in s.objects.values():
                    assert s.in_bounds(obj.pos), (name, obj)
                for res, cnt in s.agent_state.resources.items():
                    assert cnt >= 0
                    cap = desc.resource_capacities.get(res)
                    if cap is not None:
                        assert cnt <= cap

    def test_contact_locality_of_events(self):
        # every event's instances were part of a recorded contact this tick
        desc = load_game("zelda")
        s = initial_state(desc, 0, seed=3)
        r = random.Random(5)
        for _ in range(80):
            if s.status is not Status.CONTINUE:
                break
            s = step_engine(s, r.choice(list(Action)), desc)
            touching = {
                frozenset(x for x in (c.id_a, c.id_b) if x is not None)
                for c in s.contacts
            }
            for e in s.events:
                ids = frozenset(x for x in (e.affected_id, e.other_id) if x is not None)
                assert any(ids <= pair for pair in touching), (e, touching)
