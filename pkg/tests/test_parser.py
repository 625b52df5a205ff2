from __future__ import annotations

import pytest

from gridplay.core import (
    Comparator,
    Predicate,
    Status,
    Action,
    initial_state,
    step_engine,
)
from gridplay.harness.corpus import list_games, load_game_checked
from gridplay.parsing import (
    Severity,
    parse_description,
    parse_level,
    serialize_description,
)

MINIMAL = """\
SpriteSet
    avatar > MovingAvatar color=GREEN
    wall > Immovable
    goal > Immovable color=BLUE
InteractionSet
    avatar wall > stepBack
    goal avatar > destroy
TerminationSet
    SpriteCounter stype=goal limit=0 win=True
LevelMapping
    A > avatar
    w > wall
    G > goal
"""

MINIMAL_LEVEL = "www\nAGw\nwww\n"


def test_minimal_game_parses_and_loads():
    result = parse_description(MINIMAL, [MINIMAL_LEVEL])
    assert result.ok, result.diagnostics
    desc = result.description
    assert set(desc.classes) == {"avatar", "wall", "goal"}
    assert desc.avatar_class == "avatar"
    # loads into the engine and plays
    s = initial_state(desc, 0, seed=0)
    s = step_engine(s, Action.RIGHT, desc)
    assert s.status is Status.WIN


def test_undefined_class_reported_with_name():
    text = MINIMAL.replace("goal avatar > destroy", "ghost avatar > destroy")
    result = parse_description(text, [MINIMAL_LEVEL])
    assert not result.ok
    assert any("ghost" in d.message for d in result.errors)


def test_unknown_predicate_rejected():
    text = MINIMAL.replace("goal avatar > destroy", "goal avatar > explodeTo")
    result = parse_description(text)
    assert not result.ok
    msgs = [d for d in result.errors if "explodeTo" in d.message]
    assert msgs and msgs[0].line > 0


def test_duplicate_class_rejected():
    text = MINIMAL.replace(
        "    wall > Immovable", "    wall > Immovable\n    wall > Passive"
    )
    result = parse_description(text)
    assert not result.ok
    assert any("duplicate class" in d.message for d in result.errors)


def test_non_rectangular_level_rejected():
    result = parse_description(MINIMAL, ["www\nAGww\nwww\n"])
    assert not result.ok
    assert any("ragged" in d.message for d in result.errors)


class TestParseLevel:
    legend = {"A": "avatar", "G": "goal"}

    def test_row_major_placement(self):
        placements, diags = parse_level("A.G", self.legend)
        assert diags == []
        assert placements == [("avatar", (0, 0)), ("goal", (2, 0))]

    def test_ragged_grid_error(self):
        placements, diags = parse_level("A.G\nA.", self.legend)
        assert any(d.severity is Severity.ERROR for d in diags)

    def test_unmapped_char_named(self):
        _, diags = parse_level("A.x", self.legend)
        assert any("'x'" in d.message for d in diags)


class TestRoundTrip:
    def test_minimal_round_trip(self):
        first = parse_description(MINIMAL, [MINIMAL_LEVEL]).description
        text = serialize_description(first)
        second = parse_description(text, [MINIMAL_LEVEL]).description
        assert second is not None
        assert first.classes == second.classes
        assert first.interaction_set == second.interaction_set
        assert first.termination_set == second.termination_set
        assert first.legend == second.legend

    def test_precondition_fields_survive(self):
        text = MINIMAL.replace(
            "goal avatar > destroy",
            "goal avatar > destroy if=key>=2\n    avatar goal > stepBack if=key<2",
        )
        first = parse_description(text).description
        assert first is not None
        again = parse_description(serialize_description(first)).description
        rule = again.interaction_set[1]
        assert rule.precondition.resource == "key"
        assert rule.precondition.comparator is Comparator.AT_LEAST
        assert rule.precondition.threshold == 2
        rule2 = again.interaction_set[2]
        assert rule2.precondition.comparator is Comparator.LESS_THAN

    @pytest.mark.parametrize("name", list_games())
    def test_corpus_round_trip_and_totality(self, name):
        desc, diags = load_game_checked(name)
        assert desc is not None
        assert [d for d in diags if d.severity is Severity.ERROR] == []
        text = serialize_description(desc)
        reparsed = parse_description(
            text, ["\n".join(level.grid) for level in desc.levels]
        ).description
        assert reparsed is not None
        assert reparsed.classes == desc.classes
        assert reparsed.interaction_set == desc.interaction_set
        assert reparsed.termination_set == desc.termination_set
        assert reparsed.palette == desc.palette
        assert [l.grid for l in reparsed.levels] == [l.grid for l in desc.levels]


def test_rule_order_preserved():
    text = MINIMAL.replace(
        "InteractionSet",
        "InteractionSet\n    goal wall > changeScore score=3",
    )
    desc = parse_description(text).description
    preds = [r.predicate for r in desc.interaction_set]
    assert preds == [Predicate.CHANGE_SCORE, Predicate.STEP_BACK, Predicate.DESTROY]
    roundtrip = parse_description(serialize_description(desc)).description
    assert [r.predicate for r in roundtrip.interaction_set] == preds
