from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridplay.harness import (
    EpisodeLog,
    RunConfig,
    bootstrap_efficiency_ratio,
    interaction_profile,
    learning_efficiency,
    list_games,
    load_game,
    occupancy_heatmap,
    run_experiment,
    score_from_log,
    validate_corpus,
    verify_replay,
)
from gridplay.harness.cli import main as cli_main


class TestLearningEfficiency:
    def test_five_of_five_in_thousand(self):
        assert learning_efficiency(5, 5, 1000) == pytest.approx(0.005)

    def test_three_of_five_in_six_hundred(self):
        assert learning_efficiency(3, 5, 600) == pytest.approx(0.003)

    def test_zero_levels_zero(self):
        assert learning_efficiency(0, 5, 123) == 0.0

    @given(
        st.integers(min_value=1, max_value=20),
        st.integers(min_value=0, max_value=20),
        st.integers(min_value=1, max_value=100000),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_levels_antitone_in_steps(self, levels_in_game, completed, steps):
        completed = min(completed, levels_in_game)
        value = learning_efficiency(completed, levels_in_game, steps)
        if completed + 1 <= levels_in_game:
            assert learning_efficiency(completed + 1, levels_in_game, steps) > value or completed + 1 == 1 and value == 0
        if completed >= 1:
            assert learning_efficiency(completed, levels_in_game, steps + 50) < value


class TestBootstrap:
    def test_identical_sets_ratio_one(self):
        scores = [0.004, 0.005, 0.006, 0.005]
        result = bootstrap_efficiency_ratio(scores, scores, resamples=2000, seed=1)
        assert result.mean_ratio == pytest.approx(1.0, abs=0.15)
        assert result.low <= 1.0 <= result.high

    def test_double_scores_ratio_two(self):
        human = [0.002, 0.003, 0.004, 0.005]
        agent = [2 * s for s in human]
        result = bootstrap_efficiency_ratio(agent, human, resamples=2000, seed=1)
        assert result.mean_ratio == pytest.approx(2.0, abs=0.3)

    def test_degenerate_agent_side_not_resampled(self):
        agent = [0.0, 0.0, 0.004]  # fewer than 3 nonzero
        human = [0.001, 0.002, 0.003, 0.004]
        result = bootstrap_efficiency_ratio(agent, human, resamples=1000, seed=2)
        assert result.resampled_agent is False
        assert result.resampled_human is True

    def test_all_zero_agent_flagged(self):
        result = bootstrap_efficiency_ratio([0.0, 0.0], [0.001], resamples=100)
        assert result.mean_ratio == 0.0 and result.flagged

    def test_interval_against_independent_resampler(self):
        rng = np.random.default_rng(7)
        agent = list(rng.uniform(0.001, 0.01, size=8))
        human = list(rng.uniform(0.001, 0.01, size=12))
        result = bootstrap_efficiency_ratio(agent, human, resamples=4000, seed=3)
        # independent implementation: plain loop resampler
        loop_rng = np.random.default_rng(99)
        ratios = []
        a, h = np.array(agent), np.array(human)
        for _ in range(4000):
            am = loop_rng.choice(a, size=len(a), replace=True).mean()
            hm = loop_rng.choice(h, size=len(h), replace=True).mean()
            ratios.append(am / hm)
        low, high = np.percentile(ratios, [2.5, 97.5])
        assert result.low == pytest.approx(low, rel=0.12)
        assert result.high == pytest.approx(high, rel=0.12)


def fake_log(ticks, game="corridor", levels=3, header_extra=None):
    records = [{
        "type": "header", "game": game, "variant": "test", "seed": 0,
        "levels": levels, "avatar_class": "avatar", "step_unit": "agent",
    }]
    if header_extra:
        records[0].update(header_extra)
    records.extend(ticks)
    return EpisodeLog(records)


class TestHeatmap:
    def test_stationary_agent_point_mass(self):
        ticks = [
            {"type": "tick", "level": 0, "avatar": [2, 3], "events": []}
            for _ in range(10)
        ]
        grid = occupancy_heatmap([fake_log(ticks)], 0, width=5, height=5)
        assert grid[3][2] == pytest.approx(1.0)
        assert grid.sum() == pytest.approx(1.0)

    def test_two_cell_patrol_half_half(self):
        ticks = []
        for i in range(40):
            ticks.append({"type": "tick", "level": 0, "avatar": [i % 2, 0], "events": []})
        grid = occupancy_heatmap([fake_log(ticks)], 0, width=3, height=1)
        assert grid[0][0] == pytest.approx(0.5)
        assert grid[0][1] == pytest.approx(0.5)

    def test_normalizes_over_any_log(self):
        rng = np.random.default_rng(3)
        ticks = [
            {"type": "tick", "level": 0,
             "avatar": [int(rng.integers(0, 4)), int(rng.integers(0, 4))],
             "events": []}
            for _ in range(57)
        ]
        grid = occupancy_heatmap([fake_log(ticks)], 0, width=4, height=4)
        assert grid.sum() == pytest.approx(1.0, abs=1e-9)


class TestInteractionProfile:
    labels = {"wall": "neutral", "key": "instrumental", "spider": "negative",
              "door": "instrumental", "goal": "positive"}

    def tick_with(self, events):
        return {"type": "tick", "level": 0, "avatar": [0, 0], "events": events}

    def test_only_wall_contacts_all_neutral(self):
        ticks = [self.tick_with([["avatar", "wall", "stepBack"]]) for _ in range(4)]
        profile = interaction_profile([fake_log(ticks)], self.labels, "avatar")
        assert profile.fractions["neutral"] == pytest.approx(1.0)

    def test_mixed_contacts_fractions(self):
        ticks = [
            self.tick_with([["key", "avatar", "collectResource"]]),
            self.tick_with([["key", "avatar", "collectResource"]]),
            self.tick_with([["key", "avatar", "collectResource"]]),
            self.tick_with([["avatar", "spider", "destroy"]]),
        ]
        profile = interaction_profile([fake_log(ticks)], self.labels, "avatar")
        assert profile.fractions["instrumental"] == pytest.approx(0.75)
        assert profile.fractions["negative"] == pytest.approx(0.25)
        assert profile.loss_object_contacts == 1

    def test_unlabeled_class_raises_with_name(self):
        ticks = [self.tick_with([["avatar", "ghost", "destroy"]])]
        with pytest.raises(ValueError, match="ghost"):
            interaction_profile([fake_log(ticks)], self.labels, "avatar")

    def test_empty_log_flagged(self):
        profile = interaction_profile([fake_log([])], self.labels, "avatar")
        assert profile.flagged_empty


class TestRunner:
    def test_replay_determinism_of_run_logs(self):
        cfg = RunConfig(game="corridor", variant="random", seed=5, max_steps=300)
        result = run_experiment(cfg)
        desc = load_game("corridor")
        assert verify_replay(result.log, desc).ok

    def test_step_cap_zero_efficiency(self):
        cfg = RunConfig(game="corridor", variant="random", seed=1, max_steps=0)
        result = run_experiment(cfg)
        assert result.score.value == 0.0

    def test_agent_steps_count_noops(self):
        cfg = RunConfig(game="corridor", variant="full", seed=1, max_steps=40)
        result = run_experiment(cfg)
        ticks = result.log.ticks()
        # the initial observation wait emits NoOps that count as steps
        assert ticks[0]["action"] == "NoOp"
        assert ticks[0]["step"] == 1

    def test_no_iw_variant_traces_show_zero_pruning(self):
        cfg = RunConfig(game="corridor", variant="no-iw", seed=1, max_steps=120)
        result = run_experiment(cfg)
        searches = result.log.search_records()
        assert searches, "expected planner activity"
        assert all(s["pruned"] == 0 for s in searches)
        full = run_experiment(RunConfig(game="corridor", variant="full", seed=1, max_steps=120))
        assert any(s["pruned"] > 0 for s in full.log.search_records())


class TestCli(object):
    def test_corpus_validate_and_list(self, capsys):
        assert cli_main(["corpus", "validate"]) == 0
        assert "all games valid" in capsys.readouterr().out
        assert cli_main(["corpus", "list"]) == 0
        assert "zelda" in capsys.readouterr().out

    def test_run_replay_metrics_round_trip(self, tmp_path, capsys):
        code = cli_main([
            "run", "--game", "corridor", "--agent", "random", "--seed", "2",
            "--max-steps", "150", "--out", str(tmp_path),
        ])
        assert code == 0
        out = capsys.readouterr().out
        log_path = next(tmp_path.glob("*.jsonl"))
        assert cli_main(["replay", "--log", str(log_path), "--verify"]) == 0
        labels = {
            "corridor": {"wall": "neutral", "goal": "positive",
                         "fireball": "negative", "comet": "negative",
                         "avatar": "neutral"},
        }
        labels_path = tmp_path / "labels.json"
        labels_path.write_text(json.dumps(labels))
        assert cli_main([
            "metrics", "--in", str(tmp_path), "--labels", str(labels_path),
        ]) == 0
        out = capsys.readouterr().out
        assert "corridor" in out and "efficiency" in out

    def test_corpus_all_games_replayable(self):
        problems = validate_corpus()
        assert problems == {}
