from __future__ import annotations

import json
import time

import pytest
from starlette.testclient import TestClient

from gridplay.core import Status
from gridplay.harness.episode import EpisodeLog, verify_replay
from gridplay.harness.corpus import load_game
from gridplay.service import Session, color_permutation, create_app, participant_seed


@pytest.fixture
def client():
    app = create_app(start_loops=True, max_ticks=2000)
    with TestClient(app) as c:
        yield c


@pytest.fixture
def manual_client():
    # no background tick loops: tests drive Session.advance_tick directly
    app = create_app(start_loops=False, max_ticks=2000)
    with TestClient(app) as c:
        yield c


def make_session(client, participant="p1", game="corridor", tick_rate=60.0):
    response = client.post("/api/sessions", json={
        "participant_id": participant, "game_id": game, "tick_rate": tick_rate,
    })
    assert response.status_code == 200, response.text
    return response.json()


class TestSessionSetup:
    def test_color_permutation_deterministic_per_participant(self):
        classes = ["avatar", "wall", "goal", "fireball"]
        a = color_permutation(classes, participant_seed("alice"))
        b = color_permutation(classes, participant_seed("alice"))
        c = color_permutation(classes, participant_seed("bob"))
        assert a == b
        assert sorted(a.values()) == list(range(4))
        assert c != a  # overwhelmingly likely for a real permutation space

    def test_create_session_starts_at_level_zero(self, client):
        info = make_session(client, game="zelda")
        assert info["level_count"] == 5
        assert info["width"] == 12 and info["height"] == 12
        session = client.app.state.sessions[info["session_id"]]
        assert session.level == 0

    def test_unknown_game_404(self, client):
        response = client.post("/api/sessions", json={
            "participant_id": "p", "game_id": "nope",
        })
        assert response.status_code == 404

    def test_list_games(self, client):
        games = {g["id"] for g in client.get("/api/games").json()}
        assert "zelda" in games and "corridor" in games


class TestFramesAndInput:
    def test_frames_carry_palette_indices_only(self, client):
        info = make_session(client)
        with client.websocket_connect(f"/api/sessions/{info['session_id']}/stream") as ws:
            frame = json.loads(ws.receive_text())
            assert frame["type"] == "frame"
            values = {v for row in frame["grid"] for v in row}
            assert values <= set(range(-1, info["palette_size"]))
            text = json.dumps(frame)
            for class_name in ("avatar", "wall", "goal", "fireball"):
                assert class_name not in text

    def test_ticks_advance_without_input(self, client):
        info = make_session(client, tick_rate=50.0)
        with client.websocket_connect(f"/api/sessions/{info['session_id']}/stream") as ws:
            first = json.loads(ws.receive_text())
            nxt = json.loads(ws.receive_text())
            assert nxt["tick"] == first["tick"] + 1
        session = client.app.state.sessions[info["session_id"]]
        session.game_over = True  # stop the loop
        ticks = [r for r in session.records if r["type"] == "tick"]
        assert all(t["action"] == "NoOp" for t in ticks[:2])

    def test_latest_key_wins_within_tick(self, manual_client):
        client = manual_client
        info = make_session(client, game="keydoor", tick_rate=20.0)
        session = client.app.state.sessions[info["session_id"]]
        session.receive_key("Up")
        session.receive_key("Right")
        frame = session.advance_tick()
        tick_records = [r for r in session.records if r["type"] == "tick"]
        assert tick_records[-1]["action"] == "Right"

    def test_restart_key_reloads_level_and_logs(self, manual_client):
        client = manual_client
        info = make_session(client)
        session = client.app.state.sessions[info["session_id"]]
        session.advance_tick()
        session.receive_key("Restart")
        events = [r for r in session.records if r["type"] == "level_event"]
        assert events and events[-1]["event"] == "restart"
        assert session.state.tick == 0

    def test_forfeit_ends_game(self, manual_client):
        client = manual_client
        info = make_session(client)
        session = client.app.state.sessions[info["session_id"]]
        session.receive_key("Forfeit")
        assert session.game_over and session.forfeited


class TestSurvey:
    def test_survey_rejected_before_game_end(self, manual_client):
        client = manual_client
        info = make_session(client)
        response = client.post(
            f"/api/sessions/{info['session_id']}/survey",
            json={"played_before": False, "difficulty": 4, "interest": 6},
        )
        assert response.status_code == 409

    def test_played_before_sets_exclusion(self, manual_client):
        client = manual_client
        info = make_session(client)
        session = client.app.state.sessions[info["session_id"]]
        session.game_over = True
        response = client.post(
            f"/api/sessions/{info['session_id']}/survey",
            json={"played_before": True, "difficulty": 4, "interest": 6},
        )
        body = response.json()
        assert body["excluded"] is True
        assert body["resubmission"] is False

    def test_resubmission_is_idempotent_with_audit_mark(self, manual_client):
        client = manual_client
        info = make_session(client)
        session = client.app.state.sessions[info["session_id"]]
        session.game_over = True
        url = f"/api/sessions/{info['session_id']}/survey"
        client.post(url, json={"played_before": False, "difficulty": 4, "interest": 6})
        second = client.post(url, json={"played_before": False, "difficulty": 5, "interest": 2})
        assert second.json()["resubmission"] is True
        stored = client.get(url).json()
        assert stored["difficulty"] == 5  # overwrite wins


class TestReplayAndCadence:
    def test_played_session_log_verifies(self, manual_client):
        client = manual_client
        info = make_session(client, game="keydoor", tick_rate=50.0)
        session = client.app.state.sessions[info["session_id"]]
        # drive ticks directly with a scripted key sequence
        script = ["Right", "Right", "Down", "Left", "Up", None, "Right"]
        for key in script:
            if key:
                session.receive_key(key)
            session.advance_tick()
        session.game_over = True
        log_text = client.get(f"/api/sessions/{info['session_id']}/log").text
        records = [json.loads(line) for line in log_text.splitlines()]
        log = EpisodeLog(records)
        desc = load_game("keydoor")
        assert verify_replay(log, desc).ok
        body = client.get(f"/api/sessions/{info['session_id']}/verify").json()
        assert body["ok"] is True

    def test_tampered_log_reports_divergent_tick(self, manual_client):
        client = manual_client
        info = make_session(client, game="keydoor")
        session = client.app.state.sessions[info["session_id"]]
        for key in ["Right", "Right", "Down"]:
            session.receive_key(key)
            session.advance_tick()
        session.game_over = True
        log = session.log()
        ticks = [r for r in log.records if r["type"] == "tick"]
        ticks[1]["action"] = "Up"  # tamper
        desc = load_game("keydoor")
        result = verify_replay(log, desc)
        assert not result.ok
        assert result.first_divergence == (0, ticks[1]["tick"])

    def test_empty_log_verifies_vacuously(self, manual_client):
        client = manual_client
        info = make_session(client, game="keydoor")
        session = client.app.state.sessions[info["session_id"]]
        session.game_over = True
        desc = load_game("keydoor")
        assert verify_replay(session.log(), desc).ok

    def test_tick_cadence_near_nominal(self, client):
        info = make_session(client, game="corridor", tick_rate=40.0)
        session = client.app.state.sessions[info["session_id"]]
        with client.websocket_connect(f"/api/sessions/{info['session_id']}/stream") as ws:
            for _ in range(24):
                json.loads(ws.receive_text())
        session.game_over = True
        mean = session.mean_tick_interval()
        assert mean is not None
        assert abs(mean - 1 / 40.0) / (1 / 40.0) < 0.10  # within 10% of nominal
