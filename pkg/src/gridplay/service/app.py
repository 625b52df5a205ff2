"""HTTP + websocket service for live human play.

Endpoints: create session, list games, submit survey, export the session
log; a bidirectional websocket streams frames out and accepts key input.
Session logs use the same record schema as agent runs, so the harness
ingests them unchanged.
"""
from __future__ import annotations

import asyncio
import hashlib
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from ..harness.corpus import default_corpus_dir, list_games, load_game
from ..harness.episode import verify_replay
from .protocol import (
    CreateSessionRequest,
    FrameMessage,
    InputMessage,
    KEYS,
    SessionInfo,
    SurveyRecord,
    SurveyRequest,
)
from .session import DEFAULT_TICK_RATE, Session


def participant_seed(participant_id: str) -> int:
    digest = hashlib.blake2b(participant_id.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def create_app(
    corpus_dir: Optional[Path] = None,
    default_tick_rate: float = DEFAULT_TICK_RATE,
    max_ticks: Optional[int] = 20_000,
    start_loops: bool = True,
) -> FastAPI:
    app = FastAPI(title="gridplay play service")
    app.state.sessions = {}
    app.state.surveys = {}
    app.state.corpus_dir = corpus_dir or default_corpus_dir()
    app.state.default_tick_rate = default_tick_rate
    app.state.max_ticks = max_ticks
    app.state.start_loops = start_loops

    @app.get("/api/games")
    def games() -> list[dict]:
        out = []
        for name in list_games(app.state.corpus_dir):
            desc = load_game(name, app.state.corpus_dir)
            out.append({"id": name, "levels": len(desc.levels)})
        return out

    @app.post("/api/sessions", response_model=SessionInfo)
    async def create_session(req: CreateSessionRequest) -> SessionInfo:
        if req.game_id not in list_games(app.state.corpus_dir):
            raise HTTPException(404, f"unknown game {req.game_id!r}")
        desc = load_game(req.game_id, app.state.corpus_dir)
        session = Session.create(
            participant_id=req.participant_id,
            game_id=req.game_id,
            desc=desc,
            seed=participant_seed(req.participant_id),
            tick_rate=req.tick_rate or app.state.default_tick_rate,
            max_ticks=app.state.max_ticks,
        )
        app.state.sessions[session.session_id] = session
        if app.state.start_loops:
            session.task = asyncio.create_task(session.run())
        return session.info()

    def _session(session_id: str) -> Session:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return session

    @app.get("/api/sessions/{session_id}", response_model=SessionInfo)
    def session_info(session_id: str) -> SessionInfo:
        return _session(session_id).info()

    @app.post("/api/sessions/{session_id}/survey", response_model=SurveyRecord)
    def submit_survey(session_id: str, req: SurveyRequest) -> SurveyRecord:
        session = _session(session_id)
        if not session.game_over:
            raise HTTPException(409, "survey opens when the game is over")
        resubmission = session_id in app.state.surveys
        record = SurveyRecord(
            session_id=session_id,
            played_before=req.played_before,
            difficulty=req.difficulty,
            interest=req.interest,
            excluded=req.played_before,
            resubmission=resubmission,
        )
        app.state.surveys[session_id] = record
        return record

    @app.get("/api/sessions/{session_id}/survey", response_model=SurveyRecord)
    def get_survey(session_id: str) -> SurveyRecord:
        _session(session_id)
        record = app.state.surveys.get(session_id)
        if record is None:
            raise HTTPException(404, "no survey submitted")
        return record

    @app.get("/api/sessions/{session_id}/log")
    def export_log(session_id: str):
        session = _session(session_id)
        log = session.log()
        import json

        body = "\n".join(
            json.dumps(r, separators=(",", ":")) for r in log.records
        ) + "\n"
        from fastapi.responses import PlainTextResponse

        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/api/sessions/{session_id}/verify")
    def verify(session_id: str):
        session = _session(session_id)
        result = verify_replay(session.log(), session.desc)
        return {
            "ok": result.ok,
            "first_divergence": result.first_divergence,
            "mean_tick_interval": session.mean_tick_interval(),
        }

    @app.websocket("/api/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = app.state.sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue = session.subscribe()
        await websocket.send_text(session.frame().model_dump_json())

        async def pump_frames():
            while True:
                frame: FrameMessage = await queue.get()
                await websocket.send_text(frame.model_dump_json())
                if frame.game_over:
                    return

        async def pump_inputs():
            while True:
                text = await websocket.receive_text()
                try:
                    message = InputMessage.model_validate_json(text)
                except ValueError:
                    continue  # unknown keys are dropped, never crash a session
                session.receive_key(message.key)

        frames = asyncio.create_task(pump_frames())
        inputs = asyncio.create_task(pump_inputs())
        try:
            done, pending = await asyncio.wait(
                {frames, inputs}, return_when=asyncio.FIRST_COMPLETED
            )
            for task in pending:
                task.cancel()
        except WebSocketDisconnect:
            pass
        finally:
            frames.cancel()
            inputs.cancel()
            session.unsubscribe(queue)
            try:
                await websocket.close()
            except Exception:
                pass

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="gridplay-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--corpus", type=Path, default=None)
    parser.add_argument("--tick-rate", type=float, default=DEFAULT_TICK_RATE)
    args = parser.parse_args()
    uvicorn.run(
        create_app(args.corpus, args.tick_rate),
        host=args.host,
        port=args.port,
    )


if __name__ == "__main__":
    main()
