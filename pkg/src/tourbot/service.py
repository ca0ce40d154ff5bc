"""HTTP surface: session creation, utterances, transcripts, health.

Every session gets its own lock, so concurrent posts to one session queue
up and execute one at a time; distinct sessions run fully in parallel
against the shared read-only catalog.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .engine import DialogEngine, Session
from .errors import ConfigurationError, TerminalSessionError
from .transcript import serialize_records
from .types import AgentTurn, SightAssignment


class CreateSessionBody(BaseModel):
    candidate_a: str
    candidate_b: str
    recommended: str


class UtteranceBody(BaseModel):
    text: str


@dataclass
class SessionRegistry:
    sessions: dict[str, Session] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    _registry_lock: threading.Lock = field(default_factory=threading.Lock)

    def add(self, session: Session) -> None:
        with self._registry_lock:
            self.sessions[session.session_id] = session
            self.locks[session.session_id] = threading.Lock()

    def get(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._registry_lock:
            session = self.sessions.get(session_id)
            if session is None:
                raise KeyError(session_id)
            return session, self.locks[session_id]


def turn_to_obj(turn: AgentTurn, ts: str) -> dict:
    return {
        "ts": ts,
        "text": turn.text,
        "phase": turn.phase.value,
        "annotations": {
            "expression": turn.annotations.expression,
            "nod_cue": turn.annotations.nod_cue,
            "look_at_monitor": turn.annotations.look_at_monitor,
            "provenance": turn.annotations.provenance,
        },
    }


def create_app(engine: DialogEngine) -> FastAPI:
    app = FastAPI(title="tourbot", version="0.1.0")
    registry = SessionRegistry()
    app.state.engine = engine
    app.state.registry = registry

    def _serialize_turns(session: Session, turns: list[AgentTurn]) -> list[dict]:
        ts = session.transcript[-1].ts.isoformat(timespec="microseconds") if session.transcript else ""
        return [turn_to_obj(t, ts) for t in turns]

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "sights": len(engine.catalog)}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        try:
            assignment = SightAssignment(
                candidate_a=body.candidate_a,
                candidate_b=body.candidate_b,
                recommended=body.recommended,
            )
            session = engine.create_session(assignment)
        except ConfigurationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        registry.add(session)
        lock = registry.get(session.session_id)[1]
        with lock:
            turns = engine.advance(session, None)
        return {
            "session_id": session.session_id,
            "first_turns": _serialize_turns(session, turns),
            "phase": session.phase.value,
            "elapsed": engine.elapsed(session),
            "time_budget": session.time_budget,
        }

    @app.post("/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody) -> dict:
        try:
            session, lock = registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with lock:  # concurrent posts to one session queue here
            try:
                turns = engine.advance(session, body.text)
            except TerminalSessionError:
                raise HTTPException(status_code=410, detail="session is finished")
            payload = {
                "turns": _serialize_turns(session, turns),
                "phase": session.phase.value,
                "elapsed": engine.elapsed(session),
                "time_budget": session.time_budget,
            }
        return payload

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str) -> Response:
        try:
            session, lock = registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with lock:
            payload = serialize_records(session.transcript)
        return Response(content=payload, media_type="application/x-ndjson")

    return app
