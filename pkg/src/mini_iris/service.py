"""JSON-over-HTTP session service for the companion UI.

Routes (see schema/state_dto_v1.json for the state payload):
  POST /sessions {script, lemma}      -> {id, state}
  POST /sessions/{id}/tactic {text}   -> {state, error?}
  POST /sessions/{id}/undo            -> {state}
  GET  /sessions/{id}/state           -> {state}
  GET  /corpus                        -> [{name, text}]
  GET  /healthz                       -> 200
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import corpus_files
from .engine import NothingToUndo
from .parser import ParseError
from .session import SessionComplete, SessionStore, UnknownLemma


class CreateSessionBody(BaseModel):
    script: str
    lemma: str


class TacticBody(BaseModel):
    text: str


def create_app(idle_timeout_secs: int = 3600, ui_dir: str | None = None,
               cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="mini-iris session service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(idle_timeout_secs=idle_timeout_secs)
    app.state.store = store

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/corpus")
    def corpus():
        return [{"name": name, "text": text} for name, text in corpus_files()]

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            sid, dto = store.create(body.script, body.lemma)
        except ParseError as e:
            raise HTTPException(
                status_code=400,
                detail={"message": e.message, "line": e.line, "column": e.col},
            )
        except UnknownLemma:
            raise HTTPException(status_code=404, detail=f"no lemma named {body.lemma}")
        return {"id": sid, "state": dto}

    @app.post("/sessions/{sid}/tactic")
    def apply_tactic(sid: str, body: TacticBody):
        try:
            dto = store.apply(sid, body.text)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionComplete:
            raise HTTPException(status_code=409, detail="session already complete")
        return {"state": dto, "error": dto.get("error")}

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        try:
            dto = store.undo(sid)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except NothingToUndo:
            raise HTTPException(status_code=409, detail="nothing to undo")
        return {"state": dto}

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        try:
            dto = store.get_state(sid)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        return {"state": dto}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
