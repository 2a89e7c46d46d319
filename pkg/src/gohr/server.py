"""JSON-over-HTTP game service for agents and human players.

Sessions are in-memory; ids are sequential so replaying a recorded request
sequence against a fresh server (same seeds) reproduces identical
responses. Per-session requests serialize behind a lock. The active rule
is never revealed to a human session while its episode runs; with the
server's debug flag the rule is included once the episode has finished.
Optional JSONL persistence appends every (request, response) pair.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

import random

from . import engine
from .board import AddressingError, ConfigError, EpisodeFinishedError
from .rules import (
    TrialList,
    UnknownRuleError,
    catalog_names,
    experiment_rules,
    parse_trial_list,
    property_tags,
    resolve_rule,
    rule_description,
)


class CreateEpisodeRequest(BaseModel):
    rule: str | None = None
    trial_list: str | None = None
    n: int = 9
    seed: int | None = None
    mode: str = "all"
    client: str = Field(default="agent", pattern="^(agent|human)$")
    move_cap: int | None = None


class MoveRequest(BaseModel):
    piece_id: int
    bucket: int


@dataclass
class Session:
    session_id: str
    client: str
    mode: str
    n: int
    seed: int
    move_cap: int | None
    trial_list: TrialList | None
    phase: int  # 1-based index into the trial list (0 for plain rule sessions)
    rule_name: str
    episode: engine.Episode
    lock: threading.Lock = field(default_factory=threading.Lock)
    episode_index: int = 1
    created_at: float = field(default_factory=time.time)  # never serialized (replay determinism)


def _new_episode(session: Session) -> engine.Episode:
    spec = resolve_rule(session.rule_name)
    # Per-episode seeds derive deterministically from the session seed.
    ep_seed = session.seed + 7919 * (session.episode_index - 1) + 104729 * max(session.phase - 1, 0)
    cap = session.move_cap if session.move_cap is not None else engine.DEFAULT_MOVE_CAP
    return engine.new_episode(spec, n=session.n, seed=ep_seed, position_set=session.mode, move_cap=cap)


def create_app(debug: bool = False, log_path: str | None = None) -> FastAPI:
    app = FastAPI(title="gohr game service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    counter = {"n": 0}

    def record(request: dict, response: dict):
        if log_path:
            with open(log_path, "a") as fh:
                fh.write(json.dumps({"request": request, "response": response}, sort_keys=True) + "\n")

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return s

    def session_view(s: Session, full: bool = False) -> dict:
        out = {
            "session_id": s.session_id,
            "client": s.client,
            "mode": s.mode,
            "n": s.n,
            "seed": s.seed,
            "board": engine.board_snapshot(s.episode),
            "episode_index": s.episode_index,
        }
        if s.trial_list is not None:
            out["phase"] = s.phase
            out["phases_total"] = len(s.trial_list.phases)
        finished = not s.episode.ongoing
        # Hidden-rule contract: humans never see the rule during play.
        if s.client == "agent" or (finished and debug):
            out["rule"] = s.rule_name
            if finished and debug:
                out["rule_description"] = rule_description(s.rule_name)
        if full:
            out["move_cap"] = s.episode.move_cap
        return out

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc):
        status = 400 if isinstance(exc, UnknownRuleError) else 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.post("/episodes", status_code=201)
    def create_episode(req: CreateEpisodeRequest):
        if (req.rule is None) == (req.trial_list is None):
            raise HTTPException(status_code=422, detail="provide exactly one of rule, trial_list")
        trial = None
        rule_name = req.rule
        with registry_lock:
            counter["n"] += 1
            session_id = f"s{counter['n']}"
            seed = req.seed if req.seed is not None else counter["n"] * 1_000_003
        if req.trial_list is not None:
            trial = parse_trial_list(req.trial_list)
            if not trial.phases:
                raise HTTPException(status_code=422, detail="trial list has no phases")
            rule_name = trial.active_rules[0]
        elif req.rule == "random":
            # Hidden-rule play: sample from the 18-rule experiment set,
            # seed-derived so request replay stays deterministic.
            rule_name = random.Random(seed).choice(experiment_rules())
        else:
            resolve_rule(req.rule)  # raises UnknownRuleError -> 400
        session = Session(
            session_id=session_id,
            client=req.client,
            mode=req.mode,
            n=req.n,
            seed=seed,
            move_cap=req.move_cap,
            trial_list=trial,
            phase=1 if trial is not None else 0,
            rule_name=rule_name,
            episode=None,  # type: ignore[arg-type]
        )
        session.episode = _new_episode(session)
        sessions[session_id] = session
        body = session_view(session)
        record({"op": "create", **req.model_dump()}, body)
        return body

    @app.post("/episodes/{session_id}/moves")
    def make_move(session_id: str, req: MoveRequest):
        s = get_session(session_id)
        with s.lock:
            if not s.episode.ongoing:
                raise HTTPException(status_code=409, detail="episode finished")
            try:
                outcome = engine.attempt_move(s.episode, req.piece_id, req.bucket)
            except AddressingError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            except EpisodeFinishedError:
                raise HTTPException(status_code=409, detail="episode finished")
            body = {
                "response_code": outcome.response_code,
                "reward": outcome.reward,
                "finish_code": outcome.finish_code,
                "move_count": outcome.move_count,
                "board": engine.board_snapshot(s.episode),
            }
        record({"op": "move", "session_id": session_id, **req.model_dump()}, body)
        return body

    @app.post("/episodes/{session_id}/advance")
    def advance_phase(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if s.trial_list is None:
                raise HTTPException(status_code=409, detail="session has no trial list")
            if s.phase >= len(s.trial_list.phases):
                raise HTTPException(status_code=409, detail="no further phases")
            s.phase += 1
            s.rule_name = s.trial_list.active_rules[s.phase - 1]
            s.episode_index = 1
            s.episode = _new_episode(s)
            body = session_view(s)
        record({"op": "advance", "session_id": session_id}, body)
        return body

    @app.post("/episodes/{session_id}/restart")
    def restart_episode(session_id: str):
        """Fresh board in the same session (same phase, next derived seed)."""
        s = get_session(session_id)
        with s.lock:
            s.episode_index += 1
            s.episode = _new_episode(s)
            body = session_view(s)
        record({"op": "restart", "session_id": session_id}, body)
        return body

    @app.get("/episodes/{session_id}")
    def get_episode(session_id: str):
        s = get_session(session_id)
        with s.lock:
            return session_view(s, full=True)

    @app.get("/rules")
    def list_rules():
        return {
            "rules": [
                {"name": name, "tags": sorted(property_tags(name))}
                for name in catalog_names()
            ]
        }

    return app


def main(argv=None):
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the game service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--debug", action="store_true", help="reveal the rule after finished episodes")
    parser.add_argument("--log", default=None, help="append (request, response) JSONL here")
    args = parser.parse_args(argv)
    uvicorn.run(create_app(debug=args.debug, log_path=args.log), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
