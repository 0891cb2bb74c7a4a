"""Networked play sessions over HTTP + WebSocket.

One session wraps one episode engine.  Human seats submit actions over a
WebSocket in lockstep; scripted seats act on their own.  Feedback messages
pop up on the target seat and can be followed or ignored; the end screen
reveals the partner's goal and each seat's full feedback history.
"""

from __future__ import annotations

import asyncio
import json
import logging
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from . import mdkg, overcooked as oc
from .core import AGENT_NAMES, ScenarioConfig
from .engine import EpisodeEngine
from .baselines import FACILITATOR_KINDS, make_facilitator
from .core import fork_rng
from .harness import load_suite

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

_LEGEND = {
    "#": "wall or counter",
    ".": "floor",
    "/": "doorway",
    "A": "Alice",
    "Z": "Bob",
    "X": "chopping station",
    "S": "delivery station",
    "T": "fresh tomato",
    "L": "fresh lettuce",
    "O": "fresh onion",
    "t": "chopped tomato",
    "l": "chopped lettuce",
    "o": "chopped onion",
    "m": "plated tomato",
    "n": "plated lettuce",
    "p": "plated onion",
    "P": "plate",
    "R": "red door (locked)",
    "G": "green door (locked)",
    "B": "blue door (locked)",
    "Y": "yellow door (locked)",
    "r": "red key",
    "g": "green key",
    "b": "blue key",
    "y": "yellow key",
    "1": "gem 1",
    "2": "gem 2",
    "3": "gem 3",
    "4": "gem 4",
    "?": "not visible",
}


def _legend_for(render_rows: list[str]) -> dict[str, str]:
    present = {ch for row in render_rows for ch in row}
    return {ch: _LEGEND[ch] for ch in sorted(present) if ch in _LEGEND}


def resolve_interact(engine: EpisodeEngine, seat: int) -> str:
    """Map a bare 'interact' press onto the concrete action at this seat."""
    state = engine.state
    if engine.env_kind == "overcooked":
        pos = state.agent_pos[seat]
        lay = state.layout
        from .core import DIRECTIONS
        best = None
        for name, (dx, dy) in DIRECTIONS.items():
            target = (pos[0] + dx, pos[1] + dy)
            if not lay.surface(target):
                continue
            if best is None:
                best = name
            if state.item_at(target) is not None or target in lay.chop_stations \
                    or target in lay.delivery_stations:
                return f"interact:{name}"
        return f"interact:{best}" if best else "stay"
    legal = mdkg.legal_actions(state, seat)
    for prefix in ("pickup:", "unlock:", "handover:"):
        for a in legal:
            if a.startswith(prefix):
                return a
    return "stay"


class Session:
    """One episode, one facilitator, up to two human seats in lockstep."""

    def __init__(self, scenario: ScenarioConfig, human_seats: list[int],
                 facilitator_kind: str, seed: Optional[int]):
        self.session_id = uuid.uuid4().hex[:12]
        self.scenario = scenario
        self.human_seats = frozenset(human_seats)
        self.facilitator_kind = facilitator_kind
        use_seed = scenario.seed if seed is None else seed
        facilitator = make_facilitator(
            facilitator_kind, scenario.env, fork_rng(use_seed, "facilitator"))
        self.engine = EpisodeEngine(scenario, facilitator=facilitator,
                                    human_seats=self.human_seats, seed=use_seed)
        self.phase = "lobby" if self.human_seats else "running"
        self.joined: set[int] = set()
        self.ready: set[int] = set()
        self.sockets: dict[int, WebSocket] = {}
        self.submitted: dict[int, str] = {}
        self.ignored: dict[int, str] = {}
        self.lock = asyncio.Lock()

    # -- views ---------------------------------------------------------------

    def seat_view(self, seat: int) -> dict:
        engine = self.engine
        state = engine.state
        if engine.env_kind == "mdkg":
            rows = mdkg.render(state)
            visible = [[x, y] for y in range(state.height) for x in range(state.width)]
        else:
            vis = oc.observe(state, seat)
            full = oc.render(state)
            rows = []
            for y, row in enumerate(full):
                out = ""
                for x, ch in enumerate(row):
                    out += ch if (x, y) in vis.cells else "?"
                rows.append(out)
            visible = [list(c) for c in sorted(vis.cells)]
        pending = engine.delivery[seat]
        return {
            "protocol": PROTOCOL_VERSION,
            "type": "observation",
            "tick": state.timestep,
            "seat": seat,
            "render": rows,
            "visible": visible,
            "legend": _legend_for(rows),
            "own_goal": self.scenario.agents[seat].goal,
            "feedback": pending.to_json() if pending else None,
        }

    def lobby_state(self) -> dict:
        return {
            "protocol": PROTOCOL_VERSION,
            "type": "lobby_state",
            "session_id": self.session_id,
            "scenario_id": self.scenario.scenario_id,
            "env": self.scenario.env,
            "phase": self.phase,
            "human_seats": sorted(self.human_seats),
            "joined": sorted(self.joined),
            "ready": sorted(self.ready),
        }

    def episode_end(self, seat: int) -> dict:
        t = self.engine.log.terminal
        other = 1 - seat
        return {
            "protocol": PROTOCOL_VERSION,
            "type": "episode_end",
            "seat": seat,
            "other_goal": self.scenario.agents[other].goal,
            "other_name": AGENT_NAMES[other],
            "completion": {
                "success": t.get("success"),
                "length": t.get("length"),
                "reason": t.get("reason"),
                "feedback_count": t.get("feedback_count"),
            },
            "feedback_history": self.engine.feedback_history,
        }

    # -- lockstep ------------------------------------------------------------

    def summary(self) -> dict:
        return {
            "session_id": self.session_id,
            "scenario_id": self.scenario.scenario_id,
            "env": self.scenario.env,
            "facilitator": self.facilitator_kind,
            "phase": self.phase,
            "tick": self.engine.state.timestep,
            "human_seats": sorted(self.human_seats),
        }

    def maybe_start(self) -> bool:
        if self.phase == "lobby" and self.ready >= self.human_seats:
            self.phase = "running"
            return True
        return False

    def step_if_complete(self) -> Optional[dict]:
        """Advance one tick once every human seat has an action queued."""
        if self.phase != "running":
            return None
        if set(self.submitted) < self.human_seats:
            return None
        actions = dict(self.submitted)
        self.submitted.clear()
        record = self.engine.tick(actions)
        for seat, mid in list(self.ignored.items()):
            if self.engine.ignore_feedback(seat, mid):
                record["status_events"].append(
                    {"agent": seat, "message_id": mid, "status": "Ignored"})
            del self.ignored[seat]
        if self.engine.terminated:
            self.phase = "finished"
        return record

    def run_scripted(self) -> None:
        """Drive a session with no human seats to completion."""
        if self.human_seats:
            raise ValueError("session has human seats")
        while not self.engine.terminated:
            self.engine.tick()
        self.phase = "finished"


class SessionStore:
    def __init__(self):
        self.sessions: dict[str, Session] = {}

    def create(self, scenario: ScenarioConfig, human_seats: list[int],
               facilitator_kind: str, seed: Optional[int]) -> Session:
        session = Session(scenario, human_seats, facilitator_kind, seed)
        self.sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session") from None


def _all_scenarios() -> dict[str, ScenarioConfig]:
    out = {}
    for name in ("mdkg", "overcooked"):
        for s in load_suite(name).scenarios:
            out[s.scenario_id] = s
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="gridsocial play service")
    store = SessionStore()
    app.state.store = store

    @app.get("/scenarios")
    def list_scenarios():
        return [
            {"scenario_id": s.scenario_id, "env": s.env, "category": s.category}
            for s in _all_scenarios().values()
        ]

    @app.post("/sessions")
    def create_session(body: dict):
        scenarios = _all_scenarios()
        if "scenario" in body:
            scenario = ScenarioConfig.from_json(body["scenario"])
        else:
            sid = body.get("scenario_id", "")
            if sid not in scenarios:
                raise HTTPException(status_code=404, detail=f"unknown scenario {sid!r}")
            scenario = scenarios[sid]
        kind = body.get("facilitator", "prosocial")
        if kind not in FACILITATOR_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown facilitator {kind!r}")
        seats = body.get("human_seats", [0])
        if any(s not in (0, 1) for s in seats):
            raise HTTPException(status_code=400, detail="seats must be 0 or 1")
        session = store.create(scenario, seats, kind, body.get("seed"))
        return {"protocol": PROTOCOL_VERSION, "session_id": session.session_id,
                **session.summary()}

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        return store.get(session_id).summary()

    @app.post("/sessions/{session_id}/run")
    def run_session(session_id: str):
        session = store.get(session_id)
        if session.human_seats:
            raise HTTPException(status_code=400, detail="session has human seats")
        if session.phase != "finished":
            session.run_scripted()
        return session.summary()

    @app.get("/sessions/{session_id}/log")
    def session_log(session_id: str):
        session = store.get(session_id)
        if session.phase != "finished":
            raise HTTPException(status_code=409, detail="episode not finished")
        return {"scenario_id": session.scenario.scenario_id,
                "seed": session.engine.seed,
                "jsonl": session.engine.log.to_jsonl()}

    async def broadcast(session: Session, record: Optional[dict]) -> None:
        if record is not None:
            payload = {
                "protocol": PROTOCOL_VERSION,
                "type": "tick_result",
                "tick": record["t"],
                "actions": record["actions"],
                "status_events": record["status_events"],
                "done": record["done"],
            }
            for ws in session.sockets.values():
                await ws.send_json(payload)
        for seat, ws in session.sockets.items():
            if session.phase == "finished":
                await ws.send_json(session.episode_end(seat))
            else:
                await ws.send_json(session.seat_view(seat))

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(ws: WebSocket, session_id: str):
        await ws.accept()
        session = store.sessions.get(session_id)
        if session is None:
            await ws.send_json({"protocol": PROTOCOL_VERSION, "type": "error",
                                "error": "unknown session"})
            await ws.close()
            return
        seat: Optional[int] = None
        try:
            while True:
                msg = await ws.receive_json()
                async with session.lock:
                    kind = msg.get("type")
                    if kind == "join":
                        seat = int(msg.get("seat", -1))
                        if seat not in session.human_seats:
                            await ws.send_json({"protocol": PROTOCOL_VERSION,
                                                "type": "error",
                                                "error": f"seat {seat} is not a human seat"})
                            seat = None
                            continue
                        session.joined.add(seat)
                        session.sockets[seat] = ws
                        await ws.send_json(session.lobby_state())
                    elif kind == "ready" and seat is not None:
                        session.ready.add(seat)
                        if session.maybe_start():
                            await broadcast(session, None)
                        else:
                            await ws.send_json(session.lobby_state())
                    elif kind == "action" and seat is not None:
                        tick = msg.get("tick")
                        if tick != session.engine.state.timestep:
                            await ws.send_json({
                                "protocol": PROTOCOL_VERSION, "type": "error",
                                "error": "stale tick",
                                "tick": session.engine.state.timestep,
                            })
                            continue
                        action = msg.get("action", "stay")
                        if action == "interact":
                            action = resolve_interact(session.engine, seat)
                        session.submitted[seat] = action
                        record = session.step_if_complete()
                        if record is not None:
                            await broadcast(session, record)
                    elif kind == "ignore_feedback" and seat is not None:
                        mid = msg.get("id", "")
                        if session.engine.ignore_feedback(seat, mid):
                            await ws.send_json({"protocol": PROTOCOL_VERSION,
                                                "type": "feedback_status",
                                                "id": mid, "status": "Ignored"})
                        else:
                            session.ignored[seat] = mid
                            await ws.send_json({"protocol": PROTOCOL_VERSION,
                                                "type": "feedback_status",
                                                "id": mid, "status": "IgnoreQueued"})
                    else:
                        await ws.send_json({"protocol": PROTOCOL_VERSION,
                                            "type": "error",
                                            "error": f"unknown message {kind!r}"})
        except WebSocketDisconnect:
            if seat is not None:
                session.sockets.pop(seat, None)

    return app


app = create_app()
