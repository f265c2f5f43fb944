"""HTTP facade for the sign-off loop and run monitoring.

Sessions walk a strict state machine: planning -> awaiting_approval ->
(planning | executing) -> done | failed. Execution never starts without an
explicit approve call; events are sequenced per session and replayable from
any offset for late or reconnecting subscribers (SSE with Last-Event-ID).
"""
from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Iterator

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .architect import ArchitectFailure, ArchitectRequest, ProposedPlan, propose_plan, revise_plan
from .evaluator import Harness
from .executor import Executor, RunResult, VARIANT_FULL, VARIANTS, static_leg
from .gateway import UsageLedger
from .leg import compile_leg
from .provenance import Ledger
from .registry import catalog_for_architect
from .tools import FaultPlan

PLANNING = "planning"
AWAITING_APPROVAL = "awaiting_approval"
EXECUTING = "executing"
DONE = "done"
FAILED = "failed"

_TRANSITIONS = {
    PLANNING: {AWAITING_APPROVAL, FAILED},
    AWAITING_APPROVAL: {PLANNING, EXECUTING, FAILED},
    EXECUTING: {DONE, FAILED},
    DONE: set(),
    FAILED: set(),
}


@dataclass
class ExecutionEvent:
    session_id: str
    seq: int
    kind: str
    payload: dict
    at: float

    def to_dict(self) -> dict:
        return {"session_id": self.session_id, "seq": self.seq, "kind": self.kind, "payload": self.payload, "at": self.at}


@dataclass
class RunSession:
    session_id: str
    query_text: str
    variant: str = VARIANT_FULL
    fault_agent: str | None = None
    state: str = PLANNING
    proposed: ProposedPlan | None = None
    result: RunResult | None = None
    revision_count: int = 0
    error: str | None = None
    events: list[ExecutionEvent] = field(default_factory=list)
    _model: object = None
    _seq: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _wakeups: list[threading.Event] = field(default_factory=list)

    def transition(self, new_state: str) -> None:
        with self._lock:
            if new_state not in _TRANSITIONS[self.state]:
                raise IllegalTransition(f"cannot move from {self.state} to {new_state}")
            self.state = new_state

    def emit(self, kind: str, payload: dict) -> ExecutionEvent:
        with self._lock:
            self._seq += 1
            ev = ExecutionEvent(self.session_id, self._seq, kind, payload, time.time())
            self.events.append(ev)
            waiters, self._wakeups = self._wakeups, []
        for w in waiters:
            w.set()
        return ev

    def events_after(self, seq: int) -> list[ExecutionEvent]:
        with self._lock:
            return [e for e in self.events if e.seq > seq]

    def wait_for_event(self, timeout: float) -> None:
        waiter = threading.Event()
        with self._lock:
            self._wakeups.append(waiter)
        waiter.wait(timeout)


class IllegalTransition(RuntimeError):
    pass


class SubmitBody(BaseModel):
    query: str
    variant: str = VARIANT_FULL
    fault_agent: str | None = None


class ReviseBody(BaseModel):
    feedback: str


class GatewayService:
    """Session store and orchestration glue behind the HTTP surface."""

    def __init__(
        self,
        harness: Harness,
        ledger: Ledger | None = None,
        revision_cap: int = 10,
        auth_token: str | None = None,
        synchronous: bool = False,
    ):
        self.harness = harness
        self.ledger = ledger or Ledger()
        self.revision_cap = revision_cap
        self.auth_token = auth_token
        self.synchronous = synchronous  # run executor inline (tests)
        self.sessions: dict[str, RunSession] = {}
        self._lock = threading.Lock()

    # -- session lifecycle ----------------------------------------------------

    def _model_for(self, session: RunSession):
        entry_like = _SessionEntry(session.query_text)
        return self.harness.model_factory(entry_like, session.variant)

    def submit(self, query: str, variant: str = VARIANT_FULL, fault_agent: str | None = None) -> RunSession:
        if variant not in VARIANTS:
            raise HTTPException(status_code=400, detail=f"unknown variant {variant!r}")
        session = RunSession(session_id=str(uuid.uuid4()), query_text=query, variant=variant, fault_agent=fault_agent)
        with self._lock:
            self.sessions[session.session_id] = session
        try:
            session._model = self._model_for(session)  # one scripted replay per session
        except FileNotFoundError as e:
            raise HTTPException(status_code=400, detail=str(e))
        try:
            if session.variant == "fixed_graph":
                leg = static_leg(self.harness.registry)
                session.proposed = None
                session.transition(AWAITING_APPROVAL)
                session.emit("plan_proposed", {"plan": leg.plan.to_dict(), "leg": leg.to_dict(), "static": True})
            else:
                proposed = propose_plan(
                    ArchitectRequest(
                        query_text=query,
                        catalog=tuple(catalog_for_architect(self.harness.registry)),
                        heuristics_text=self.harness.heuristics_text,
                    ),
                    session._model,
                    self.harness.registry,
                    self.harness.patterns,
                )
                session.proposed = proposed
                session.transition(AWAITING_APPROVAL)
                leg = compile_leg(proposed.plan, self.harness.registry)
                session.emit(
                    "plan_proposed",
                    {"plan": proposed.plan.to_dict(), "leg": leg.to_dict(), "rewrite_log": list(proposed.rewrite_log)},
                )
        except ArchitectFailure as e:
            session.error = str(e)
            session.transition(FAILED)
            session.emit("failed", {"error": str(e)})
        return session

    def get_session(self, session_id: str) -> RunSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def revise(self, session_id: str, feedback: str) -> RunSession:
        session = self.get_session(session_id)
        if session.state != AWAITING_APPROVAL:
            raise HTTPException(status_code=409, detail=f"cannot revise in state {session.state}")
        if session.revision_count >= self.revision_cap:
            raise HTTPException(status_code=409, detail="revision cap exceeded")
        if session.proposed is None:
            raise HTTPException(status_code=409, detail="static plan cannot be revised")
        session.transition(PLANNING)
        try:
            proposed = revise_plan(
                ArchitectRequest(
                    query_text=session.query_text,
                    catalog=tuple(catalog_for_architect(self.harness.registry)),
                    heuristics_text=self.harness.heuristics_text,
                    revision_feedback=feedback,
                    prior_plan=session.proposed.plan,
                ),
                session._model,
                self.harness.registry,
                self.harness.patterns,
                prior_revision=session.revision_count,
            )
        except ValueError as e:
            session.transition(AWAITING_APPROVAL)
            raise HTTPException(status_code=400, detail=str(e))
        except ArchitectFailure as e:
            session.error = str(e)
            session.transition(FAILED)
            session.emit("failed", {"error": str(e)})
            return session
        session.revision_count += 1
        session.proposed = proposed
        session.transition(AWAITING_APPROVAL)
        leg = compile_leg(proposed.plan, self.harness.registry)
        session.emit(
            "plan_proposed",
            {
                "plan": proposed.plan.to_dict(),
                "leg": leg.to_dict(),
                "rewrite_log": list(proposed.rewrite_log),
                "revision": session.revision_count,
            },
        )
        return session

    def approve(self, session_id: str) -> RunSession:
        session = self.get_session(session_id)
        try:
            session.transition(EXECUTING)
        except IllegalTransition as e:
            raise HTTPException(status_code=409, detail=str(e))
        session.emit("approved", {})
        if self.synchronous:
            self._execute(session)
        else:
            threading.Thread(target=self._execute, args=(session,), daemon=True).start()
        return session

    def _execute(self, session: RunSession) -> None:
        try:
            if session.variant == "fixed_graph":
                leg = static_leg(self.harness.registry)
                usage = UsageLedger()
            else:
                leg = compile_leg(session.proposed.plan, self.harness.registry)
                usage = UsageLedger()
                usage.accumulate("architect", session.proposed.usage)
            trace_id = self.ledger.open_trace(session.query_text)
            executor = Executor(
                registry=self.harness.registry,
                model=session._model,
                tools=self.harness.tool_backend,
                ledger=self.ledger,
                round_cap=self.harness.round_cap,
                width=self.harness.width,
                on_event=lambda kind, payload: session.emit(kind, payload),
            )
            fault = FaultPlan(session.fault_agent) if session.fault_agent else None
            result = executor.execute(
                leg, session.query_text, variant=session.variant, fault=fault, trace_id=trace_id, usage=usage
            )
            session.result = result
            if result.failed:
                session.error = result.error
                session.transition(FAILED)
                session.emit("failed", {"error": result.error or ""})
            else:
                session.transition(DONE)
                session.emit(
                    "reported",
                    {"final_text": result.final_text, "trace_id": result.trace_id},
                )
        except Exception as e:  # noqa: BLE001 - session must reach a terminal state
            session.error = str(e)
            try:
                session.transition(FAILED)
            except IllegalTransition:
                pass
            session.emit("failed", {"error": str(e)})


@dataclass
class _SessionEntry:
    """Minimal stand-in so the model factory can key off the query text."""

    query: str
    id: str = "session"
    scenario_script: str = ""


def session_doc(session: RunSession) -> dict:
    doc = {
        "session_id": session.session_id,
        "state": session.state,
        "query": session.query_text,
        "variant": session.variant,
        "revision_count": session.revision_count,
        "error": session.error,
    }
    if session.proposed is not None:
        doc["plan"] = session.proposed.plan.to_dict()
        doc["rewrite_log"] = list(session.proposed.rewrite_log)
    if session.result is not None:
        doc["final_text"] = session.result.final_text
        doc["trace_id"] = session.result.trace_id
    return doc


def create_app(service: GatewayService, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="legflow gateway")

    def _auth(request: Request) -> None:
        if service.auth_token and request.headers.get("x-auth-token") != service.auth_token:
            raise HTTPException(status_code=401, detail="bad token")

    @app.post("/sessions")
    def submit(body: SubmitBody, request: Request):
        _auth(request)
        session = service.submit(body.query, body.variant, body.fault_agent)
        return JSONResponse(session_doc(session), status_code=201)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str, request: Request):
        _auth(request)
        return session_doc(service.get_session(session_id))

    @app.get("/sessions/{session_id}/plan")
    def get_plan(session_id: str, request: Request):
        _auth(request)
        session = service.get_session(session_id)
        if session.proposed is None and session.variant != "fixed_graph":
            raise HTTPException(status_code=409, detail=f"no plan in state {session.state}")
        if session.variant == "fixed_graph":
            leg = static_leg(service.harness.registry)
            return {"plan": leg.plan.to_dict(), "leg": leg.to_dict(), "static": True}
        leg = compile_leg(session.proposed.plan, service.harness.registry)
        return {
            "plan": session.proposed.plan.to_dict(),
            "leg": leg.to_dict(),
            "rewrite_log": list(session.proposed.rewrite_log),
            "revision": session.revision_count,
        }

    @app.post("/sessions/{session_id}/approve")
    def approve(session_id: str, request: Request):
        _auth(request)
        return session_doc(service.approve(session_id))

    @app.post("/sessions/{session_id}/revise")
    def revise(session_id: str, body: ReviseBody, request: Request):
        _auth(request)
        return session_doc(service.revise(session_id, body.feedback))

    @app.get("/sessions/{session_id}/events")
    def events(
        session_id: str,
        request: Request,
        stream: bool = Query(default=False),
        after: int = Query(default=0),
    ):
        _auth(request)
        session = service.get_session(session_id)
        if not stream:
            return [e.to_dict() for e in session.events_after(after)]

        last_id = request.headers.get("last-event-id")
        start_seq = int(last_id) if last_id and last_id.isdigit() else after

        def frames() -> Iterator[str]:
            seq = start_seq
            idle = 0.0
            while True:
                batch = session.events_after(seq)
                for ev in batch:
                    seq = ev.seq
                    yield f"event: {ev.kind}\nid: {ev.seq}\ndata: {json.dumps(ev.payload, sort_keys=True)}\n\n"
                if session.state in (DONE, FAILED) and not session.events_after(seq):
                    return
                if not batch:
                    session.wait_for_event(0.1)
                    idle += 0.1
                    if idle > 120:
                        return
                else:
                    idle = 0.0

        return StreamingResponse(frames(), media_type="text/event-stream")

    @app.get("/traces")
    def traces(request: Request):
        _auth(request)
        return {"trace_ids": service.ledger.trace_ids()}

    @app.get("/traces/{trace_id}")
    def trace(
        trace_id: str,
        request: Request,
        node: str | None = None,
        tool: str | None = None,
        outcome: str | None = None,
        kind: str | None = None,
    ):
        _auth(request)
        try:
            records = service.ledger.query_ledger(trace_id, node=node, tool=tool, outcome=outcome, kind=kind)
        except Exception:
            raise HTTPException(status_code=404, detail="unknown trace")
        return {"trace_id": trace_id, "records": records}

    @app.get("/traces/{trace_id}/export")
    def export(trace_id: str, request: Request):
        _auth(request)
        try:
            return service.ledger.export_trace(trace_id)
        except Exception:
            raise HTTPException(status_code=404, detail="unknown trace")

    @app.get("/registry/catalog")
    def catalog(request: Request):
        _auth(request)
        return [c.to_dict() for c in catalog_for_architect(service.harness.registry)]

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
