"""HTTP API over the case-base, retrieval, outranking, and session pipeline.

Every response is an envelope carrying exactly one of ``payload`` or
``error``; error codes map 1:1 onto the module exception taxonomy. Session
commands are serialized per session, and retention plus the model refit and
file write happen under one global writer lock.
"""

from __future__ import annotations

import threading
import uuid
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import casebase as cb_mod
from . import evaluation, pipeline, similarity, store
from .audit import AuditLog
from .config import EngineConfig
from .electre import criteria_config_from_dict, criteria_config_to_dict
from .errors import (
    ArgumentError,
    CdssError,
    DuplicateIdError,
    SessionNotFoundError,
    StartupError,
)
from .pipeline import DecisionSession, ReviewVerdict

#: HTTP status per error code; the contract test walks this table.
ERROR_STATUS = {
    "malformed_record": 400,
    "field_parse": 400,
    "diagnosis_domain": 400,
    "empty_input": 400,
    "invalid_argument": 400,
    "duplicate_id": 409,
    "validation": 400,
    "casebase_io": 500,
    "fit_error": 500,
    "unknown_bin": 400,
    "not_discretized": 500,
    "stale_model": 409,
    "unknown_label": 400,
    "unknown_action": 400,
    "sequencing": 409,
    "no_candidates": 409,
    "incomplete_assessment": 400,
    "invalid_choice": 400,
    "retention_refused": 409,
    "session_not_found": 404,
    "startup": 500,
    "internal": 500,
}


@dataclass
class ServiceConfig:
    casebase_path: Path
    host: str = "127.0.0.1"
    port: int = 8000
    k_default: int = 5
    engine: EngineConfig = field(default_factory=EngineConfig)
    audit_path: Optional[Path] = None
    static_dir: Optional[Path] = None

    def resolved_audit_path(self) -> Path:
        if self.audit_path is not None:
            return Path(self.audit_path)
        return Path(str(self.casebase_path) + ".audit.jsonl")


class EngineState:
    """Mutable service state: case-base snapshot, fitted model, live sessions."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        try:
            cb, model = store.load_saved_case_base(config.casebase_path)
        except CdssError as exc:
            raise StartupError(
                f"cannot serve case-base {config.casebase_path}: {exc.message}") from exc
        if cb.bin_edges is None:
            raise StartupError(
                "case-base file has no bin edges; rebuild it with the build command")
        self.cb = cb
        self.model = model if model is not None else similarity.fit_vdm(
            cb, alpha=config.engine.alpha, q=config.engine.q)
        self.audit = AuditLog(config.resolved_audit_path())
        self.sessions: dict[str, DecisionSession] = self.audit.replay()
        self.write_lock = threading.RLock()
        self._session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._session_locks[session_id]

    def get_session(self, session_id: str) -> DecisionSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFoundError(f"no session {session_id!r}") from None

    def retain(self, session: DecisionSession, diagnosis: int):
        """Retention, refit, and persistence as one serialized step."""
        with self.write_lock:
            new_cb, stored = pipeline.adapt_and_retain(session, self.cb, diagnosis)
            model = similarity.fit_vdm(
                new_cb, alpha=self.config.engine.alpha, q=self.config.engine.q)
            store.save_case_base(new_cb, self.config.casebase_path, model)
            self.cb = new_cb
            self.model = model
        return stored


# envelope helpers -------------------------------------------------------------

def _envelope_ok(payload) -> dict:
    return {"request_id": uuid.uuid4().hex, "payload": payload}


def _envelope_error(code: str, message: str, details=None) -> JSONResponse:
    return JSONResponse(
        status_code=ERROR_STATUS.get(code, 500),
        content={
            "request_id": uuid.uuid4().hex,
            "error": {"code": code, "message": message, "details": details},
        },
    )


# request bodies ----------------------------------------------------------------

class OpenSessionBody(BaseModel):
    descriptors: list[float]
    physician_actions: list[str] = []
    acceptance_radius: Optional[float] = None
    session_id: Optional[str] = None
    #: optional criteria + thresholds override (same shape as the config file)
    criteria_config: Optional[dict] = None


class RetrieveBody(BaseModel):
    k: Optional[int] = None


class AssessmentCell(BaseModel):
    action: str
    criterion: str
    label: str


class AssessmentBody(BaseModel):
    cells: list[AssessmentCell]


class DesignBody(BaseModel):
    c_hat: Optional[float] = None
    d_hat: Optional[float] = None


class ChoiceBody(BaseModel):
    action: str


class ReviewBody(BaseModel):
    verdict: str
    revised_action: Optional[str] = None


class RetainBody(BaseModel):
    diagnosis: int


class ExperimentBody(BaseModel):
    train_size: int = 512
    n_pos: int = 10
    n_neg: int = 10
    k: Optional[int] = None
    seed: Optional[int] = None
    split_seed: Optional[int] = None


# views ---------------------------------------------------------------------------

def session_view(state: EngineState, session: DecisionSession) -> dict:
    """Session snapshot enriched with neighbor case details for display."""
    payload = pipeline.session_to_dict(session)
    index = state.cb.id_index()
    enriched = []
    for entry in payload["neighbors"]:
        case = index.get(entry["case_id"])
        if case is not None:
            entry = dict(entry, diagnosis=case.diagnosis, actions=list(case.actions),
                         descriptors=list(case.descriptors))
        enriched.append(entry)
    payload["neighbors"] = enriched
    payload["casebase_version"] = state.cb.version
    return payload


def create_app(state: EngineState) -> FastAPI:
    app = FastAPI(title="cdss", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(CdssError)
    async def cdss_error_handler(_req: Request, exc: CdssError):
        return _envelope_error(exc.code, exc.message, exc.details)

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(_req: Request, exc: RequestValidationError):
        return _envelope_error("invalid_argument", "malformed request body",
                               details=exc.errors())

    @app.exception_handler(Exception)
    async def fallback_handler(_req: Request, exc: Exception):
        return _envelope_error("internal", str(exc))

    @app.get("/health")
    def health():
        return _envelope_ok({
            "status": "ok",
            "casebase_version": state.cb.version,
            "case_count": len(state.cb),
        })

    @app.get("/config")
    def config():
        engine = state.config.engine
        return _envelope_ok({
            "schema": [
                {
                    "index": a.index,
                    "name": a.name,
                    "kind": a.kind,
                    "missing_code_is_zero": a.missing_code_is_zero,
                    "bin_count": a.bin_count,
                }
                for a in state.cb.schema
            ],
            "class_labels": {str(c): label for c, label in state.cb.class_labels.items()},
            "criteria_config": criteria_config_to_dict(engine.criteria_config),
            "k_default": state.config.k_default,
            "acceptance_radius": engine.acceptance_radius,
        })

    @app.get("/casebase/stats")
    def casebase_stats():
        return _envelope_ok({
            "version": state.cb.version,
            "case_count": len(state.cb),
            "class_counts": {str(c): n for c, n in cb_mod.class_counts(state.cb).items()},
            "discretized": state.cb.bin_edges is not None,
        })

    @app.get("/rules")
    def rules(min_support: float = 0.0):
        mined = pipeline.mine_choice_rules(state.cb, min_support)
        return _envelope_ok({
            "min_support": mined.min_support,
            "advisory": True,
            "rules": {
                str(cls): [{"action": a, "frequency": f} for a, f in ranked]
                for cls, ranked in mined.rules.items()
            },
        })

    @app.post("/sessions")
    def open_session(body: OpenSessionBody):
        engine = state.config.engine
        criteria = (
            criteria_config_from_dict(body.criteria_config)
            if body.criteria_config is not None
            else engine.criteria_config)
        session = pipeline.open_session(
            body.descriptors,
            body.physician_actions,
            criteria,
            schema=state.cb.schema,
            acceptance_radius=(
                body.acceptance_radius if body.acceptance_radius is not None
                else engine.acceptance_radius),
            session_id=body.session_id,
        )
        if session.id in state.sessions:
            raise DuplicateIdError(f"session id {session.id!r} already exists")
        state.sessions[session.id] = session
        state.audit.record("open", session, {"descriptors": body.descriptors})
        return _envelope_ok(session_view(state, session))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _envelope_ok(session_view(state, state.get_session(session_id)))

    @app.post("/sessions/{session_id}/retrieve")
    def retrieve(session_id: str, body: RetrieveBody):
        session = state.get_session(session_id)
        k = body.k if body.k is not None else state.config.k_default
        with state.session_lock(session_id):
            pipeline.rapprochement(session, state.model, state.cb, k)
            pipeline.pool_candidate_actions(session, state.cb)
            state.audit.record("retrieve", session, {"k": k})
        return _envelope_ok(session_view(state, session))

    @app.put("/sessions/{session_id}/assessment")
    def assessment(session_id: str, body: AssessmentBody):
        session = state.get_session(session_id)
        cells = {(c.action, c.criterion): c.label for c in body.cells}
        with state.session_lock(session_id):
            pipeline.assess(session, cells)
            state.audit.record("assess", session, {"cells": len(cells)})
        return _envelope_ok(session_view(state, session))

    @app.post("/sessions/{session_id}/design")
    def design(session_id: str, body: DesignBody):
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            pipeline.design(session, c_hat=body.c_hat, d_hat=body.d_hat)
            state.audit.record("design", session,
                               {"c_hat": body.c_hat, "d_hat": body.d_hat})
        return _envelope_ok(session_view(state, session))

    @app.post("/sessions/{session_id}/choice")
    def choice(session_id: str, body: ChoiceBody):
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            pipeline.record_choice(session, body.action)
            state.audit.record("choice", session, {"action": body.action})
        return _envelope_ok(session_view(state, session))

    @app.post("/sessions/{session_id}/review")
    def review(session_id: str, body: ReviewBody):
        session = state.get_session(session_id)
        try:
            verdict = ReviewVerdict(body.verdict)
        except ValueError:
            raise ArgumentError(
                f"verdict must be one of accepted, revised, rejected; got {body.verdict!r}"
            ) from None
        with state.session_lock(session_id):
            pipeline.review(session, verdict, body.revised_action)
            state.audit.record("review", session, {"verdict": body.verdict})
        return _envelope_ok(session_view(state, session))

    @app.post("/sessions/{session_id}/retain")
    def retain(session_id: str, body: RetainBody):
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            stored = state.retain(session, body.diagnosis)
            state.audit.record("retain", session, {"diagnosis": body.diagnosis})
        payload = session_view(state, session)
        payload["retained_case"] = {
            "id": stored.id,
            "actions": list(stored.actions),
            "diagnosis": stored.diagnosis,
        }
        return _envelope_ok(payload)

    @app.post("/experiment")
    def experiment(body: ExperimentBody):
        k = body.k if body.k is not None else state.config.k_default
        report = evaluation.run_split_experiment(
            state.cb, body.train_size, body.n_pos, body.n_neg, k,
            seed=body.seed, split_seed=body.split_seed)
        return _envelope_ok(evaluation.report_to_dict(report))

    static_dir = state.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(config: ServiceConfig):
    """Load the case-base, refuse stale or corrupt files, and run the server."""
    import uvicorn

    state = EngineState(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
