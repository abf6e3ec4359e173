"""FastAPI application: check, deploy, deployment records, health, sessions.

All error bodies are machine-readable {code, message, ...}. The check
endpoint is pure (no state change, byte-stable responses); deploy validates
first and refuses invalid descriptions with a 422 carrying the report.
"""

from __future__ import annotations

import asyncio
import json
import os
import threading
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from crforge import __version__
from crforge.agent.messages import RESULT_SUCCESS
from crforge.agent.session import SessionStatus
from crforge.cr.parser import ParseError, parse_description
from crforge.cr.validator import validate_syntax
from crforge.deploy.plan import plan_deployment
from crforge.deploy.runner import execute
from crforge.errors import (
    BackendError,
    ConfigError,
    CrForgeError,
    SessionStateError,
    UnknownFramework,
)
from crforge.kb.corpus import list_frameworks
from crforge.service.records import RecordStore
from crforge.service.sessions import DEFAULT_CYRIS_PROFILE, SessionManager, make_transport

MAX_BODY_BYTES = 1 << 20  # 1 MiB request cap

VALIDATED_FRAMEWORKS = ("cyris",)


class CheckRequest(BaseModel):
    framework: str = ""
    description_text: str


class DeployRequest(BaseModel):
    framework: str = ""
    description_text: str
    target: dict[str, Any] = Field(default_factory=lambda: {"type": "simulated"})
    dry_run: bool = False


class SessionCreateRequest(BaseModel):
    framework: str = "cyris"
    backend: str = "scripted"
    script: list[dict[str, Any]] = Field(default_factory=list)
    target: dict[str, Any] = Field(default_factory=lambda: {"type": "simulated"})
    max_retries: int = 3


class SessionMessageRequest(BaseModel):
    text: str


class ConsentRequest(BaseModel):
    accept: bool
    dry_run: bool = False


def _error(status_code: int, code: str, message: str, **extra: Any) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"code": code, "message": message, **extra})


def create_app(
    kb_root: str | None = None,
    cors_origins: list[str] | None = None,
    auth_token: str | None = None,
) -> FastAPI:
    kb_root = kb_root if kb_root is not None else os.environ.get("CRFORGE_KB_ROOT")
    auth_token = auth_token if auth_token is not None else os.environ.get("CRFORGE_AUTH_TOKEN")
    app = FastAPI(title="crforge checker service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    if auth_token:

        @app.middleware("http")
        async def require_bearer_token(request: Request, call_next):
            # healthz stays open for probes; everything else needs the static token
            if request.url.path != "/api/v1/healthz" and request.method != "OPTIONS":
                if request.headers.get("authorization") != f"Bearer {auth_token}":
                    return _error(401, "UNAUTHORIZED", "missing or wrong bearer token")
            return await call_next(request)

    records = RecordStore()
    sessions = SessionManager(kb_root=kb_root, records=records)
    app.state.records = records
    app.state.sessions = sessions
    app.state.kb_root = kb_root

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(422, "BAD_REQUEST", str(exc.errors()[:3]))

    @app.exception_handler(CrForgeError)
    async def on_crforge_error(request: Request, exc: CrForgeError):
        if isinstance(exc, UnknownFramework):
            return _error(404, "UNKNOWN_FRAMEWORK", str(exc))
        if isinstance(exc, (ConfigError, SessionStateError, BackendError)):
            return _error(409, "CONFLICT", str(exc))
        return _error(500, "INTERNAL", str(exc))

    # ---- health -----------------------------------------------------------

    @app.get("/api/v1/healthz")
    def healthz() -> dict[str, Any]:
        return {"version": __version__, "frameworks": list_frameworks(kb_root) if kb_root else []}

    # ---- syntax check -----------------------------------------------------

    @app.post("/api/v1/frameworks/{fw}/check")
    def check(fw: str, body: CheckRequest):
        if fw not in VALIDATED_FRAMEWORKS:
            return _error(404, "UNKNOWN_FRAMEWORK", f"no validator contract for {fw!r}")
        if len(body.description_text.encode("utf-8")) > MAX_BODY_BYTES:
            return _error(413, "PAYLOAD_TOO_LARGE", "description exceeds the 1 MiB limit")
        return validate_syntax(body.description_text).to_dict()

    # ---- deployment -------------------------------------------------------

    @app.post("/api/v1/frameworks/{fw}/deploy", status_code=202)
    def deploy(fw: str, body: DeployRequest):
        if fw not in VALIDATED_FRAMEWORKS:
            return _error(404, "UNKNOWN_FRAMEWORK", f"no deployment contract for {fw!r}")
        if len(body.description_text.encode("utf-8")) > MAX_BODY_BYTES:
            return _error(413, "PAYLOAD_TOO_LARGE", "description exceeds the 1 MiB limit")
        report = validate_syntax(body.description_text)
        if not report.valid:
            return _error(
                422,
                "INVALID_DESCRIPTION",
                "the description fails syntax validation",
                report=report.to_dict(),
            )
        try:
            transport = None if body.dry_run else make_transport(body.target)
        except ConfigError as exc:
            return _error(400, "BAD_TARGET", str(exc))

        desc = parse_description(body.description_text)
        plan = plan_deployment(desc, DEFAULT_CYRIS_PROFILE)
        record = records.create(framework=fw, dry_run=body.dry_run)
        record.range_id = plan.range_id

        if body.dry_run:
            record.transition("running")
            record.command_log.extend(
                {"command": step, "exit_status": 0, "output": "(dry run)"} for step in plan.steps()
            )
            record.transition("succeeded")
            return {"deployment_id": record.deployment_id}

        def run() -> None:
            record.transition("running")
            result = execute(plan, transport)
            record.command_log.extend(result.command_log())
            record.transition(result.status)

        threading.Thread(target=run, daemon=True).start()
        return {"deployment_id": record.deployment_id}

    @app.get("/api/v1/deployments/{deployment_id}")
    def get_deployment(deployment_id: str):
        record = records.get(deployment_id)
        if record is None:
            return _error(404, "NOT_FOUND", f"no deployment {deployment_id!r}")
        return record.to_dict()

    # ---- sessions ---------------------------------------------------------

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: SessionCreateRequest):
        if body.backend != "scripted":
            return _error(400, "BAD_BACKEND", "only the scripted backend is served over HTTP")
        handle = sessions.create(
            framework=body.framework,
            script=body.script,
            target=body.target,
            max_retries=body.max_retries,
        )
        return {"session_id": handle.session.session_id, "checkpoint": handle.session.checkpoint()}

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        handle = sessions.get(session_id)
        if handle is None:
            return _error(404, "NOT_FOUND", f"no session {session_id!r}")
        return handle.session.checkpoint()

    @app.post("/api/v1/sessions/{session_id}/messages")
    def post_message(session_id: str, body: SessionMessageRequest):
        handle = sessions.get(session_id)
        if handle is None:
            return _error(404, "NOT_FOUND", f"no session {session_id!r}")
        with handle.lock:
            events = handle.engine.handle_user_message(handle.session, body.text)
            handle.record_events(events)
        return {
            "events": [e.to_dict() for e in events],
            "checkpoint": handle.session.checkpoint(),
        }

    @app.post("/api/v1/sessions/{session_id}/consent")
    def post_consent(session_id: str, body: ConsentRequest):
        handle = sessions.get(session_id)
        if handle is None:
            return _error(404, "NOT_FOUND", f"no session {session_id!r}")
        with handle.lock:
            result, events = handle.engine.confirm_deploy(
                handle.session, accept=body.accept, dry_run=body.dry_run
            )
            handle.record_events(events)
        return {
            "accepted": body.accept,
            "deployment_id": handle.deployer.last_deployment_id if body.accept else None,
            "result": result.to_dict() if result is not None else None,
            "checkpoint": handle.session.checkpoint(),
        }

    @app.get("/api/v1/sessions/{session_id}/events")
    async def get_events(
        session_id: str,
        request: Request,
        after: int = 0,
        stream: str = "",
        idle_timeout: float | None = None,
    ):
        handle = sessions.get(session_id)
        if handle is None:
            return _error(404, "NOT_FOUND", f"no session {session_id!r}")
        wants_sse = stream == "sse" or "text/event-stream" in request.headers.get("accept", "")
        if not wants_sse:
            events = handle.events_after(after)
            return {"events": events, "next": after + len(events)}

        async def event_source():
            # browsers reconnect with Last-Event-ID, so closing an idle stream is safe
            cursor = after
            idle = 0.0
            while True:
                fresh = handle.events_after(cursor)
                for event in fresh:
                    yield f"id: {event['seq']}\nevent: {event['type']}\ndata: {json.dumps(event)}\n\n"
                cursor += len(fresh)
                idle = 0.0 if fresh else idle + 0.1
                if idle_timeout is not None and idle >= idle_timeout:
                    return
                if await request.is_disconnected():
                    return
                await asyncio.sleep(0.1)

        return StreamingResponse(event_source(), media_type="text/event-stream")

    return app


def session_view(checkpoint: dict[str, Any]) -> dict[str, Any]:
    """Server-side reference of the view a UI derives from a checkpoint.

    Kept next to the endpoints so the consent-gate rule lives in one place:
    deploy is enabled only for a valid latest report on a session that is
    awaiting deployment consent.
    """
    memory = checkpoint.get("memory", {})
    report = memory.get("latest_report")
    outcome = checkpoint.get("last_outcome")
    status = checkpoint.get("status", SessionStatus.IDLE.value)
    return {
        "session_id": checkpoint.get("session_id"),
        "status": status,
        "transcript": checkpoint.get("transcript", []),
        "draft": memory.get("latest_description"),
        "findings": (report or {}).get("findings", []),
        "attempt_badge": "{}/{}".format(
            checkpoint.get("loop_state", {}).get("attempt_counter", 0),
            checkpoint.get("loop_state", {}).get("max_retries", 3),
        ),
        "deploy_enabled": bool(
            report
            and report.get("status") == "valid"
            and status == SessionStatus.AWAITING_DEPLOY_CONSENT.value
            and outcome
            and outcome.get("result") == RESULT_SUCCESS
        ),
    }
