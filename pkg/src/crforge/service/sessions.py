"""Server-side session registry wiring engines to the HTTP layer."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any

from crforge.agent.backends import ScriptedBackend
from crforge.agent.clients import LocalChecker
from crforge.agent.engine import AgentEngine
from crforge.agent.messages import AgentEvent, BackendProfile
from crforge.agent.session import Session
from crforge.cr.parser import ParseError, parse_description
from crforge.deploy.plan import FrameworkProfile, plan_deployment
from crforge.deploy.runner import CommandResult, DeploymentResult, execute
from crforge.deploy.transport import SimulatedTransport, SshTransport
from crforge.errors import ConfigError
from crforge.kb.chunking import ChunkingConfig
from crforge.kb.corpus import load_corpus
from crforge.kb.embedding import HashedNgramVectorizer
from crforge.kb.store import VectorStore, build_store
from crforge.service.records import RecordStore

DEFAULT_CYRIS_PROFILE = FrameworkProfile(
    name="cyris",
    entry_template="<cyris_home>/main.py <desc> <cfg>",
    variables={"cyris_home": "/opt/cyris", "cfg": "/opt/cyris/CONFIG"},
)


def make_transport(target: dict[str, Any]):
    kind = target.get("type", "simulated")
    if kind == "simulated":
        fail_at = target.get("fail_at_step")
        return SimulatedTransport(fail_at_step=fail_at)
    if kind == "ssh":
        try:
            return SshTransport(
                host=target["host"], user=target["user"], key_path=target.get("key_path")
            )
        except KeyError as exc:
            raise ConfigError(f"ssh target needs host and user: missing {exc}") from exc
    raise ConfigError(f"unknown transport type {kind!r}")


class RecordingDeployer:
    """DeployClient that materializes every deployment as a pollable record."""

    def __init__(self, records: RecordStore, profile: FrameworkProfile, target: dict[str, Any]):
        self.records = records
        self.profile = profile
        self.target = target
        self.last_deployment_id: str | None = None

    def deploy(self, framework: str, description_text: str, dry_run: bool = False) -> DeploymentResult:
        record = self.records.create(framework=framework, dry_run=dry_run)
        self.last_deployment_id = record.deployment_id
        try:
            desc = parse_description(description_text)
        except ParseError as exc:
            record.transition("running")
            record.command_log.append({"command": "parse description", "exit_status": 1, "output": str(exc)})
            record.transition("failed")
            return DeploymentResult(status="failed", range_id=0, results=())
        plan = plan_deployment(desc, self.profile)
        record.range_id = plan.range_id
        record.transition("running")
        if dry_run:
            record.command_log.extend(
                {"command": step, "exit_status": 0, "output": "(dry run)"} for step in plan.steps()
            )
            record.transition("succeeded")
            results = tuple(CommandResult(step=s, exit_status=0, stdout="(dry run)") for s in plan.steps())
            return DeploymentResult(status="succeeded", range_id=plan.range_id, results=results)
        result = execute(plan, make_transport(self.target))
        record.command_log.extend(result.command_log())
        record.transition(result.status)
        return result


@dataclass
class SessionHandle:
    engine: AgentEngine
    session: Session
    deployer: RecordingDeployer
    events: list[AgentEvent] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def record_events(self, events: list[AgentEvent]) -> None:
        self.events.extend(events)

    def events_after(self, cursor: int) -> list[dict[str, Any]]:
        return [
            {"seq": i, **event.to_dict()}
            for i, event in enumerate(self.events)
            if i >= cursor
        ]


class SessionManager:
    """Creates scripted sessions bound to a knowledge-base root."""

    def __init__(self, kb_root: str | None, records: RecordStore,
                 profile: FrameworkProfile = DEFAULT_CYRIS_PROFILE):
        self.kb_root = kb_root
        self.records = records
        self.profile = profile
        self._handles: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()

    def _build_store(self, framework: str) -> VectorStore:
        provider = HashedNgramVectorizer()
        if self.kb_root is None:
            return VectorStore(framework_name=framework, dimension=provider.dimension, entries=[])
        corpus = load_corpus(self.kb_root, framework)  # raises UnknownFramework
        return build_store(corpus, ChunkingConfig(), provider, framework_name=framework)

    def create(self, framework: str, script: list[dict[str, Any]],
               target: dict[str, Any] | None = None, max_retries: int = 3) -> SessionHandle:
        kb = self._build_store(framework)
        backend = ScriptedBackend(script)
        deployer = RecordingDeployer(self.records, self.profile, target or {"type": "simulated"})
        engine = AgentEngine(
            framework_name=framework,
            backend=backend,
            kb=kb,
            checker=LocalChecker(),
            deployer=deployer,
            profile=BackendProfile(backend_id="scripted"),
            max_retries=max_retries,
        )
        handle = SessionHandle(engine=engine, session=engine.start_session(), deployer=deployer)
        with self._lock:
            self._handles[handle.session.session_id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle | None:
        with self._lock:
            return self._handles.get(session_id)
