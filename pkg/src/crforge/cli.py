"""Operator entry points: kb build, one-shot generate, chat REPL, serve.

Exit codes: 0 success, 1 task failure (generation loop or deployment), 2
usage/config errors (including unknown frameworks).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from crforge import __version__
from crforge.agent.backends import LlmBackend, RemoteBackend, ScriptedBackend
from crforge.agent.clients import LocalChecker, LocalDeployer
from crforge.agent.engine import AgentEngine
from crforge.agent.messages import AgentEvent, BackendProfile
from crforge.agent.session import SessionStatus
from crforge.cr.validator import ValidationReport
from crforge.deploy.plan import FrameworkProfile, load_profile
from crforge.errors import BackendError, ConfigError, CrForgeError, UnknownFramework
from crforge.kb.chunking import ChunkingConfig
from crforge.kb.corpus import load_corpus
from crforge.kb.embedding import HashedNgramVectorizer
from crforge.kb.store import VectorStore, build_store, load_store, save_store

DEFAULT_PROFILE = FrameworkProfile(
    name="cyris",
    entry_template="<cyris_home>/main.py <desc> <cfg>",
    variables={"cyris_home": "/opt/cyris", "cfg": "/opt/cyris/CONFIG"},
)


@click.group()
@click.version_option(version=__version__, prog_name="crforge")
def main() -> None:
    """Generate, check, and deploy cyber-range description files."""


# ---------------------------------------------------------------------------


@main.group()
def kb() -> None:
    """Knowledge-base maintenance."""


@kb.command("build")
@click.option("--kb-root", envvar="CRFORGE_KB_ROOT", required=True, type=click.Path())
@click.option("--framework", required=True)
@click.option("--out", type=click.Path(), default=None, help="Archive path (default <kb-root>/<framework>.kb)")
@click.option("--chunk-size", default=1000, show_default=True)
@click.option("--chunk-overlap", default=200, show_default=True)
@click.option("--dimension", default=256, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
def kb_build(kb_root, framework, out, chunk_size, chunk_overlap, dimension, as_json) -> None:
    """Chunk and embed a framework's corpus folder into a vector-store archive."""
    try:
        corpus = load_corpus(kb_root, framework)
    except CrForgeError as exc:
        _fail(exc, as_json, exit_code=2)
    provider = HashedNgramVectorizer(dimension=dimension)
    store = build_store(corpus, ChunkingConfig(chunk_size, chunk_overlap), provider, framework)
    out_path = Path(out) if out else Path(kb_root) / f"{framework}.kb"
    save_store(store, out_path)
    info = {
        "framework": framework,
        "documents": len(corpus),
        "entries": len(store),
        "archive": str(out_path),
    }
    if as_json:
        click.echo(json.dumps(info))
    else:
        click.echo(f"built {framework}: {len(corpus)} documents, {len(store)} chunks -> {out_path}")
        if len(store) == 0:
            click.echo("warning: the store is empty (no corpus files?)", err=True)


# ---------------------------------------------------------------------------


def _fail(exc: Exception, as_json: bool, exit_code: int) -> None:
    if as_json:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
    else:
        click.echo(f"error: {exc}", err=True)
    sys.exit(exit_code)


def _load_kb(kb_root: str | None, framework: str, as_json: bool) -> VectorStore:
    """Archive if present, else corpus folder, else an empty store."""
    provider_dim = 256
    if kb_root:
        archive = Path(kb_root) / f"{framework}.kb"
        if archive.is_file():
            return load_store(archive)
        try:
            corpus = load_corpus(kb_root, framework)
        except UnknownFramework as exc:
            _fail(exc, as_json, exit_code=2)
        return build_store(
            corpus, ChunkingConfig(), HashedNgramVectorizer(provider_dim), framework
        )
    return VectorStore(framework_name=framework, dimension=provider_dim, entries=[])


def _make_backend(backend_kind: str, script: str | None, remote_url: str | None,
                  remote_token: str | None, as_json: bool) -> LlmBackend:
    if backend_kind == "scripted":
        if not script:
            _fail(ConfigError("--backend scripted needs --script <replay.json>"), as_json, 2)
        try:
            return ScriptedBackend.from_file(script)
        except BackendError as exc:
            _fail(exc, as_json, 2)
    if not remote_url:
        _fail(ConfigError("--backend remote needs --remote-url"), as_json, 2)
    return RemoteBackend(url=remote_url, token=remote_token)


def _make_engine(framework, backend_kind, script, remote_url, remote_token,
                 kb_root, max_retries, profile_path, as_json) -> AgentEngine:
    backend = _make_backend(backend_kind, script, remote_url, remote_token, as_json)
    kb_store = _load_kb(kb_root, framework, as_json)
    deploy_profile = load_profile(profile_path) if profile_path else DEFAULT_PROFILE
    return AgentEngine(
        framework_name=framework,
        backend=backend,
        kb=kb_store,
        checker=LocalChecker(),
        deployer=LocalDeployer(deploy_profile),
        profile=BackendProfile(backend_id=backend_kind),
        max_retries=max_retries,
    )


_BACKEND_OPTIONS = [
    click.option("--framework", default="cyris", show_default=True),
    click.option("--backend", "backend_kind", type=click.Choice(["scripted", "remote"]), default="scripted", show_default=True),
    click.option("--script", type=click.Path(exists=True), default=None, help="Replay script for the scripted backend"),
    click.option("--remote-url", default=None, help="Completion endpoint for the remote backend"),
    click.option("--remote-token", default=None),
    click.option("--kb-root", envvar="CRFORGE_KB_ROOT", default=None, type=click.Path()),
    click.option("--max-retries", default=3, show_default=True),
    click.option("--deploy-profile", "profile_path", type=click.Path(exists=True), default=None, help="Framework deployment profile (JSON)"),
    click.option("--json", "as_json", is_flag=True, help="Machine-readable output"),
]


def _with_backend_options(fn):
    for option in reversed(_BACKEND_OPTIONS):
        fn = option(fn)
    return fn


@main.command()
@click.option("--prompt-file", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None, help="Where to write the generated description")
@_with_backend_options
def generate(prompt_file, out, framework, backend_kind, script, remote_url,
             remote_token, kb_root, max_retries, profile_path, as_json) -> None:
    """Run one generation loop and print the outcome as JSON."""
    engine = _make_engine(framework, backend_kind, script, remote_url, remote_token,
                          kb_root, max_retries, profile_path, as_json)
    session = engine.start_session()
    prompt = Path(prompt_file).read_text(encoding="utf-8").strip()
    try:
        outcome = engine.run_generation_loop(session, prompt)
    except BackendError as exc:
        _fail(exc, as_json, exit_code=1)
    if outcome is None:
        click.echo(json.dumps({"result": "awaiting_user", "question": session.pending_question}))
        sys.exit(1)
    click.echo(json.dumps(outcome.to_dict()))
    if outcome.result == "success" and out:
        Path(out).write_text(outcome.final_description, encoding="utf-8")
    sys.exit(0 if outcome.result == "success" else 1)


# ---------------------------------------------------------------------------


def _findings_table(report: dict) -> str:
    rows = [(f["code"], f["path"], f["message"]) for f in report.get("findings", [])]
    if not rows:
        return "  (no findings)"
    widths = [max(len(r[i]) for r in rows) for i in (0, 1)]
    return "\n".join(f"  {c:<{widths[0]}}  {p:<{widths[1]}}  {m}" for c, p, m in rows)


def _render_event(event: AgentEvent) -> None:
    kind, payload = event.type, event.payload
    if kind == "agent_message":
        click.echo(f"agent> {payload['text']}")
    elif kind == "tool_call":
        click.echo(f"[tool] {payload['name']} {json.dumps(payload.get('arguments', {}))}")
    elif kind == "tool_result" and payload.get("name") == "retrieve":
        click.echo(f"[tool] retrieve returned {payload.get('count', 0)} chunks")
    elif kind == "draft":
        click.echo(f"--- draft (attempt {payload['attempt']}) ---")
        click.echo(payload["text"].rstrip("\n"))
        click.echo("--- end draft ---")
    elif kind == "check_result":
        report = payload["report"]
        click.echo(f"[check] {report['status']}")
        if report["findings"]:
            click.echo(_findings_table(report))
    elif kind == "question":
        click.echo(f"agent asks> {payload['question']}")
    elif kind == "outcome":
        click.echo(f"[outcome] {payload['result']} in {payload['iterations_used']} iteration(s)")
    elif kind == "consent_request":
        click.echo(f"agent> {payload['question']}")
    elif kind == "deploy_result":
        click.echo(f"[deploy] {payload.get('status')}")
        for entry in payload.get("command_log", []):
            click.echo(f"  $ {entry['command']} -> {entry['exit_status']}")


@main.command()
@_with_backend_options
def chat(framework, backend_kind, script, remote_url, remote_token, kb_root,
         max_retries, profile_path, as_json) -> None:
    """Interactive session: user lines in, agent events out, consent prompts inline."""
    engine = _make_engine(framework, backend_kind, script, remote_url, remote_token,
                          kb_root, max_retries, profile_path, as_json)
    session = engine.start_session()
    click.echo(f"chatting about {framework}; empty line or 'exit' quits", err=True)
    while True:
        try:
            line = click.prompt("you", prompt_suffix="> ", default="", show_default=False)
        except (EOFError, click.Abort):
            break
        if line.strip() in ("", "exit", "quit"):
            break
        try:
            events = engine.handle_user_message(session, line)
        except BackendError as exc:
            click.echo(f"error: {exc}", err=True)
            continue
        for event in events:
            if as_json:
                click.echo(json.dumps(event.to_dict()))
            else:
                _render_event(event)
        if session.status == SessionStatus.AWAITING_DEPLOY_CONSENT:
            answer = click.prompt("deploy? [y/N]", default="n", show_default=False)
            result, consent_events = engine.confirm_deploy(
                session, accept=answer.strip().lower().startswith("y")
            )
            for event in consent_events:
                if as_json:
                    click.echo(json.dumps(event.to_dict()))
                else:
                    _render_event(event)
    sys.exit(0 if session.status != SessionStatus.FAILED else 1)


# ---------------------------------------------------------------------------


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--kb-root", envvar="CRFORGE_KB_ROOT", default=None, type=click.Path())
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed web console origin (repeatable; default *)")
@click.option("--auth-token", envvar="CRFORGE_AUTH_TOKEN", default=None,
              help="Static bearer token required on every non-health endpoint")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable startup line")
def serve(listen, kb_root, cors_origins, auth_token, as_json) -> None:
    """Run the checker/deployment/session HTTP service."""
    import uvicorn

    from crforge.service.app import create_app

    host, _, port = listen.rpartition(":")
    if as_json:
        click.echo(json.dumps({"listening": listen, "kb_root": kb_root, "auth": bool(auth_token)}))
    app = create_app(
        kb_root=kb_root,
        cors_origins=list(cors_origins) or None,
        auth_token=auth_token,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


# ---------------------------------------------------------------------------


@main.command()
@click.argument("description_file", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def check(description_file, as_json) -> None:
    """Validate a description file locally and print the report."""
    report: ValidationReport = LocalChecker().check(
        "cyris", Path(description_file).read_text(encoding="utf-8")
    )
    if as_json:
        click.echo(json.dumps(report.to_dict()))
    else:
        click.echo(report.status)
        if report.findings:
            click.echo(_findings_table(report.to_dict()))
    sys.exit(0 if report.valid else 1)


if __name__ == "__main__":
    main()
