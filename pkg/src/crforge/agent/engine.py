"""The agent session engine.

One engine binds a framework's knowledge base, an LLM backend, a syntax
checker, and a deployer. Per user message it drives the backend until a
terminal event: a direct answer, a question back to the user, a validated
description (which parks the session on deployment consent), or a failure.

Draft handling is the bounded self-correction loop: every draft goes through
the checker, findings are fed back to the backend as tool output, and the
loop stops at a valid report or after max_retries draft attempts. A success
is only ever declared on a checker round-trip that came back valid.
"""

from __future__ import annotations

import logging
from typing import Sequence

from crforge.agent.backends import LlmBackend
from crforge.agent.clients import CheckerClient, DeployClient
from crforge.agent.messages import (
    RESULT_FAILED_SYNTAX,
    RESULT_FAILED_TOKEN_LIMIT,
    RESULT_SUCCESS,
    TOOL_NAMES,
    AgentEvent,
    BackendProfile,
    Completion,
    Message,
    Outcome,
    ToolCall,
)
from crforge.agent.session import Session, SessionStatus
from crforge.deploy.runner import DeploymentResult
from crforge.errors import BackendError, SessionStateError, UnknownFramework
from crforge.kb.embedding import EmbeddingProvider, HashedNgramVectorizer, embed, is_zero
from crforge.kb.retrieval import RetrievalConfig, mmr_select
from crforge.kb.store import VectorStore

logger = logging.getLogger(__name__)

BASE_SYSTEM_PROMPT = (
    "You are an assistant that produces cyber-range description files for the "
    "{framework} framework. Use the retrieve tool to look up framework syntax, "
    "produce drafts in the framework's exact file format, and correct any "
    "findings the syntax checker reports. Ask the user before assigning "
    "mandatory parameters they did not specify."
)

CONSENT_QUESTION = "The description file is ready and valid. Deploy it to the target host? (yes/no)"

# hard ceiling on backend calls per user turn; guards against a backend that
# never produces a terminal completion
_MAX_COMPLETIONS_PER_TURN = 64


class AgentEngine:
    """Session state machine over a backend, knowledge base, checker, and deployer."""

    def __init__(
        self,
        framework_name: str,
        backend: LlmBackend,
        kb: VectorStore,
        checker: CheckerClient,
        deployer: DeployClient | None,
        profile: BackendProfile,
        retrieval_cfg: RetrievalConfig | None = None,
        provider: EmbeddingProvider | None = None,
        max_retries: int = 3,
    ):
        if kb is None or kb.framework_name != framework_name:
            raise UnknownFramework(framework_name, "no knowledge base bound for it")
        self.framework_name = framework_name
        self.backend = backend
        self.kb = kb
        self.checker = checker
        self.deployer = deployer
        self.profile = profile
        self.retrieval_cfg = retrieval_cfg or RetrievalConfig()
        self.provider = provider or HashedNgramVectorizer(dimension=kb.dimension)
        self.max_retries = max_retries

    # ------------------------------------------------------------------

    def start_session(self) -> Session:
        """New idle session with the assembled system prompt."""
        parts = [BASE_SYSTEM_PROMPT.format(framework=self.framework_name)]
        parts.extend(self.profile.system_prompt_addenda)
        session = Session(
            framework_name=self.framework_name,
            system_prompt="\n".join(parts),
            engine_owns_loop=not self.profile.supports_self_loop,
        )
        session.loop_state.max_retries = self.max_retries
        return session

    # ------------------------------------------------------------------

    def handle_user_message(self, session: Session, text: str) -> list[AgentEvent]:
        """Feed one user message through the backend until a terminal event."""
        if session.status == SessionStatus.DEPLOYING:
            raise SessionStateError("session is deploying; wait for it to finish")

        events: list[AgentEvent] = []
        answering_question = session.status == SessionStatus.AWAITING_USER
        if not answering_question:
            session.memory.latest_intent = text
        session.pending_question = None
        session.append(Message(role="user", content=text))
        events.append(AgentEvent("user_message", {"text": text}))
        # every user turn gets a fresh correction budget
        session.loop_state.attempt_counter = 0
        status_before = session.status
        session.status = SessionStatus.GENERATING

        try:
            for _ in range(_MAX_COMPLETIONS_PER_TURN):
                completion = self._next_completion(session)
                if self._dispatch(session, completion, events):
                    return events
            raise BackendError(
                f"backend produced no terminal completion in {_MAX_COMPLETIONS_PER_TURN} turns"
            )
        except BackendError:
            session.status = status_before
            raise

    def run_generation_loop(self, session: Session, intent_message: str) -> Outcome | None:
        """One generation loop; None means the session parked on a question."""
        if session.status not in (SessionStatus.IDLE, SessionStatus.AWAITING_USER):
            raise SessionStateError(
                f"generation loop needs an idle or awaiting_user session, not {session.status.value}"
            )
        before = session.last_outcome
        self.handle_user_message(session, intent_message)
        return session.last_outcome if session.last_outcome is not before else None

    # ------------------------------------------------------------------

    def _next_completion(self, session: Session) -> Completion:
        try:
            return self.backend.next_completion(tuple(session.transcript), TOOL_NAMES)
        except BackendError:
            raise
        except Exception as exc:  # transport-level surprises become BackendError
            raise BackendError(f"backend failure: {exc}") from exc

    def _dispatch(self, session: Session, completion: Completion, events: list[AgentEvent]) -> bool:
        """Process one completion; True when the turn is over."""
        if completion.token_budget_exceeded:
            self._finish_failure(session, RESULT_FAILED_TOKEN_LIMIT, events)
            return True
        if completion.text is not None:
            session.append(Message(role="agent", content=completion.text))
            events.append(AgentEvent("agent_message", {"text": completion.text}))
            session.status = SessionStatus.IDLE
            return True
        if completion.tool_call is not None:
            return self._run_tool(session, completion.tool_call, events)
        assert completion.draft is not None
        return self._check_draft(session, completion.draft, events)

    # ---- tools ---------------------------------------------------------

    def _run_tool(self, session: Session, call: ToolCall, events: list[AgentEvent]) -> bool:
        events.append(AgentEvent("tool_call", {"name": call.name, "arguments": call.arguments}))
        if call.name == "ask_user":
            question = str(call.arguments.get("question", "")) or "Please provide more detail."
            session.append(Message(role="agent", content=question))
            session.pending_question = question
            session.status = SessionStatus.AWAITING_USER
            events.append(AgentEvent("question", {"question": question}))
            return True
        if call.name == "retrieve":
            payload = self._retrieve(str(call.arguments.get("query", "")))
            content = "\n---\n".join(c["text"] for c in payload["chunks"]) or "(no results)"
            session.append(
                Message(role="tool", content=content, tool_name="retrieve", tool_payload=payload)
            )
            events.append(
                AgentEvent("tool_result", {"name": "retrieve", "count": len(payload["chunks"])})
            )
            return False
        if call.name == "check_syntax":
            report = self.checker.check(
                self.framework_name, str(call.arguments.get("description", ""))
            )
            session.append(
                Message(
                    role="tool",
                    content=f"syntax check: {report.status}",
                    tool_name="check_syntax",
                    tool_payload=report.to_dict(),
                )
            )
            events.append(AgentEvent("tool_result", {"name": "check_syntax", "report": report.to_dict()}))
            return False
        # deploy as a backend-initiated tool call: route through the consent gate
        if session.memory.latest_report is not None and session.memory.latest_report.valid:
            self._ask_consent(session, events)
            return True
        session.append(
            Message(
                role="tool",
                content="deploy refused: no validated description yet",
                tool_name="deploy",
                tool_payload={"error": "no validated description"},
            )
        )
        events.append(AgentEvent("tool_result", {"name": "deploy", "error": "no validated description"}))
        return False

    def _retrieve(self, query: str) -> dict:
        qvec = embed(query, self.provider)
        if is_zero(qvec) or not self.kb.entries:
            return {"query": query, "chunks": []}
        chunks = mmr_select(qvec, self.kb, self.retrieval_cfg)
        return {
            "query": query,
            "chunks": [{"doc_id": c.doc_id, "seq": c.seq, "text": c.text} for c in chunks],
        }

    # ---- drafts and the correction loop --------------------------------

    def _check_draft(self, session: Session, draft: str, events: list[AgentEvent]) -> bool:
        session.loop_state.attempt_counter += 1
        attempt = session.loop_state.attempt_counter
        session.append(Message(role="agent", content=draft))
        events.append(AgentEvent("draft", {"text": draft, "attempt": attempt}))

        report = self.checker.check(self.framework_name, draft)
        session.append(
            Message(
                role="tool",
                content=f"syntax check: {report.status}",
                tool_name="check_syntax",
                tool_payload=report.to_dict(),
            )
        )
        events.append(
            AgentEvent("check_result", {"report": report.to_dict(), "attempt": attempt})
        )
        session.memory.latest_description = draft
        session.memory.latest_report = report

        if report.valid:
            outcome = Outcome(
                result=RESULT_SUCCESS,
                iterations_used=attempt,
                final_description=draft,
                report=report,
            )
            session.last_outcome = outcome
            events.append(AgentEvent("outcome", outcome.to_dict()))
            self._ask_consent(session, events)
            return True

        if attempt >= session.loop_state.max_retries:
            outcome = Outcome(
                result=RESULT_FAILED_SYNTAX,
                iterations_used=attempt,
                final_description=draft,
                report=report,
            )
            session.last_outcome = outcome
            session.status = SessionStatus.FAILED
            message = f"Generation failed: the description is still invalid after {attempt} attempts."
            session.append(Message(role="agent", content=message))
            events.append(AgentEvent("outcome", outcome.to_dict()))
            events.append(AgentEvent("agent_message", {"text": message}))
            return True

        if session.engine_owns_loop:
            # backends that cannot self-loop get an explicit engine-issued retry prompt
            session.append(
                Message(
                    role="tool",
                    content=(
                        f"Attempt {attempt} of {session.loop_state.max_retries}: correct the "
                        "reported findings and produce a corrected draft."
                    ),
                    tool_name="retry_prompt",
                    tool_payload={"attempt": attempt},
                )
            )
        return False

    def _finish_failure(self, session: Session, result: str, events: list[AgentEvent]) -> None:
        session.loop_state.attempt_counter = max(1, session.loop_state.attempt_counter)
        outcome = Outcome(
            result=result,
            iterations_used=session.loop_state.attempt_counter,
            final_description=session.memory.latest_description,
            report=session.memory.latest_report,
        )
        session.last_outcome = outcome
        session.status = SessionStatus.FAILED
        message = "Generation aborted: the backend exceeded its token budget."
        session.append(Message(role="agent", content=message))
        events.append(AgentEvent("outcome", outcome.to_dict()))
        events.append(AgentEvent("agent_message", {"text": message}))

    # ---- deployment consent ---------------------------------------------

    def _ask_consent(self, session: Session, events: list[AgentEvent]) -> None:
        session.append(Message(role="agent", content=CONSENT_QUESTION))
        session.status = SessionStatus.AWAITING_DEPLOY_CONSENT
        events.append(AgentEvent("consent_request", {"question": CONSENT_QUESTION}))

    def request_deploy_consent(self, session: Session) -> str:
        """(Re-)ask for deployment consent after a successful loop."""
        if session.last_outcome is None or session.last_outcome.result != RESULT_SUCCESS:
            raise SessionStateError("deployment consent needs a successful generation first")
        self._ask_consent(session, [])
        return CONSENT_QUESTION

    def confirm_deploy(
        self, session: Session, accept: bool, dry_run: bool = False
    ) -> tuple[DeploymentResult | None, list[AgentEvent]]:
        """Resolve the consent question; None result means the user declined."""
        if session.status != SessionStatus.AWAITING_DEPLOY_CONSENT:
            raise SessionStateError("session is not awaiting deployment consent")
        events: list[AgentEvent] = []
        session.append(Message(role="user", content="yes" if accept else "no"))
        if not accept:
            session.append(Message(role="agent", content="Deployment cancelled."))
            session.status = SessionStatus.DONE
            events.append(AgentEvent("deploy_result", {"status": "cancelled"}))
            return None, events

        if self.deployer is None:
            raise SessionStateError("no deployer is configured for this engine")
        assert session.memory.latest_description is not None
        session.status = SessionStatus.DEPLOYING
        result = self.deployer.deploy(
            self.framework_name, session.memory.latest_description, dry_run=dry_run
        )
        session.append(
            Message(
                role="tool",
                content=f"deployment {result.status}",
                tool_name="deploy",
                tool_payload=result.to_dict(),
            )
        )
        if result.succeeded:
            session.status = SessionStatus.DONE
            summary = f"Deployment succeeded ({len(result.results)} steps)."
        else:
            session.status = SessionStatus.FAILED
            summary = "Deployment failed; see the command log."
        session.append(Message(role="agent", content=summary))
        events.append(AgentEvent("deploy_result", result.to_dict()))
        events.append(AgentEvent("agent_message", {"text": summary}))
        return result, events
