"""Session state: transcript, memory, loop counters, status, checkpointing."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from crforge.agent.messages import Message, Outcome
from crforge.cr.validator import ValidationReport


class SessionStatus(str, Enum):
    IDLE = "idle"
    GENERATING = "generating"
    AWAITING_USER = "awaiting_user"
    AWAITING_DEPLOY_CONSENT = "awaiting_deploy_consent"
    DEPLOYING = "deploying"
    DONE = "done"
    FAILED = "failed"


@dataclass
class Memory:
    """Accumulated scenario facts, carried across turns so follow-ups can modify them."""

    latest_intent: str | None = None
    latest_description: str | None = None
    latest_report: ValidationReport | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "latest_intent": self.latest_intent,
            "latest_description": self.latest_description,
            "latest_report": self.latest_report.to_dict() if self.latest_report else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Memory":
        report = data.get("latest_report")
        return cls(
            latest_intent=data.get("latest_intent"),
            latest_description=data.get("latest_description"),
            latest_report=ValidationReport.from_dict(report) if report else None,
        )


@dataclass
class LoopState:
    attempt_counter: int = 0
    max_retries: int = 3

    def to_dict(self) -> dict[str, int]:
        return {"attempt_counter": self.attempt_counter, "max_retries": self.max_retries}


@dataclass
class Session:
    """One conversation with the agent; the transcript is append-only."""

    framework_name: str
    system_prompt: str = ""
    engine_owns_loop: bool = False
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    transcript: list[Message] = field(default_factory=list)
    memory: Memory = field(default_factory=Memory)
    loop_state: LoopState = field(default_factory=LoopState)
    status: SessionStatus = SessionStatus.IDLE
    pending_question: str | None = None
    last_outcome: Outcome | None = None

    def append(self, message: Message) -> Message:
        self.transcript.append(message)
        return message

    def checkpoint(self) -> dict[str, Any]:
        """JSON-safe snapshot; rebuilding from it reconstructs an equal session."""
        return {
            "session_id": self.session_id,
            "framework_name": self.framework_name,
            "system_prompt": self.system_prompt,
            "engine_owns_loop": self.engine_owns_loop,
            "status": self.status.value,
            "pending_question": self.pending_question,
            "transcript": [m.to_dict() for m in self.transcript],
            "memory": self.memory.to_dict(),
            "loop_state": self.loop_state.to_dict(),
            "last_outcome": self.last_outcome.to_dict() if self.last_outcome else None,
        }

    @classmethod
    def from_checkpoint(cls, data: dict[str, Any]) -> "Session":
        outcome_data = data.get("last_outcome")
        outcome = None
        if outcome_data:
            report = outcome_data.get("report")
            outcome = Outcome(
                result=outcome_data["result"],
                iterations_used=outcome_data["iterations_used"],
                final_description=outcome_data.get("final_description"),
                report=ValidationReport.from_dict(report) if report else None,
            )
        return cls(
            framework_name=data["framework_name"],
            system_prompt=data.get("system_prompt", ""),
            engine_owns_loop=data.get("engine_owns_loop", False),
            session_id=data["session_id"],
            transcript=[Message.from_dict(m) for m in data.get("transcript", [])],
            memory=Memory.from_dict(data.get("memory", {})),
            loop_state=LoopState(**data.get("loop_state", {})),
            status=SessionStatus(data.get("status", "idle")),
            pending_question=data.get("pending_question"),
            last_outcome=outcome,
        )
