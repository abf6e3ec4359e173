"""Transcript messages, tool calls, backend completions, and loop outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from crforge.cr.validator import ValidationReport

ROLES = ("user", "agent", "tool")
TOOL_NAMES = ("retrieve", "check_syntax", "deploy", "ask_user")

RESULT_SUCCESS = "success"
RESULT_FAILED_SYNTAX = "failed_syntax"
RESULT_FAILED_TOKEN_LIMIT = "failed_token_limit"
RESULT_CANCELLED = "cancelled"


@dataclass(frozen=True)
class Message:
    """One transcript entry; tool messages carry the tool name that produced them."""

    role: str
    content: str
    tool_name: str | None = None
    tool_payload: Any = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.role == "tool" and not self.tool_name:
            raise ValueError("tool messages must carry a tool_name")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"role": self.role, "content": self.content}
        if self.tool_name is not None:
            data["tool_name"] = self.tool_name
        if self.tool_payload is not None:
            data["tool_payload"] = self.tool_payload
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Message":
        return cls(
            role=data["role"],
            content=data.get("content", ""),
            tool_name=data.get("tool_name"),
            tool_payload=data.get("tool_payload"),
        )


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in TOOL_NAMES:
            raise ValueError(f"unknown tool {self.name!r}; registry: {TOOL_NAMES}")


@dataclass(frozen=True)
class Completion:
    """One backend response: assistant text, a tool-call request, or a draft.

    Exactly one variant is populated, unless the backend hit its token budget,
    in which case no variant is.
    """

    text: str | None = None
    tool_call: ToolCall | None = None
    draft: str | None = None
    token_budget_exceeded: bool = False

    def __post_init__(self) -> None:
        populated = sum(x is not None for x in (self.text, self.tool_call, self.draft))
        if self.token_budget_exceeded:
            if populated:
                raise ValueError("a token-limit completion carries no other variant")
        elif populated != 1:
            raise ValueError("exactly one of text / tool_call / draft must be set")


@dataclass(frozen=True)
class BackendProfile:
    """Per-backend capabilities and prompt additions.

    Backends that cannot run the verify-and-retry loop themselves get the
    loop driven by the session engine (engine-issued retry prompts).
    """

    backend_id: str
    supports_self_loop: bool = True
    system_prompt_addenda: tuple[str, ...] = ()


@dataclass(frozen=True)
class Outcome:
    """Result of one generation loop."""

    result: str  # success | failed_syntax | failed_token_limit | cancelled
    iterations_used: int
    final_description: str | None = None
    report: ValidationReport | None = None

    def __post_init__(self) -> None:
        if self.result == RESULT_SUCCESS:
            assert self.report is not None and self.report.valid

    def to_dict(self) -> dict[str, Any]:
        return {
            "result": self.result,
            "iterations_used": self.iterations_used,
            "final_description": self.final_description,
            "report": self.report.to_dict() if self.report is not None else None,
        }


@dataclass(frozen=True)
class AgentEvent:
    """Engine-emitted event; payloads are JSON-safe for streaming and checkpoints."""

    type: str
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"type": self.type, "payload": self.payload}
