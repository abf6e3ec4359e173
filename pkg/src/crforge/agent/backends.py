"""LLM backend contract, the deterministic scripted backend, and a remote client.

The scripted backend replays a fixed list of completions so every loop
behaviour (retries, human-in-the-loop pauses, token-limit aborts) is
reproducible offline. Scripts are JSON lists of turn objects:

    [{"expect_role": "user", "completion": {"text": "hello"}},
     {"completion": {"tool_call": {"name": "retrieve", "arguments": {"query": "..."}}}},
     {"completion": {"draft": "- host_settings:\\n ..."}},
     {"completion": {"token_limit": true}}]

expect_role, when present, asserts the role of the latest transcript message
the backend sees on that turn; it guards replay scripts against engine
sequencing drift.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Protocol, Sequence, runtime_checkable

import httpx

from crforge.agent.messages import Completion, Message, ToolCall
from crforge.errors import BackendError, ScriptExhausted, ScriptFormatError


@runtime_checkable
class LlmBackend(Protocol):
    """Completion-with-tools over the transcript."""

    def next_completion(self, transcript: Sequence[Message], tools: Sequence[str]) -> Completion: ...


def _completion_from_spec(spec: Any, turn_index: int) -> Completion:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ScriptFormatError(
            f"turn {turn_index}: completion must be a single-key object, got {spec!r}"
        )
    (kind, value), = spec.items()
    if kind == "text":
        return Completion(text=str(value))
    if kind == "draft":
        return Completion(draft=str(value))
    if kind == "token_limit":
        return Completion(token_budget_exceeded=True)
    if kind == "tool_call":
        if not isinstance(value, dict) or "name" not in value:
            raise ScriptFormatError(f"turn {turn_index}: tool_call needs a name")
        try:
            call = ToolCall(name=value["name"], arguments=value.get("arguments") or {})
        except ValueError as exc:
            raise ScriptFormatError(f"turn {turn_index}: {exc}") from exc
        return Completion(tool_call=call)
    raise ScriptFormatError(f"turn {turn_index}: unknown completion kind {kind!r}")


class ScriptedBackend:
    """Replays scripted completions in order; raises ScriptExhausted past the end."""

    def __init__(self, turns: Sequence[dict[str, Any]]):
        self._turns = list(turns)
        self._cursor = 0
        for i, turn in enumerate(self._turns):
            if not isinstance(turn, dict) or "completion" not in turn:
                raise ScriptFormatError(f"turn {i}: expected an object with a 'completion' key")
            _completion_from_spec(turn["completion"], i)  # validate eagerly

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ScriptFormatError(f"cannot load replay script {path}: {exc}") from exc
        if not isinstance(data, list):
            raise ScriptFormatError("replay script must be a JSON list of turn objects")
        return cls(data)

    @property
    def turns_left(self) -> int:
        return len(self._turns) - self._cursor

    def next_completion(self, transcript: Sequence[Message], tools: Sequence[str]) -> Completion:
        if self._cursor >= len(self._turns):
            raise ScriptExhausted(
                f"replay script exhausted after {len(self._turns)} turns"
            )
        turn = self._turns[self._cursor]
        self._cursor += 1
        expect_role = turn.get("expect_role")
        if expect_role is not None:
            actual = transcript[-1].role if transcript else None
            if actual != expect_role:
                raise ScriptFormatError(
                    f"turn {self._cursor - 1}: expected latest transcript role "
                    f"{expect_role!r}, engine presented {actual!r}"
                )
        return _completion_from_spec(turn["completion"], self._cursor - 1)


class RemoteBackend:
    """Thin client for a remote completion endpoint speaking this wire shape:

    request  {"system_prompt": str, "messages": [...], "tools": [...]}
    response {"completion": {"text" | "tool_call" | "draft" | "token_limit": ...}}

    Adapting a specific provider's API means fronting it with this contract.
    """

    def __init__(self, url: str, token: str | None = None, timeout: float = 60.0,
                 system_prompt: str = "", client: httpx.Client | None = None):
        self.url = url
        self.system_prompt = system_prompt
        self._headers = {"Authorization": f"Bearer {token}"} if token else {}
        self._client = client or httpx.Client(timeout=timeout)

    def next_completion(self, transcript: Sequence[Message], tools: Sequence[str]) -> Completion:
        body = {
            "system_prompt": self.system_prompt,
            "messages": [m.to_dict() for m in transcript],
            "tools": list(tools),
        }
        try:
            resp = self._client.post(self.url, json=body, headers=self._headers)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, json.JSONDecodeError) as exc:
            raise BackendError(f"remote backend failure: {exc}") from exc
        if "completion" not in data:
            raise BackendError(f"remote backend returned no completion: {data!r}")
        return _completion_from_spec(data["completion"], turn_index=-1)
