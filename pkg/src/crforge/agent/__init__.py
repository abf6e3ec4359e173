"""Agent sessions: backends, tool clients, and the bounded self-correction engine."""

from crforge.agent.backends import LlmBackend, RemoteBackend, ScriptedBackend
from crforge.agent.clients import (
    CheckerClient,
    DeployClient,
    HttpChecker,
    HttpDeployer,
    LocalChecker,
    LocalDeployer,
)
from crforge.agent.engine import AgentEngine
from crforge.agent.messages import (
    TOOL_NAMES,
    AgentEvent,
    BackendProfile,
    Completion,
    Message,
    Outcome,
    ToolCall,
)
from crforge.agent.session import Session, SessionStatus

__all__ = [
    "AgentEngine",
    "AgentEvent",
    "BackendProfile",
    "CheckerClient",
    "Completion",
    "DeployClient",
    "HttpChecker",
    "HttpDeployer",
    "LlmBackend",
    "LocalChecker",
    "LocalDeployer",
    "Message",
    "Outcome",
    "RemoteBackend",
    "ScriptedBackend",
    "Session",
    "SessionStatus",
    "TOOL_NAMES",
    "ToolCall",
]
