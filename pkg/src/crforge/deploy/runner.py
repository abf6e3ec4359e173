"""Plan execution: sequential steps, first failure short-circuits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from crforge.deploy.plan import CommandPlan
from crforge.deploy.transport import CommandTransport
from crforge.errors import TransportError

_EXCERPT = 2000


@dataclass(frozen=True)
class CommandResult:
    step: str
    exit_status: int
    stdout: str = ""
    stderr: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.step,
            "exit_status": self.exit_status,
            "output": (self.stdout or self.stderr)[:_EXCERPT],
        }


@dataclass(frozen=True)
class DeploymentResult:
    status: str  # succeeded | failed
    range_id: int
    results: tuple[CommandResult, ...]

    @property
    def succeeded(self) -> bool:
        return self.status == "succeeded"

    def command_log(self) -> list[dict[str, Any]]:
        return [r.to_dict() for r in self.results]

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "range_id": self.range_id, "command_log": self.command_log()}


def execute(plan: CommandPlan, transport: CommandTransport) -> DeploymentResult:
    """Upload artifacts then run commands in order; never runs past a failure."""
    results: list[CommandResult] = []

    for artifact in plan.artifacts:
        step = f"upload {artifact.remote_path}"
        try:
            transport.upload(artifact)
        except TransportError as exc:
            results.append(CommandResult(step=step, exit_status=1, stderr=str(exc)))
            return DeploymentResult(status="failed", range_id=plan.range_id, results=tuple(results))
        results.append(CommandResult(step=step, exit_status=0))

    for command in plan.commands:
        try:
            exit_status, stdout, stderr = transport.run(command)
        except TransportError as exc:
            results.append(CommandResult(step=command.display(), exit_status=1, stderr=str(exc)))
            return DeploymentResult(status="failed", range_id=plan.range_id, results=tuple(results))
        results.append(
            CommandResult(step=command.display(), exit_status=exit_status, stdout=stdout, stderr=stderr)
        )
        if exit_status != 0:
            return DeploymentResult(status="failed", range_id=plan.range_id, results=tuple(results))

    return DeploymentResult(status="succeeded", range_id=plan.range_id, results=tuple(results))
