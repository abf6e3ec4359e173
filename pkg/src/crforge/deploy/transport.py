"""Command transports: the simulated in-tree default and an SSH-style remote."""

from __future__ import annotations

import subprocess
from typing import Protocol, runtime_checkable

from crforge.deploy.plan import Artifact, Command
from crforge.errors import TransportError


@runtime_checkable
class CommandTransport(Protocol):
    """Sequential upload/run contract a plan executes against."""

    def upload(self, artifact: Artifact) -> None: ...

    def run(self, command: Command) -> tuple[int, str, str]: ...


class SimulatedTransport:
    """Records every call and echoes commands back; optionally scripted to fail.

    fail_at_step counts across the whole plan (uploads first), 1-based, so a
    2-step plan with fail_at_step=2 uploads fine and fails the run.
    """

    def __init__(self, fail_at_step: int | None = None):
        self.fail_at_step = fail_at_step
        self.uploads: list[Artifact] = []
        self.commands: list[Command] = []
        self.calls: list[str] = []
        self._step = 0

    def _next_step_fails(self) -> bool:
        self._step += 1
        return self.fail_at_step is not None and self._step == self.fail_at_step

    def upload(self, artifact: Artifact) -> None:
        self.calls.append(f"upload {artifact.remote_path}")
        self.uploads.append(artifact)
        if self._next_step_fails():
            raise TransportError(f"simulated upload failure at step {self._step}")

    def run(self, command: Command) -> tuple[int, str, str]:
        self.calls.append(command.display())
        self.commands.append(command)
        if self._next_step_fails():
            return 1, "", f"simulated command failure at step {self._step}"
        return 0, f"simulated: {command.display()}", ""


class SshTransport:
    """Runs the plan over ssh/scp subprocesses (host, user, key path contract)."""

    def __init__(self, host: str, user: str, key_path: str | None = None, connect_timeout: int = 10):
        self.host = host
        self.user = user
        self.key_path = key_path
        self.connect_timeout = connect_timeout

    def _ssh_base(self) -> list[str]:
        base = ["ssh", "-o", "BatchMode=yes", "-o", f"ConnectTimeout={self.connect_timeout}"]
        if self.key_path:
            base += ["-i", self.key_path]
        return base + [f"{self.user}@{self.host}"]

    def upload(self, artifact: Artifact) -> None:
        argv = self._ssh_base() + [f"cat > {artifact.remote_path}"]
        try:
            proc = subprocess.run(
                argv, input=artifact.content.encode("utf-8"),
                capture_output=True, timeout=self.connect_timeout + 60,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise TransportError(f"upload to {self.host} failed: {exc}") from exc
        if proc.returncode != 0:
            raise TransportError(
                f"upload to {self.host} exited {proc.returncode}: {proc.stderr.decode(errors='replace')}"
            )

    def run(self, command: Command) -> tuple[int, str, str]:
        remote = f"cd {command.working_dir} && {command.display()}"
        argv = self._ssh_base() + [remote]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=command.timeout_s)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise TransportError(f"command on {self.host} failed: {exc}") from exc
        return (
            proc.returncode,
            proc.stdout.decode(errors="replace"),
            proc.stderr.decode(errors="replace"),
        )
