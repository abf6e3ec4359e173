"""Checker and deployer clients: in-process implementations plus HTTP ones.

The engine only sees these contracts, so swapping the in-process checker for
the HTTP service (or a real framework's own parser behind the same endpoint)
is a drop-in substitution.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable

import httpx

from crforge.cr.parser import ParseError, parse_description
from crforge.cr.validator import ValidationReport, validate_syntax
from crforge.deploy.plan import FrameworkProfile, plan_deployment
from crforge.deploy.runner import CommandResult, DeploymentResult, execute
from crforge.deploy.transport import CommandTransport, SimulatedTransport
from crforge.errors import BackendError, UnknownFramework

SUPPORTED_FRAMEWORKS = ("cyris",)


@runtime_checkable
class CheckerClient(Protocol):
    def check(self, framework: str, description_text: str) -> ValidationReport: ...


@runtime_checkable
class DeployClient(Protocol):
    def deploy(self, framework: str, description_text: str, dry_run: bool = False) -> DeploymentResult: ...


class LocalChecker:
    """Runs the validator in-process; only cyris has a validator contract."""

    frameworks = SUPPORTED_FRAMEWORKS

    def check(self, framework: str, description_text: str) -> ValidationReport:
        if framework not in self.frameworks:
            raise UnknownFramework(framework, "no validator contract")
        return validate_syntax(description_text)


class LocalDeployer:
    """Plans and executes in-process over a transport (simulated by default)."""

    def __init__(self, profile: FrameworkProfile, transport: CommandTransport | None = None):
        self.profile = profile
        self.transport = transport if transport is not None else SimulatedTransport()

    def deploy(self, framework: str, description_text: str, dry_run: bool = False) -> DeploymentResult:
        if framework not in SUPPORTED_FRAMEWORKS:
            raise UnknownFramework(framework, "no deployment contract")
        try:
            desc = parse_description(description_text)
        except ParseError as exc:
            return DeploymentResult(
                status="failed",
                range_id=0,
                results=(CommandResult(step="parse description", exit_status=1, stderr=str(exc)),),
            )
        plan = plan_deployment(desc, self.profile)
        if dry_run:
            results = tuple(CommandResult(step=s, exit_status=0) for s in plan.steps())
            return DeploymentResult(status="succeeded", range_id=plan.range_id, results=results)
        return execute(plan, self.transport)


class HttpChecker:
    """CheckerClient over the HTTP service."""

    def __init__(self, base_url: str, client: httpx.Client | None = None, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def check(self, framework: str, description_text: str) -> ValidationReport:
        url = f"{self.base_url}/api/v1/frameworks/{framework}/check"
        try:
            resp = self._client.post(url, json={"framework": framework, "description_text": description_text})
        except httpx.HTTPError as exc:
            raise BackendError(f"checker service unreachable: {exc}") from exc
        if resp.status_code == 404:
            raise UnknownFramework(framework, "checker service does not know it")
        if resp.status_code != 200:
            raise BackendError(f"checker service returned {resp.status_code}: {resp.text}")
        return ValidationReport.from_dict(resp.json())


class HttpDeployer:
    """DeployClient over the HTTP service; polls the deployment record to completion."""

    def __init__(self, base_url: str, target: dict | None = None,
                 client: httpx.Client | None = None, poll_interval: float = 0.05,
                 timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.target = target or {"type": "simulated"}
        self.poll_interval = poll_interval
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=30.0)

    def deploy(self, framework: str, description_text: str, dry_run: bool = False) -> DeploymentResult:
        url = f"{self.base_url}/api/v1/frameworks/{framework}/deploy"
        body = {
            "framework": framework,
            "description_text": description_text,
            "target": self.target,
            "dry_run": dry_run,
        }
        try:
            resp = self._client.post(url, json=body)
        except httpx.HTTPError as exc:
            raise BackendError(f"deploy service unreachable: {exc}") from exc
        if resp.status_code == 404:
            raise UnknownFramework(framework, "deploy service does not know it")
        if resp.status_code == 422:
            report = ValidationReport.from_dict(resp.json().get("report", {}))
            results = tuple(
                CommandResult(step=f"validate: {f.code} at {f.path}", exit_status=1, stderr=f.message)
                for f in report.findings
            )
            return DeploymentResult(status="failed", range_id=0, results=results)
        if resp.status_code != 202:
            raise BackendError(f"deploy service returned {resp.status_code}: {resp.text}")

        deployment_id = resp.json()["deployment_id"]
        deadline = time.monotonic() + self.timeout
        while True:
            record = self._client.get(f"{self.base_url}/api/v1/deployments/{deployment_id}").json()
            if record["status"] in ("succeeded", "failed"):
                results = tuple(
                    CommandResult(
                        step=entry["command"],
                        exit_status=entry["exit_status"],
                        stdout=entry.get("output", ""),
                    )
                    for entry in record.get("command_log", [])
                )
                return DeploymentResult(
                    status=record["status"],
                    range_id=record.get("range_id", 0),
                    results=results,
                )
            if time.monotonic() > deadline:
                raise BackendError(f"deployment {deployment_id} did not finish in {self.timeout}s")
            time.sleep(self.poll_interval)
