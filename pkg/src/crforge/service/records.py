"""Deployment records: single writer per record, many readers."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

_TRANSITIONS = {
    "pending": {"running"},
    "running": {"succeeded", "failed"},
    "succeeded": set(),
    "failed": set(),
}


@dataclass
class DeploymentRecord:
    framework: str
    dry_run: bool
    deployment_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    status: str = "pending"
    range_id: int = 0
    command_log: list[dict[str, Any]] = field(default_factory=list)
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def transition(self, new_status: str) -> None:
        if new_status not in _TRANSITIONS[self.status]:
            raise ValueError(f"illegal record transition {self.status} -> {new_status}")
        self.status = new_status

    def to_dict(self) -> dict[str, Any]:
        return {
            "deployment_id": self.deployment_id,
            "framework": self.framework,
            "status": self.status,
            "dry_run": self.dry_run,
            "range_id": self.range_id,
            "command_log": list(self.command_log),
            "created_at": self.created_at,
        }


class RecordStore:
    """Thread-safe in-memory record registry."""

    def __init__(self) -> None:
        self._records: dict[str, DeploymentRecord] = {}
        self._lock = threading.Lock()

    def create(self, framework: str, dry_run: bool) -> DeploymentRecord:
        record = DeploymentRecord(framework=framework, dry_run=dry_run)
        with self._lock:
            self._records[record.deployment_id] = record
        return record

    def get(self, deployment_id: str) -> DeploymentRecord | None:
        with self._lock:
            return self._records.get(deployment_id)
