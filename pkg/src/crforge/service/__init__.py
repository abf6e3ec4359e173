"""HTTP service: syntax check endpoint, async deployments, agent sessions."""

from crforge.service.app import create_app
from crforge.service.records import DeploymentRecord, RecordStore

__all__ = ["create_app", "DeploymentRecord", "RecordStore"]
