"""Command planning and execution over pluggable transports."""

from crforge.deploy.plan import Artifact, Command, CommandPlan, FrameworkProfile, load_profile, plan_deployment
from crforge.deploy.runner import CommandResult, DeploymentResult, execute
from crforge.deploy.transport import CommandTransport, SimulatedTransport, SshTransport

__all__ = [
    "Artifact",
    "Command",
    "CommandPlan",
    "CommandResult",
    "CommandTransport",
    "DeploymentResult",
    "FrameworkProfile",
    "SimulatedTransport",
    "SshTransport",
    "execute",
    "load_profile",
    "plan_deployment",
]
