"""Turn a validated description into a deterministic command plan.

The framework's instantiation command line is configuration, not code: a
profile carries an entry template with <placeholder> slots. <desc> always
resolves to the remote path the description gets uploaded to; every other
placeholder must resolve from the profile's variables.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from crforge.cr.serializer import serialize_description
from crforge.cr.types import CrDescription
from crforge.errors import ConfigError

_PLACEHOLDER_RE = re.compile(r"<([a-z_][a-z0-9_]*)>")


@dataclass(frozen=True)
class FrameworkProfile:
    """Deployment configuration for one CR framework."""

    name: str
    entry_template: str
    variables: dict[str, str] = field(default_factory=dict)
    remote_dir: str = "/tmp/crforge"
    timeout_s: int = 600
    config_content: str | None = None  # optional config artifact uploaded next to the description
    config_remote_path: str | None = None


@dataclass(frozen=True)
class Artifact:
    remote_path: str
    content: str


@dataclass(frozen=True)
class Command:
    argv: tuple[str, ...]
    working_dir: str
    timeout_s: int

    def display(self) -> str:
        return " ".join(self.argv)


@dataclass(frozen=True)
class CommandPlan:
    """Uploads followed by commands; the description artifact always comes first."""

    target_host: str
    range_id: int
    artifacts: tuple[Artifact, ...]
    commands: tuple[Command, ...]

    def __len__(self) -> int:
        return len(self.artifacts) + len(self.commands)

    def steps(self) -> list[str]:
        return [f"upload {a.remote_path}" for a in self.artifacts] + [
            c.display() for c in self.commands
        ]


def load_profile(path: str | Path) -> FrameworkProfile:
    """Load a JSON framework profile ({name, entry_template, variables, ...})."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load framework profile {path}: {exc}") from exc
    if "entry_template" not in data:
        raise ConfigError(f"framework profile {path} has no entry_template")
    return FrameworkProfile(
        name=data.get("name", Path(path).stem),
        entry_template=data["entry_template"],
        variables=data.get("variables", {}),
        remote_dir=data.get("remote_dir", "/tmp/crforge"),
        timeout_s=data.get("timeout_s", 600),
        config_content=data.get("config_content"),
        config_remote_path=data.get("config_remote_path"),
    )


def _resolve(template: str, variables: dict[str, str]) -> str:
    def sub(match: re.Match) -> str:
        key = match.group(1)
        if key not in variables:
            raise ConfigError(f"entry template placeholder <{key}> is not defined")
        return variables[key]

    return _PLACEHOLDER_RE.sub(sub, template)


def plan_deployment(desc: CrDescription, profile: FrameworkProfile | None) -> CommandPlan:
    """Plan = upload the description (+ optional config), then run the entry command."""
    if profile is None or not profile.entry_template.strip():
        raise ConfigError("framework profile with a nonempty entry_template is required")

    range_id = desc.clone.range_id
    desc_path = f"{profile.remote_dir.rstrip('/')}/range_{range_id}.yml"
    artifacts = [Artifact(remote_path=desc_path, content=serialize_description(desc))]
    if profile.config_content is not None:
        cfg_path = profile.config_remote_path or f"{profile.remote_dir.rstrip('/')}/CONFIG"
        artifacts.append(Artifact(remote_path=cfg_path, content=profile.config_content))

    variables = dict(profile.variables)
    variables["desc"] = desc_path
    if profile.config_remote_path:
        variables.setdefault("cfg", profile.config_remote_path)
    argv = tuple(_resolve(profile.entry_template, variables).split())
    if not argv:
        raise ConfigError("entry template resolved to an empty command")

    return CommandPlan(
        target_host=desc.hosts[0].mgmt_addr,
        range_id=range_id,
        artifacts=tuple(artifacts),
        commands=(Command(argv=argv, working_dir=profile.remote_dir, timeout_s=profile.timeout_s),),
    )
