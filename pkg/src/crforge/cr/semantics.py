"""Semantic comparison between what a user asked for and what was generated.

Severity taxonomy:
  high    requested VMs or physical hosts are missing from the configuration
  medium  a requested attack / malware-emulation / traffic-capture / firewall
          task was not set up
  low     cosmetic divergences: altered usernames, missing marginal programs,
          entry-point or network-grouping mismatches
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from crforge.cr.types import CrDescription

MEDIUM_CATEGORIES = ("attack", "malware", "traffic_capture", "firewall")

_ACCOUNT_KEYS = ("account", "name", "user", "username", "new_account")


@dataclass(frozen=True)
class TaskRequirement:
    """One capability the scenario must set up, bucketed like TaskEntry.category."""

    category: str
    description: str = ""


@dataclass(frozen=True)
class Finding:
    severity: str  # high | medium | low
    description: str
    path: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"severity": self.severity, "description": self.description, "path": self.path}


@dataclass(frozen=True)
class ScenarioIntent:
    """Structured statement of the user's request; needs at least one guest requirement."""

    guest_count: int | None = None
    guest_ids: tuple[str, ...] = ()
    host_count: int | None = None
    host_ids: tuple[str, ...] = ()
    entry_point_guest: str | None = None
    networks: tuple[tuple[str, ...], ...] = ()  # groups of guests expected to share a network
    tasks: tuple[TaskRequirement, ...] = ()
    usernames: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.guest_count is None and not self.guest_ids:
            raise ValueError("a scenario intent needs at least one guest requirement")


def _total_vms(desc: CrDescription) -> int:
    return sum(g.number for host in desc.clone.hosts for g in host.guests)


def _desc_task_categories(desc: CrDescription) -> set[str]:
    return {
        task.category
        for host in desc.clone.hosts
        for guest in host.guests
        for task in guest.tasks
    }


def _collect_account_names(params: Any, out: set[str]) -> None:
    if isinstance(params, dict):
        for key, value in params.items():
            if str(key).lower() in _ACCOUNT_KEYS and isinstance(value, str):
                out.add(value)
            else:
                _collect_account_names(value, out)
    elif isinstance(params, list):
        for item in params:
            _collect_account_names(item, out)


def _desc_usernames(desc: CrDescription) -> set[str]:
    names = {host.account for host in desc.hosts}
    for host in desc.clone.hosts:
        for guest in host.guests:
            for task in guest.tasks:
                if task.category == "account":
                    _collect_account_names(task.params, names)
    return names


def _entry_point_guests(desc: CrDescription) -> set[str]:
    return {
        g.guest_id for host in desc.clone.hosts for g in host.guests if g.entry_point
    }


def _network_groups(desc: CrDescription) -> list[set[str]]:
    groups = []
    for host in desc.clone.hosts:
        for topo in host.topology:
            for net in topo.networks:
                groups.append({m.split(".", 1)[0] for m in net.members})
    return groups


def semantic_diff(intent: ScenarioIntent, desc: CrDescription) -> list[Finding]:
    """Divergences between the intent and a syntactically valid description.

    An empty list means the description semantically conforms to the request.
    """
    findings: list[Finding] = []

    clone_ids = set(desc.clone_guest_ids())
    if intent.guest_count is not None and _total_vms(desc) < intent.guest_count:
        findings.append(
            Finding(
                "high",
                f"requested {intent.guest_count} virtual machines but only "
                f"{_total_vms(desc)} are configured",
                "clone_settings",
            )
        )
    for gid in intent.guest_ids:
        if gid not in clone_ids:
            findings.append(
                Finding("high", f"requested guest {gid!r} is not in the configuration", "clone_settings")
            )

    clone_host_ids = [h.host_id for h in desc.clone.hosts]
    if intent.host_count is not None and len(clone_host_ids) < intent.host_count:
        findings.append(
            Finding(
                "high",
                f"requested {intent.host_count} physical hosts but only "
                f"{len(clone_host_ids)} are configured",
                "clone_settings.hosts",
            )
        )
    for hid in intent.host_ids:
        if hid not in clone_host_ids:
            findings.append(
                Finding("high", f"requested host {hid!r} is not in the configuration", "clone_settings.hosts")
            )

    present = _desc_task_categories(desc)
    for req in intent.tasks:
        if req.category in present:
            continue
        severity = "medium" if req.category in MEDIUM_CATEGORIES else "low"
        label = req.description or req.category.replace("_", " ")
        findings.append(Finding(severity, f"requested {label} task is not set up", "clone_settings"))

    usernames = _desc_usernames(desc)
    for name in intent.usernames:
        if name not in usernames:
            findings.append(
                Finding("low", f"requested username {name!r} does not appear in the configuration", "")
            )

    if intent.entry_point_guest is not None and intent.entry_point_guest not in _entry_point_guests(desc):
        findings.append(
            Finding(
                "low",
                f"entry point was requested on guest {intent.entry_point_guest!r} but is elsewhere",
                "clone_settings",
            )
        )

    groups = _network_groups(desc)
    for wanted in intent.networks:
        wanted_set = set(wanted)
        if not any(wanted_set <= group for group in groups):
            findings.append(
                Finding(
                    "low",
                    f"guests {sorted(wanted_set)} were expected to share a network but do not",
                    "clone_settings",
                )
            )

    return findings


def intent_of(desc: CrDescription) -> ScenarioIntent:
    """Mechanically extract the intent a description satisfies (used as a fixed point)."""
    guest_ids: list[str] = []
    for gid in desc.clone_guest_ids():
        if gid not in guest_ids:
            guest_ids.append(gid)
    entry_points = sorted(_entry_point_guests(desc))
    tasks = tuple(
        TaskRequirement(category=c) for c in sorted(_desc_task_categories(desc))
    )
    return ScenarioIntent(
        guest_count=_total_vms(desc),
        guest_ids=tuple(guest_ids),
        host_count=len(desc.clone.hosts),
        host_ids=tuple(h.host_id for h in desc.clone.hosts),
        entry_point_guest=entry_points[0] if entry_points else None,
        networks=tuple(tuple(sorted(g)) for g in _network_groups(desc)),
        tasks=tasks,
        usernames=tuple(sorted(_desc_usernames(desc))),
    )
