"""Structured model of a cyber-range description file.

A description has three top-level sections: host_settings (physical hosts),
guest_settings (base VM images), and clone_settings (which guests to stamp
out on which hosts, with what network topology). Task entries on clone
guests are kept as typed-tag + opaque-parameter records so unknown task
syntax still round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

BASEVM_TYPES = ("kvm", "aws")
TOPOLOGY_TYPES = ("custom",)

# task kinds bucketed by what they do to the scenario; used by the semantic diff
TASK_CATEGORIES = {
    "attack": ("attack",),
    "malware": ("malware",),
    "traffic_capture": ("traffic", "capture", "pcap"),
    "firewall": ("firewall",),
    "program": ("program", "package", "install", "execute", "copy"),
    "account": ("account",),
}


def task_category(kind: str) -> str:
    """Bucket a task kind ("emulate_attack", "firewall_rules", ...) by keyword."""
    lowered = kind.lower()
    for category, needles in TASK_CATEGORIES.items():
        if any(n in lowered for n in needles):
            return category
    return "other"


@dataclass(frozen=True)
class TaskEntry:
    """One task on a clone guest: a kind tag plus opaque parameters."""

    kind: str
    params: Any = None

    @property
    def category(self) -> str:
        return task_category(self.kind)


@dataclass(frozen=True)
class HostSettings:
    id: str
    mgmt_addr: str
    virbr_addr: str
    account: str


@dataclass(frozen=True)
class GuestSettings:
    id: str
    basevm_host: str
    basevm_config_file: str
    basevm_type: str


@dataclass(frozen=True)
class CloneGuest:
    guest_id: str
    number: int = 1
    entry_point: bool = False
    tasks: tuple[TaskEntry, ...] = ()


@dataclass(frozen=True)
class Network:
    name: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class TopologySpec:
    type: str
    networks: tuple[Network, ...]


@dataclass(frozen=True)
class CloneHost:
    host_id: str
    instance_number: int = 1
    guests: tuple[CloneGuest, ...] = ()
    topology: tuple[TopologySpec, ...] = ()


@dataclass(frozen=True)
class CloneSettings:
    range_id: int
    hosts: tuple[CloneHost, ...]


@dataclass(frozen=True)
class CrDescription:
    """A parsed description file.

    source_text preserves the text the value was parsed from and is excluded
    from equality: two descriptions are equal when their structure is.
    """

    hosts: tuple[HostSettings, ...]
    guests: tuple[GuestSettings, ...]
    clone: CloneSettings
    source_text: str = field(default="", compare=False)

    def host_ids(self) -> list[str]:
        return [h.id for h in self.hosts]

    def guest_ids(self) -> list[str]:
        return [g.id for g in self.guests]

    def clone_guest_ids(self) -> list[str]:
        return [g.guest_id for host in self.clone.hosts for g in host.guests]

    def references(self) -> list[tuple[str, str, str]]:
        """Cross-reference edges as (from_path, kind, target_id)."""
        edges: list[tuple[str, str, str]] = []
        for i, guest in enumerate(self.guests):
            edges.append((f"guest_settings[{i}].basevm_host", "host", guest.basevm_host))
        for i, ch in enumerate(self.clone.hosts):
            base = f"clone_settings.hosts[{i}]"
            edges.append((f"{base}.host_id", "host", ch.host_id))
            for j, cg in enumerate(ch.guests):
                edges.append((f"{base}.guests[{j}].guest_id", "guest", cg.guest_id))
            for t, topo in enumerate(ch.topology):
                for n, net in enumerate(topo.networks):
                    for m, member in enumerate(net.members):
                        guest_ref = member.split(".", 1)[0]
                        edges.append(
                            (f"{base}.topology[{t}].networks[{n}].members[{m}]", "guest", guest_ref)
                        )
        return edges
