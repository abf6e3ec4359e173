"""Syntax and cross-reference validator for description files.

Unlike the parser, the validator never raises: it walks the whole document
and reports every finding in one pass, so a generation loop can fix all
errors in a single retry instead of rediscovering them one at a time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Union

from crforge.cr import parser as p
from crforge.cr.serializer import serialize_description
from crforge.cr.types import BASEVM_TYPES, TOPOLOGY_TYPES, CrDescription

# stable error codes; the agent loop and the scripted tests key on these
E_PARSE = "E_PARSE"
E_UNKNOWN_SECTION = "E_UNKNOWN_SECTION"
E_MISSING_FIELD = "E_MISSING_FIELD"
E_BAD_TYPE = "E_BAD_TYPE"
E_BAD_ENUM = "E_BAD_ENUM"
E_BAD_IPV4 = "E_BAD_IPV4"
E_BAD_PATH = "E_BAD_PATH"
E_BAD_RANGE_ID = "E_BAD_RANGE_ID"
E_BAD_COUNT = "E_BAD_COUNT"
E_BAD_MEMBER = "E_BAD_MEMBER"
E_DANGLING_REF = "E_DANGLING_REF"
E_DUP_ID = "E_DUP_ID"
E_NO_ENTRY_POINT = "E_NO_ENTRY_POINT"
E_NO_TOPOLOGY = "E_NO_TOPOLOGY"
W_MULTI_ENTRY_POINT = "W_MULTI_ENTRY_POINT"
W_UNKNOWN_FIELD = "W_UNKNOWN_FIELD"

_IPV4_RE = re.compile(r"^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$")
_MEMBER_RE = re.compile(r"^([A-Za-z0-9_-]+)\.eth(\d+)$")

_HOST_FIELDS = ("id", "mgmt_addr", "virbr_addr", "account")
_GUEST_FIELDS = ("id", "basevm_host", "basevm_config_file", "basevm_type")
_CLONE_HOST_FIELDS = ("host_id", "instance_number", "guests", "topology")
_CLONE_GUEST_FIELDS = ("guest_id", "number", "entry_point", "tasks")
_TOPOLOGY_FIELDS = ("type", "networks")
_NETWORK_FIELDS = ("name", "members")


@dataclass(frozen=True)
class SyntaxFinding:
    code: str
    path: str
    message: str
    severity: str = "error"  # error | warning

    def to_dict(self) -> dict[str, str]:
        return {
            "code": self.code,
            "path": self.path,
            "message": self.message,
            "severity": self.severity,
        }


@dataclass
class ValidationReport:
    findings: list[SyntaxFinding] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def status(self) -> str:
        return "valid" if self.valid else "invalid"

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "findings": [f.to_dict() for f in self.findings]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ValidationReport":
        findings = [
            SyntaxFinding(
                code=f["code"],
                path=f.get("path", ""),
                message=f.get("message", ""),
                severity=f.get("severity", "error"),
            )
            for f in data.get("findings", [])
        ]
        return cls(findings=findings)


class _Walk:
    """Single-pass document walk accumulating findings."""

    def __init__(self) -> None:
        self.findings: list[SyntaxFinding] = []
        self.host_ids: list[str] = []
        self.guest_ids: list[str] = []

    def add(self, code: str, path: str, message: str, severity: str = "error") -> None:
        self.findings.append(SyntaxFinding(code=code, path=path, message=message, severity=severity))

    # ---- field helpers ------------------------------------------------

    def _entries(self, value: Any, path: str) -> list[tuple[Any, str]]:
        if isinstance(value, dict):
            return [(value, path)]
        if isinstance(value, list):
            return [(item, f"{path}[{i}]") for i, item in enumerate(value)]
        self.add(E_BAD_TYPE, path, "section must be a mapping or a list of mappings")
        return []

    def _check_unknown(self, entry: dict, known: tuple[str, ...], path: str) -> None:
        for key in entry:
            if key not in known:
                self.add(W_UNKNOWN_FIELD, f"{path}.{key}", f"unknown field {key!r}", "warning")

    def _string(self, entry: dict, key: str, path: str) -> str | None:
        if key not in entry or entry[key] is None:
            self.add(E_MISSING_FIELD, f"{path}.{key}", f"required field {key!r} is missing")
            return None
        value = entry[key]
        if not isinstance(value, str) or not value:
            self.add(E_BAD_TYPE, f"{path}.{key}", f"expected a nonempty string, got {value!r}")
            return None
        return value

    def _positive_int(self, entry: dict, key: str, path: str, default: int | None) -> None:
        if key not in entry:
            if default is None:
                self.add(E_MISSING_FIELD, f"{path}.{key}", f"required field {key!r} is missing")
            return
        value = entry[key]
        if isinstance(value, bool) or not isinstance(value, int):
            self.add(E_BAD_TYPE, f"{path}.{key}", f"expected an integer, got {value!r}")
        elif value < 1:
            self.add(E_BAD_COUNT, f"{path}.{key}", f"{key} must be >= 1, got {value}")

    # ---- sections -----------------------------------------------------

    def check_hosts(self, value: Any, path: str) -> None:
        for entry, epath in self._entries(value, path):
            if not isinstance(entry, dict):
                self.add(E_BAD_TYPE, epath, "host entry must be a mapping")
                continue
            self._check_unknown(entry, _HOST_FIELDS, epath)
            host_id = self._string(entry, "id", epath)
            if host_id is not None:
                if host_id in self.host_ids:
                    self.add(E_DUP_ID, f"{epath}.id", f"duplicate host id {host_id!r}")
                else:
                    self.host_ids.append(host_id)
            self._string(entry, "mgmt_addr", epath)
            virbr = self._string(entry, "virbr_addr", epath)
            if virbr is not None and not self._is_ipv4(virbr):
                self.add(E_BAD_IPV4, f"{epath}.virbr_addr", f"{virbr!r} is not a dotted-quad IPv4 address")
            self._string(entry, "account", epath)

    @staticmethod
    def _is_ipv4(value: str) -> bool:
        m = _IPV4_RE.match(value)
        return bool(m) and all(0 <= int(part) <= 255 for part in m.groups())

    def check_guests(self, value: Any, path: str) -> None:
        for entry, epath in self._entries(value, path):
            if not isinstance(entry, dict):
                self.add(E_BAD_TYPE, epath, "guest entry must be a mapping")
                continue
            self._check_unknown(entry, _GUEST_FIELDS, epath)
            guest_id = self._string(entry, "id", epath)
            if guest_id is not None:
                if guest_id in self.guest_ids:
                    self.add(E_DUP_ID, f"{epath}.id", f"duplicate guest id {guest_id!r}")
                else:
                    self.guest_ids.append(guest_id)
            basevm_host = self._string(entry, "basevm_host", epath)
            if basevm_host is not None and basevm_host not in self.host_ids:
                self.add(
                    E_DANGLING_REF,
                    f"{epath}.basevm_host",
                    f"basevm_host {basevm_host!r} does not reference a declared host",
                )
            config_file = self._string(entry, "basevm_config_file", epath)
            if config_file is not None and not config_file.startswith("/"):
                self.add(
                    E_BAD_PATH,
                    f"{epath}.basevm_config_file",
                    f"basevm_config_file must be an absolute path, got {config_file!r}",
                )
            basevm_type = self._string(entry, "basevm_type", epath)
            if basevm_type is not None and basevm_type not in BASEVM_TYPES:
                self.add(
                    E_BAD_ENUM,
                    f"{epath}.basevm_type",
                    f"basevm_type must be one of {', '.join(BASEVM_TYPES)}; got {basevm_type!r}",
                )

    def check_clone(self, value: Any, path: str) -> None:
        if isinstance(value, list):
            if len(value) != 1:
                self.add(E_BAD_TYPE, path, "clone_settings must hold exactly one configuration")
                return
            value = value[0]
        if not isinstance(value, dict):
            self.add(E_BAD_TYPE, path, "clone_settings must be a mapping")
            return
        self._check_unknown(value, ("range_id", "hosts"), path)

        if "range_id" not in value or value["range_id"] is None:
            self.add(E_MISSING_FIELD, f"{path}.range_id", "required field 'range_id' is missing")
        else:
            range_id = value["range_id"]
            if isinstance(range_id, bool) or not isinstance(range_id, int) or range_id < 1:
                self.add(E_BAD_RANGE_ID, f"{path}.range_id", f"range_id must be a positive integer, got {range_id!r}")

        hosts = value.get("hosts")
        if not isinstance(hosts, list) or not hosts:
            self.add(E_MISSING_FIELD, f"{path}.hosts", "clone_settings needs a nonempty 'hosts' list")
            return
        for i, entry in enumerate(hosts):
            self._check_clone_host(entry, f"{path}.hosts[{i}]")

    def _check_clone_host(self, entry: Any, path: str) -> None:
        if not isinstance(entry, dict):
            self.add(E_BAD_TYPE, path, "clone host entry must be a mapping")
            return
        self._check_unknown(entry, _CLONE_HOST_FIELDS, path)
        host_id = self._string(entry, "host_id", path)
        if host_id is not None and host_id not in self.host_ids:
            self.add(E_DANGLING_REF, f"{path}.host_id", f"host_id {host_id!r} does not reference a declared host")
        self._positive_int(entry, "instance_number", path, default=1)

        guests = entry.get("guests")
        if not isinstance(guests, list) or not guests:
            self.add(E_MISSING_FIELD, f"{path}.guests", "clone host needs a nonempty 'guests' list")
        else:
            entry_points = 0
            for i, guest in enumerate(guests):
                entry_points += self._check_clone_guest(guest, f"{path}.guests[{i}]")
            if entry_points == 0:
                self.add(
                    E_NO_ENTRY_POINT,
                    path,
                    "no guest in this clone host entry is marked entry_point; one is mandatory",
                )
            elif entry_points > 1:
                self.add(
                    W_MULTI_ENTRY_POINT,
                    path,
                    f"{entry_points} guests are marked entry_point; usually exactly one is",
                    "warning",
                )

        topology = entry.get("topology")
        if topology is None or (isinstance(topology, list) and not topology):
            self.add(E_NO_TOPOLOGY, path, "clone host entry has no network topology; one is mandatory")
        elif not isinstance(topology, list):
            self.add(E_BAD_TYPE, f"{path}.topology", "topology must be a list")
        else:
            for i, topo in enumerate(topology):
                self._check_topology(topo, f"{path}.topology[{i}]")

    def _check_clone_guest(self, entry: Any, path: str) -> int:
        """Returns 1 when this guest is a well-formed entry point, else 0."""
        if not isinstance(entry, dict):
            self.add(E_BAD_TYPE, path, "clone guest entry must be a mapping")
            return 0
        self._check_unknown(entry, _CLONE_GUEST_FIELDS, path)
        guest_id = self._string(entry, "guest_id", path)
        if guest_id is not None and guest_id not in self.guest_ids:
            self.add(E_DANGLING_REF, f"{path}.guest_id", f"guest_id {guest_id!r} does not reference a declared guest")
        self._positive_int(entry, "number", path, default=1)
        entry_point = entry.get("entry_point", False)
        if not isinstance(entry_point, bool):
            self.add(E_BAD_TYPE, f"{path}.entry_point", f"entry_point must be a boolean, got {entry_point!r}")
            return 0
        tasks = entry.get("tasks")
        if tasks is not None:
            if not isinstance(tasks, list):
                self.add(E_BAD_TYPE, f"{path}.tasks", "tasks must be a list")
            else:
                for i, task in enumerate(tasks):
                    if not isinstance(task, dict) or len(task) != 1:
                        self.add(E_BAD_TYPE, f"{path}.tasks[{i}]", "task entry must be a single-key mapping")
        return 1 if entry_point else 0

    def _check_topology(self, entry: Any, path: str) -> None:
        if not isinstance(entry, dict):
            self.add(E_BAD_TYPE, path, "topology entry must be a mapping")
            return
        self._check_unknown(entry, _TOPOLOGY_FIELDS, path)
        topo_type = self._string(entry, "type", path)
        if topo_type is not None and topo_type not in TOPOLOGY_TYPES:
            self.add(E_BAD_ENUM, f"{path}.type", f"topology type must be one of {', '.join(TOPOLOGY_TYPES)}; got {topo_type!r}")
        networks = entry.get("networks")
        if not isinstance(networks, list) or not networks:
            self.add(E_MISSING_FIELD, f"{path}.networks", "topology needs a nonempty 'networks' list")
            return
        seen_names: set[str] = set()
        for i, net in enumerate(networks):
            npath = f"{path}.networks[{i}]"
            if not isinstance(net, dict):
                self.add(E_BAD_TYPE, npath, "network entry must be a mapping")
                continue
            self._check_unknown(net, _NETWORK_FIELDS, npath)
            name = self._string(net, "name", npath)
            if name is not None:
                if name in seen_names:
                    self.add(E_DUP_ID, f"{npath}.name", f"duplicate network name {name!r}")
                seen_names.add(name)
            members = net.get("members")
            if members is None:
                self.add(E_MISSING_FIELD, f"{npath}.members", "network needs a 'members' entry")
                continue
            raw = [members] if isinstance(members, str) else members
            if not isinstance(raw, list) or not raw:
                self.add(E_BAD_TYPE, f"{npath}.members", "members must be an interface ref or a list of them")
                continue
            for j, member in enumerate(raw):
                mpath = f"{npath}.members[{j}]"
                if not isinstance(member, str):
                    self.add(E_BAD_TYPE, mpath, f"member must be a string like 'guest.eth0', got {member!r}")
                    continue
                m = _MEMBER_RE.match(member)
                if not m:
                    self.add(E_BAD_MEMBER, mpath, f"malformed interface ref {member!r}; expected 'guest_id.ethN'")
                    continue
                if m.group(1) not in self.guest_ids:
                    self.add(E_DANGLING_REF, mpath, f"member {member!r} does not reference a declared guest")


def validate_syntax(desc_or_text: Union[str, CrDescription]) -> ValidationReport:
    """Validate a description (text or parsed value); never raises.

    Checks parseability, section presence, field types and enums, cross
    references, the per-clone-host entry_point and topology requirements,
    IPv4 shape, and range_id positivity. Every finding is reported.
    """
    text = desc_or_text if isinstance(desc_or_text, str) else serialize_description(desc_or_text)
    walk = _Walk()

    try:
        doc = p.load_yaml(text)
    except p.ParseError as exc:
        walk.add(E_PARSE, "", str(exc))
        return ValidationReport(findings=walk.findings)

    if doc is None:
        walk.add(E_PARSE, "", "empty document: no sections")
        return ValidationReport(findings=walk.findings)
    if not isinstance(doc, list):
        walk.add(E_PARSE, "", "top level must be a list of dash-prefixed sections")
        return ValidationReport(findings=walk.findings)

    sections: dict[str, Any] = {}
    for item in doc:
        if not isinstance(item, dict) or len(item) != 1:
            walk.add(E_PARSE, "", "each top-level list item must be a single-key section mapping")
            continue
        (name, value), = item.items()
        if name not in p.SECTION_NAMES:
            walk.add(E_UNKNOWN_SECTION, str(name), f"unknown top-level section {name!r}")
        elif name in sections:
            walk.add(E_PARSE, str(name), f"duplicate section {name!r}")
        else:
            sections[name] = value

    for name in p.SECTION_NAMES:
        if name not in sections:
            walk.add(E_MISSING_FIELD, name, f"section {name!r} is missing")

    if "host_settings" in sections:
        walk.check_hosts(sections["host_settings"], "host_settings")
    if "guest_settings" in sections:
        walk.check_guests(sections["guest_settings"], "guest_settings")
    if "clone_settings" in sections:
        walk.check_clone(sections["clone_settings"], "clone_settings")

    return ValidationReport(findings=walk.findings)
