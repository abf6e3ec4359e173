"""Strict parser from description-file text to CrDescription.

The document is YAML shaped as three dash-prefixed top-level list items
(host_settings, guest_settings, clone_settings). Sections holding a single
entry may be written as one mapping or a one-element list; both parse to the
same value. The parser raises on the first structural problem; use
validate_syntax for an exhaustive findings report.
"""

from __future__ import annotations

from typing import Any

import yaml

from crforge.cr.types import (
    BASEVM_TYPES,
    TOPOLOGY_TYPES,
    CloneGuest,
    CloneHost,
    CloneSettings,
    CrDescription,
    GuestSettings,
    HostSettings,
    Network,
    TaskEntry,
    TopologySpec,
)

SECTION_NAMES = ("host_settings", "guest_settings", "clone_settings")


class ParseError(Exception):
    """Malformed document; carries line/column when the YAML layer knows them."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSection(ParseError):
    def __init__(self, name: str):
        self.section = name
        super().__init__(f"unknown top-level section {name!r}; expected one of {SECTION_NAMES}")


class MissingField(ParseError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"missing required field at {path}")


class InvalidEnum(ParseError):
    def __init__(self, path: str, value: Any, allowed: tuple[str, ...]):
        self.path = path
        self.value = value
        self.allowed = allowed
        super().__init__(f"invalid value {value!r} at {path}; allowed: {', '.join(allowed)}")


def load_yaml(text: str) -> Any:
    """yaml.safe_load wrapped so syntax problems surface as ParseError."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ParseError(str(getattr(exc, "problem", exc)), mark.line + 1, mark.column + 1)
        raise ParseError(str(exc))


def split_sections(doc: Any) -> dict[str, Any]:
    """Check the top-level list-of-single-key-maps shape and index sections by name."""
    if doc is None:
        raise ParseError("empty document: no sections")
    if not isinstance(doc, list):
        raise ParseError("top level must be a list of dash-prefixed sections")
    sections: dict[str, Any] = {}
    for item in doc:
        if not isinstance(item, dict) or len(item) != 1:
            raise ParseError("each top-level list item must be a single-key section mapping")
        (name, value), = item.items()
        if name not in SECTION_NAMES:
            raise UnknownSection(str(name))
        if name in sections:
            raise ParseError(f"duplicate section {name!r}")
        sections[name] = value
    return sections


def _as_entry_list(value: Any, path: str) -> list[tuple[Any, str]]:
    """Normalize a section body (single mapping or list of mappings) to entries with paths."""
    if isinstance(value, dict):
        return [(value, path)]
    if isinstance(value, list):
        return [(item, f"{path}[{i}]") for i, item in enumerate(value)]
    raise ParseError(f"{path} must be a mapping or a list of mappings")


def _require(mapping: Any, key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise ParseError(f"{path} must be a mapping")
    if key not in mapping or mapping[key] is None:
        raise MissingField(f"{path}.{key}")
    return mapping[key]


def _str_field(mapping: Any, key: str, path: str) -> str:
    value = _require(mapping, key, path)
    if not isinstance(value, str) or not value:
        raise ParseError(f"{path}.{key} must be a nonempty string, got {value!r}")
    return value


def _int_field(mapping: Any, key: str, path: str, default: int | None = None) -> int:
    if default is not None and key not in mapping:
        return default
    value = _require(mapping, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{path}.{key} must be an integer, got {value!r}")
    return value


def _parse_host(entry: Any, path: str) -> HostSettings:
    return HostSettings(
        id=_str_field(entry, "id", path),
        mgmt_addr=_str_field(entry, "mgmt_addr", path),
        virbr_addr=_str_field(entry, "virbr_addr", path),
        account=_str_field(entry, "account", path),
    )


def _parse_guest(entry: Any, path: str) -> GuestSettings:
    basevm_type = _str_field(entry, "basevm_type", path)
    if basevm_type not in BASEVM_TYPES:
        raise InvalidEnum(f"{path}.basevm_type", basevm_type, BASEVM_TYPES)
    return GuestSettings(
        id=_str_field(entry, "id", path),
        basevm_host=_str_field(entry, "basevm_host", path),
        basevm_config_file=_str_field(entry, "basevm_config_file", path),
        basevm_type=basevm_type,
    )


def _parse_tasks(value: Any, path: str) -> tuple[TaskEntry, ...]:
    if not isinstance(value, list):
        raise ParseError(f"{path} must be a list of task entries")
    tasks = []
    for i, item in enumerate(value):
        if not isinstance(item, dict) or len(item) != 1:
            raise ParseError(f"{path}[{i}] must be a single-key task mapping")
        (kind, params), = item.items()
        tasks.append(TaskEntry(kind=str(kind), params=params))
    return tuple(tasks)


def _parse_clone_guest(entry: Any, path: str) -> CloneGuest:
    entry_point = entry.get("entry_point", False) if isinstance(entry, dict) else False
    if not isinstance(entry_point, bool):
        raise ParseError(f"{path}.entry_point must be a boolean, got {entry_point!r}")
    tasks: tuple[TaskEntry, ...] = ()
    if isinstance(entry, dict) and entry.get("tasks") is not None:
        tasks = _parse_tasks(entry["tasks"], f"{path}.tasks")
    return CloneGuest(
        guest_id=_str_field(entry, "guest_id", path),
        number=_int_field(entry, "number", path, default=1),
        entry_point=entry_point,
        tasks=tasks,
    )


def _parse_members(value: Any, path: str) -> tuple[str, ...]:
    raw = [value] if isinstance(value, str) else value
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{path} must be an interface ref or a nonempty list of them")
    members = []
    for i, member in enumerate(raw):
        if not isinstance(member, str):
            raise ParseError(f"{path}[{i}] must be a string like 'guest.eth0'")
        members.append(member)
    return tuple(members)


def _parse_topology(entry: Any, path: str) -> TopologySpec:
    topo_type = _str_field(entry, "type", path)
    if topo_type not in TOPOLOGY_TYPES:
        raise InvalidEnum(f"{path}.type", topo_type, TOPOLOGY_TYPES)
    networks_raw = _require(entry, "networks", path)
    if not isinstance(networks_raw, list) or not networks_raw:
        raise ParseError(f"{path}.networks must be a nonempty list")
    networks = []
    for i, net in enumerate(networks_raw):
        net_path = f"{path}.networks[{i}]"
        networks.append(
            Network(
                name=_str_field(net, "name", net_path),
                members=_parse_members(_require(net, "members", net_path), f"{net_path}.members"),
            )
        )
    return TopologySpec(type=topo_type, networks=tuple(networks))


def _parse_clone_host(entry: Any, path: str) -> CloneHost:
    guests_raw = _require(entry, "guests", path)
    if not isinstance(guests_raw, list):
        raise ParseError(f"{path}.guests must be a list")
    guests = tuple(
        _parse_clone_guest(g, f"{path}.guests[{i}]") for i, g in enumerate(guests_raw)
    )
    topo_raw = _require(entry, "topology", path)
    if not isinstance(topo_raw, list):
        raise ParseError(f"{path}.topology must be a list")
    topology = tuple(_parse_topology(t, f"{path}.topology[{i}]") for i, t in enumerate(topo_raw))
    return CloneHost(
        host_id=_str_field(entry, "host_id", path),
        instance_number=_int_field(entry, "instance_number", path, default=1),
        guests=guests,
        topology=topology,
    )


def _parse_clone(value: Any, path: str) -> CloneSettings:
    if isinstance(value, list):
        if len(value) != 1:
            raise ParseError(f"{path} must hold exactly one clone configuration")
        value = value[0]
    range_id = _int_field(value, "range_id", path)
    hosts_raw = _require(value, "hosts", path)
    if not isinstance(hosts_raw, list):
        raise ParseError(f"{path}.hosts must be a list")
    hosts = tuple(_parse_clone_host(h, f"{path}.hosts[{i}]") for i, h in enumerate(hosts_raw))
    return CloneSettings(range_id=range_id, hosts=hosts)


def parse_description(text: str) -> CrDescription:
    """Parse description-file text, raising on the first structural problem."""
    sections = split_sections(load_yaml(text))
    for name in SECTION_NAMES:
        if name not in sections:
            raise MissingField(name)

    hosts = tuple(
        _parse_host(entry, path)
        for entry, path in _as_entry_list(sections["host_settings"], "host_settings")
    )
    guests = tuple(
        _parse_guest(entry, path)
        for entry, path in _as_entry_list(sections["guest_settings"], "guest_settings")
    )
    clone = _parse_clone(sections["clone_settings"], "clone_settings")
    return CrDescription(hosts=hosts, guests=guests, clone=clone, source_text=text)
