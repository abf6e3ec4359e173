"""Canonical serializer for CrDescription values.

Output shape: three dash-prefixed top-level sections, two-space indent steps,
fixed field order, booleans as yes/no. Serializing the same value twice gives
identical bytes, and parse(serialize(d)) == d.
"""

from __future__ import annotations

import json
from typing import Any

import yaml

from crforge.cr.types import (
    CloneGuest,
    CloneHost,
    CrDescription,
    GuestSettings,
    HostSettings,
    Network,
    TopologySpec,
)


def _fmt_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    # plain style only when a re-parse gives the same string back
    try:
        reparsed = yaml.safe_load(text)
    except yaml.YAMLError:
        reparsed = None
    if isinstance(reparsed, str) and reparsed == text and "\n" not in text and "#" not in text:
        return text
    return json.dumps(text)


def _is_scalar(value: Any) -> bool:
    return not isinstance(value, (dict, list))


def _emit_key(lines: list[str], key: str, value: Any, indent: int) -> None:
    pad = " " * indent
    if _is_scalar(value):
        lines.append(f"{pad}{key}: {_fmt_scalar(value)}")
    elif isinstance(value, dict):
        if value:
            lines.append(f"{pad}{key}:")
            for k, v in value.items():
                _emit_key(lines, str(k), v, indent + 2)
        else:
            lines.append(f"{pad}{key}: {{}}")
    else:
        if value:
            lines.append(f"{pad}{key}:")
            for item in value:
                _emit_item(lines, item, indent + 2)
        else:
            lines.append(f"{pad}{key}: []")


def _emit_item(lines: list[str], item: Any, indent: int) -> None:
    pad = " " * indent
    if _is_scalar(item):
        lines.append(f"{pad}- {_fmt_scalar(item)}")
        return
    if isinstance(item, dict):
        first = True
        for k, v in item.items():
            if first:
                if _is_scalar(v):
                    lines.append(f"{pad}- {k}: {_fmt_scalar(v)}")
                else:
                    lines.append(f"{pad}- {k}:")
                    _emit_collection_body(lines, v, indent + 4)
                first = False
            else:
                _emit_key(lines, str(k), v, indent + 2)
        if first:  # empty dict item
            lines.append(f"{pad}- {{}}")
        return
    # list item that is itself a list
    lines.append(f"{pad}-")
    for sub in item:
        _emit_item(lines, sub, indent + 2)


def _emit_collection_body(lines: list[str], value: Any, indent: int) -> None:
    """Emit a dict's keys or a list's items starting at the given column."""
    if isinstance(value, dict):
        for k, v in value.items():
            _emit_key(lines, str(k), v, indent)
    else:
        for item in value:
            _emit_item(lines, item, indent)


def _host_fields(host: HostSettings) -> dict[str, Any]:
    return {
        "id": host.id,
        "mgmt_addr": host.mgmt_addr,
        "virbr_addr": host.virbr_addr,
        "account": host.account,
    }


def _guest_fields(guest: GuestSettings) -> dict[str, Any]:
    return {
        "id": guest.id,
        "basevm_host": guest.basevm_host,
        "basevm_config_file": guest.basevm_config_file,
        "basevm_type": guest.basevm_type,
    }


def _clone_guest_fields(guest: CloneGuest) -> dict[str, Any]:
    fields: dict[str, Any] = {"guest_id": guest.guest_id, "number": guest.number}
    if guest.entry_point:
        fields["entry_point"] = True
    if guest.tasks:
        fields["tasks"] = [{task.kind: task.params} for task in guest.tasks]
    return fields


def _network_fields(net: Network) -> dict[str, Any]:
    members: Any = net.members[0] if len(net.members) == 1 else list(net.members)
    return {"name": net.name, "members": members}


def _topology_fields(topo: TopologySpec) -> dict[str, Any]:
    return {"type": topo.type, "networks": [_network_fields(n) for n in topo.networks]}


def _clone_host_fields(host: CloneHost) -> dict[str, Any]:
    return {
        "host_id": host.host_id,
        "instance_number": host.instance_number,
        "guests": [_clone_guest_fields(g) for g in host.guests],
        "topology": [_topology_fields(t) for t in host.topology],
    }


def _emit_section(lines: list[str], name: str, entries: list[dict[str, Any]]) -> None:
    lines.append(f"- {name}:")
    if len(entries) == 1:
        for k, v in entries[0].items():
            _emit_key(lines, k, v, 4)
    else:
        for entry in entries:
            _emit_item(lines, entry, 4)


def serialize_description(desc: CrDescription) -> str:
    """Render a description to canonical text (ends with a newline)."""
    lines: list[str] = []
    _emit_section(lines, "host_settings", [_host_fields(h) for h in desc.hosts])
    _emit_section(lines, "guest_settings", [_guest_fields(g) for g in desc.guests])

    lines.append("- clone_settings:")
    _emit_key(lines, "range_id", desc.clone.range_id, 4)
    lines.append("    hosts:")
    for host in desc.clone.hosts:
        _emit_item(lines, _clone_host_fields(host), 6)
    return "\n".join(lines) + "\n"
