"""Cyber-range description files: data model, parser, serializer, validator, semantic diff."""

from crforge.cr.parser import (
    InvalidEnum,
    MissingField,
    ParseError,
    UnknownSection,
    parse_description,
)
from crforge.cr.semantics import Finding, ScenarioIntent, TaskRequirement, intent_of, semantic_diff
from crforge.cr.serializer import serialize_description
from crforge.cr.types import (
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
from crforge.cr.validator import SyntaxFinding, ValidationReport, validate_syntax

__all__ = [
    "CloneGuest",
    "CloneHost",
    "CloneSettings",
    "CrDescription",
    "GuestSettings",
    "HostSettings",
    "Network",
    "TaskEntry",
    "TopologySpec",
    "ParseError",
    "UnknownSection",
    "MissingField",
    "InvalidEnum",
    "parse_description",
    "serialize_description",
    "SyntaxFinding",
    "ValidationReport",
    "validate_syntax",
    "Finding",
    "ScenarioIntent",
    "TaskRequirement",
    "intent_of",
    "semantic_diff",
]
