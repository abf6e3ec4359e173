"""Validator: one finding per defect, all findings in one pass."""

import json

import pytest

from crforge.cr.parser import parse_description
from crforge.cr.validator import (
    E_BAD_ENUM,
    E_BAD_IPV4,
    E_BAD_RANGE_ID,
    E_DANGLING_REF,
    E_DUP_ID,
    E_MISSING_FIELD,
    E_NO_ENTRY_POINT,
    E_NO_TOPOLOGY,
    E_PARSE,
    E_UNKNOWN_SECTION,
    W_MULTI_ENTRY_POINT,
    ValidationReport,
    validate_syntax,
)


def test_basic_range_is_valid(basic_range_text):
    report = validate_syntax(basic_range_text)
    assert report.status == "valid"
    assert report.findings == []


def test_golden_corpus_is_valid(golden_texts):
    for name, text in golden_texts.items():
        report = validate_syntax(text)
        assert report.valid, (name, report.to_dict())


def test_parsed_value_input_is_accepted(basic_range_text):
    report = validate_syntax(parse_description(basic_range_text))
    assert report.valid


def test_missing_entry_point(basic_range_text):
    text = basic_range_text.replace("            entry_point: yes\n", "")
    report = validate_syntax(text)
    assert report.status == "invalid"
    assert [f.code for f in report.findings] == [E_NO_ENTRY_POINT]
    assert report.findings[0].path == "clone_settings.hosts[0]"


def test_missing_topology_block(basic_range_text):
    head, _, _ = basic_range_text.partition("        topology:")
    report = validate_syntax(head)
    assert report.status == "invalid"
    assert E_NO_TOPOLOGY in report.codes()
    assert [f.path for f in report.findings if f.code == E_NO_TOPOLOGY] == ["clone_settings.hosts[0]"]


def test_dangling_member_reference(basic_range_text):
    text = basic_range_text.replace("members: desktop.eth0", "members: server.eth0")
    report = validate_syntax(text)
    assert report.status == "invalid"
    assert E_DANGLING_REF in report.codes()


def test_bad_enum(basic_range_text):
    text = basic_range_text.replace("basevm_type: kvm", "basevm_type: vmware")
    report = validate_syntax(text)
    assert [f.code for f in report.findings] == [E_BAD_ENUM]
    assert report.findings[0].path == "guest_settings.basevm_type"


def test_unparseable_text_is_a_parse_finding():
    report = validate_syntax("- host_settings:\n  id: [unclosed\n")
    assert report.status == "invalid"
    assert report.codes() == [E_PARSE]


def test_empty_text_is_a_parse_finding():
    report = validate_syntax("")
    assert report.codes() == [E_PARSE]


def test_missing_section(basic_range_text):
    text = basic_range_text.split("- clone_settings:")[0]
    report = validate_syntax(text)
    assert E_MISSING_FIELD in report.codes()
    assert any(f.path == "clone_settings" for f in report.findings)


def test_unknown_section_is_flagged_and_rest_still_checked(basic_range_text):
    text = basic_range_text + "- power_settings:\n    level: 9\n"
    report = validate_syntax(text)
    assert E_UNKNOWN_SECTION in report.codes()
    # the known sections were still validated: no other errors expected
    assert report.codes() == [E_UNKNOWN_SECTION]


def test_bad_ipv4(basic_range_text):
    text = basic_range_text.replace("virbr_addr: 192.168.10.1", "virbr_addr: 192.168.10.999")
    report = validate_syntax(text)
    assert report.codes() == [E_BAD_IPV4]


def test_bad_range_id(basic_range_text):
    text = basic_range_text.replace("range_id: 1", "range_id: 0")
    report = validate_syntax(text)
    assert report.codes() == [E_BAD_RANGE_ID]


def test_missing_field(basic_range_text):
    text = basic_range_text.replace("    account: user\n", "")
    report = validate_syntax(text)
    assert report.codes() == [E_MISSING_FIELD]
    assert report.findings[0].path == "host_settings.account"


def test_dangling_basevm_host(basic_range_text):
    text = basic_range_text.replace("basevm_host: host_1", "basevm_host: host_9")
    report = validate_syntax(text)
    assert E_DANGLING_REF in report.codes()
    assert any(f.path == "guest_settings.basevm_host" for f in report.findings)


def test_duplicate_guest_ids(golden_texts):
    text = golden_texts["training_lab.yml"].replace("id: webserver", "id: desktop", 1)
    report = validate_syntax(text)
    assert E_DUP_ID in report.codes()


def test_multiple_entry_points_warn_but_stay_valid(golden_texts):
    text = golden_texts["training_lab.yml"].replace(
        "          - guest_id: webserver\n            number: 1\n",
        "          - guest_id: webserver\n            number: 1\n            entry_point: yes\n",
    )
    report = validate_syntax(text)
    assert report.valid
    assert W_MULTI_ENTRY_POINT in report.codes()
    assert all(f.severity == "warning" for f in report.findings)


def test_all_findings_reported_in_one_pass(basic_range_text):
    text = (
        basic_range_text.replace("            entry_point: yes\n", "")
        .replace("basevm_type: kvm", "basevm_type: vmware")
        .replace("virbr_addr: 192.168.10.1", "virbr_addr: not-an-ip")
    )
    report = validate_syntax(text)
    codes = set(report.codes())
    assert {E_NO_ENTRY_POINT, E_BAD_ENUM, E_BAD_IPV4} <= codes


def test_report_json_shape(basic_range_text):
    text = basic_range_text.replace("            entry_point: yes\n", "")
    report = validate_syntax(text)
    data = report.to_dict()
    assert data["status"] == "invalid"
    assert data["findings"][0]["code"] == E_NO_ENTRY_POINT
    assert set(data["findings"][0]) == {"code", "path", "message", "severity"}
    # round trip through JSON
    loaded = ValidationReport.from_dict(json.loads(json.dumps(data)))
    assert loaded.codes() == report.codes()
    assert loaded.status == report.status


DEFECT_CATALOG = [
    ("missing_field", lambda t: t.replace("    mgmt_addr: localhost\n", ""), E_MISSING_FIELD),
    ("dangling_ref", lambda t: t.replace("host_id: host_1", "host_id: host_9"), E_DANGLING_REF),
    ("bad_enum", lambda t: t.replace("type: custom", "type: star"), E_BAD_ENUM),
    ("no_entry_point", lambda t: t.replace("            entry_point: yes\n", ""), E_NO_ENTRY_POINT),
    ("empty_topology", lambda t: t.partition("        topology:")[0], E_NO_TOPOLOGY),
    ("bad_ipv4", lambda t: t.replace("192.168.10.1", "999.1.2.3"), E_BAD_IPV4),
    ("bad_range_id", lambda t: t.replace("range_id: 1", "range_id: -4"), E_BAD_RANGE_ID),
]


@pytest.mark.parametrize("name,mutate,expected_code", DEFECT_CATALOG, ids=[d[0] for d in DEFECT_CATALOG])
def test_single_defect_injection_yields_exactly_its_code(basic_range_text, name, mutate, expected_code):
    mutated = mutate(basic_range_text)
    assert mutated != basic_range_text
    report = validate_syntax(mutated)
    assert report.status == "invalid"
    assert expected_code in report.codes()
