import json

import pytest

from sinkfree.certify import CERT_SCHEMA, canonical_json, certify, state_hash
from sinkfree.diagram import DiagramTuple
from sinkfree.errors import InvalidTuple, SimpleDiagram


def test_certificate_for_23_11_1_7():
    c = certify("23,11,1,7")
    assert c.data["schema"] == CERT_SCHEMA
    assert c.summary["hierarchy_length"] == 1
    assert c.summary["descents"] == ["1/4"]
    assert c.summary["all_safe"] is True
    assert "1/4" in c.summary_text()
    lv = c.data["levels"][0]
    assert lv["status"] == "pushed"
    assert lv["collapse"]["strand"]["endpoints"] == ["c", "d"]
    assert lv["descent"]["terminal"] and {x["reason"] for x in lv["descent"]["terminal"]} == {"single_direction"}


def test_primitive_certificate_has_no_levels():
    c = certify(DiagramTuple(7, 3, 0, 1))
    assert c.summary["hierarchy_length"] == 0 and c.data["levels"] == []
    assert c.data["terminal"]["pushed"] and c.data["terminal"]["sink_disks_before"]
    assert c.data["terminal"]["sink_disks_after"] == []
    assert "hierarchy length 0" in c.summary_text()


def test_multi_step_descent_is_recorded():
    c = certify((19, 4, 5, 3))
    assert c.summary["descents"] == ["3/4 -> 2/3 -> 1/2"]
    assert len(c.data["levels"][0]["descent"]["steps"]) == 2


def test_every_double_point_has_a_reason():
    c = certify("23,11,1,7")
    tables = [lv["safety"] for lv in c.data["levels"]] + [c.data["terminal"]["safety"]]
    assert all(e["reason"] for t in tables for e in t)


def test_simple_input_is_rejected():
    with pytest.raises(SimpleDiagram, match="simple diagram: no associated branched surface"):
        certify("5,0,0,1")


def test_invalid_input_is_rejected():
    with pytest.raises(InvalidTuple):
        certify("5,3,0,0")
    with pytest.raises(InvalidTuple):
        certify("4,1,0,2")


def test_certificates_are_deterministic_and_canonical():
    a, b = certify("13,4,2,5"), certify("13,4,2,5")
    assert a.to_json() == b.to_json()
    assert canonical_json(json.loads(a.to_json())) == a.to_json()
    assert all(len(h) == 64 for h in a.data["state_hashes"])


def test_state_hash_ignores_key_order():
    assert state_hash({"a": 1, "b": [2]}) == state_hash({"b": [2], "a": 1})


def test_notes_mark_unchecked_topology():
    notes = certify("7,3,0,1").data["notes"]
    assert len(notes) == 2 and all("not machine-verified" in n for n in notes)
