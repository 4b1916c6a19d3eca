import ast
import copy
import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings

from helpers import diagrams
from sinkfree import verify as verify_mod
from sinkfree.certify import certify
from sinkfree.diagram import to_tuple
from sinkfree.verify import replay, verify_certificate, verify_descent


def loaded(t):
    return json.loads(certify(t).to_json())


def test_verifier_imports_only_the_diagram_core():
    tree = ast.parse(Path(verify_mod.__file__).read_text())
    local = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom) and n.level > 0}
    assert local == {"diagram"}
    absolute = {a.name.split(".")[0] for n in ast.walk(tree) if isinstance(n, ast.Import) for a in n.names}
    assert "sinkfree" not in absolute


@pytest.mark.parametrize("t", ["23,11,1,7", "7,3,0,1", "19,4,5,3", "13,4,2,5", "5,2,0,1"])
def test_round_trip(t):
    assert verify_certificate(certify(t))
    assert verify_certificate(certify(t).to_json())


@settings(max_examples=30, deadline=None)
@given(diagrams(max_p=16))
def test_round_trip_random(d):
    assert verify_certificate(certify(to_tuple(d)).to_json())


def test_replay_reproduces_the_certificate():
    c = loaded("23,11,1,7")
    assert replay(c) == c


def test_flipped_safety_reason_is_localized():
    c = loaded("23,11,1,7")
    c["levels"][0]["safety"][0]["reason"] = "rainbow_pair"
    res = verify_certificate(c)
    assert not res.ok and res.divergence.path.startswith("levels[0]")


def test_wrong_strand_is_localized():
    c = loaded("23,11,1,7")
    c["levels"][0]["collapse"]["strand"]["q"] = 5
    res = verify_certificate(c)
    assert not res.ok and res.divergence.path == "levels[0].collapse.strand.q"
    assert res.divergence.expected == 4 and res.divergence.found == 5


def test_wrong_summary_count_is_localized():
    c = loaded("7,3,0,1")
    c["summary"]["double_points_checked"] += 1
    res = verify_certificate(c)
    assert res.divergence.path == "summary.double_points_checked"


def test_swapped_hierarchy_diagram_is_rejected():
    c = loaded("23,11,1,7")
    other = loaded("7,3,0,1")["hierarchy"][0]["diagram"]
    c["hierarchy"][1]["diagram"] = other
    res = verify_certificate(c)
    assert not res.ok and res.divergence.path.startswith("hierarchy[1]")


@pytest.mark.parametrize("bad", ["not json", "[]", json.dumps({"schema": "other"}),
                                 json.dumps({"schema": "sinkfree.certificate/1", "input": "x,y"})])
def test_garbage_is_rejected(bad):
    assert not verify_certificate(bad)


def test_extra_and_missing_fields():
    c = loaded("7,3,0,1")
    c["extra"] = 1
    assert verify_certificate(c).divergence.path == "extra"
    c = loaded("7,3,0,1")
    del c["notes"]
    assert verify_certificate(c).divergence.path == "notes"


def test_descent_replay():
    assert verify_descent(["5/18", "3/11", "2/7", "1/4"])
    res = verify_descent(["5/18", "3/11", "3/8", "1/4"])
    assert not res.ok and res.divergence.path == "chain[2]"
    assert res.divergence.expected == "2/7" and res.divergence.found == "3/8"
    assert verify_descent(["5/18", "3/11", "2/7"]).divergence.note == "descent stops early"
    assert not verify_descent(["4/6"])


def test_random_mutations_are_caught():
    rng = random.Random(3)
    base = loaded("19,4,5,3")
    leaves = []

    def walk(o, path):
        if isinstance(o, dict):
            for k, v in o.items():
                walk(v, f"{path}.{k}" if path else k)
        elif isinstance(o, list):
            for i, v in enumerate(o):
                walk(v, f"{path}[{i}]")
        elif isinstance(o, int) and not isinstance(o, bool):
            leaves.append(path)
    walk(base, "")
    for path in rng.sample(leaves, 25):
        c = copy.deepcopy(base)
        exec(f"c{_index(path)} += 1", {"c": c})
        res = verify_certificate(c)
        assert not res.ok, path


def _index(path):
    import re
    return "".join(f"[{t[1:-1]}]" if t.startswith("[") else f"[{t!r}]"
                   for t in re.findall(r"[^.\[\]]+|\[\d+\]", path))
