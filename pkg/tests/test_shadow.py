import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from helpers import diagrams
from sinkfree.diagram import ALPHA, BETA, DiagramTuple, build_from_tuple, is_primitive, primitive_twists
from sinkfree.errors import FrozenArc, IllegalCrossing, PushUndefined
from sinkfree.safety import SafetyReason
from sinkfree.shadow import (BranchShadow, PushMove, primitive_push, push_arc, safety_table, shadow_from_diagram,
                             sink_disk_scan, sink_disk_scan_all, sink_sectors, sink_tube, source_tube)


def five_two():
    return build_from_tuple(DiagramTuple(7, 3, 0, 1))


def test_five_two_has_a_sink_disk_before_the_push():
    sh = shadow_from_diagram(five_two())
    assert sink_disk_scan_all(sh)


def test_five_two_push_removes_every_sink_disk():
    run = primitive_push(five_two())
    assert run.pushed and run.disks_before
    assert sink_disk_scan(run.after) == [] and sink_disk_scan_all(run.after) == []
    assert run.all_safe
    assert {e.reason for e in run.table} <= set(SafetyReason)


def test_primitive_push_rejects_non_primitive_input():
    with pytest.raises(PushUndefined):
        primitive_push(build_from_tuple(DiagramTuple(23, 11, 1, 7)))


def test_unpushed_shadow_is_a_torus():
    sh = shadow_from_diagram(five_two())
    assert sh.euler_characteristic() == 0


def test_frozen_edges_cannot_be_pushed():
    d = five_two()
    src = d.source_bigon()
    edge = d.faces[src][0] >> 1
    sh = BranchShadow(d, frozenset({src}), frozenset(), frozenset({edge}))
    with pytest.raises(FrozenArc):
        push_arc(sh, PushMove((edge,), (), (src, src)))


def test_pushing_across_a_puncture_is_illegal():
    d = five_two()
    sink = d.sink_bigon()
    edge = d.faces[sink][0] >> 1
    sh = BranchShadow(d, frozenset(), frozenset({sink}), frozenset())
    with pytest.raises(IllegalCrossing):
        push_arc(sh, PushMove((edge,), (), (sink, sink)))


@settings(max_examples=60, deadline=None)
@given(diagrams(max_p=20))
def test_tubes_hold_every_sector_of_their_kind(d):
    for role in (ALPHA, BETA):
        tube = sink_tube(d, role)
        assert set(sink_sectors(d, role)) <= set(tube.faces)
        assert tube.faces[0] == d.sink_bigon()
        assert len(tube.long_arcs[0]) == len(tube.long_arcs[1]) == len(tube.sectors)
        assert source_tube(d, role).faces[0] == d.source_bigon()


@st.composite
def primitive_diagrams(draw, max_p=24):
    p = draw(st.integers(3, max_p))
    q = draw(st.integers(1, (p - 1) // 2))
    r = draw(st.integers(0, p - 2 * q))
    tw = primitive_twists(p, q, r)
    assume(tw)
    s = tw[draw(st.sampled_from(sorted(tw)))]
    return build_from_tuple(DiagramTuple(p, q, r, s))


@settings(max_examples=60, deadline=None)
@given(primitive_diagrams())
def test_primitive_push_is_sink_disk_free(d):
    assert is_primitive(d)
    run = primitive_push(d)
    assert sink_disk_scan_all(run.after) == sink_disk_scan(run.after) == []
    assert all(e.safe for e in safety_table(run.after))
