import pytest
from hypothesis import assume, given, settings

from helpers import diagrams
from sinkfree.diagram import BETA, DiagramTuple, build_from_tuple, is_primitive
from sinkfree.errors import TriviallySafe
from sinkfree.reduction import reduction_step
from sinkfree.sphere import (ab_crossing_ranks, collapse_to_sphere, delta_bigon_faces, sigma_plus_model,
                             sigma_plus_push, strand_from_order)
from sinkfree.strand import endpoints_from_parity


def model_23():
    d = build_from_tuple(DiagramTuple(23, 11, 1, 7))
    return sigma_plus_model(d, BETA)


def test_model_of_23_11_1_7():
    m = model_23()
    assert not m.swapped
    assert m.chords[0] == m.source_arc
    assert m.sink_arc not in m.chords
    assert set(m.delta_faces).isdisjoint({m.host.sink_bigon()})


def test_push_and_collapse_of_23_11_1_7():
    push = sigma_plus_push(model_23())
    assert push.all_safe
    assert [p.ref for p in push.points] == ["X_s", "X_delta"]
    col = collapse_to_sphere(push)
    assert col.sound and all(col.audit.values())
    assert (col.strand.p, col.strand.q) == (1, 4)
    assert col.strand.endpoints == frozenset("cd")
    assert col.record["anchor"] == col.record["pairs"][0]


def test_delta_bigon_region_avoids_the_sink_bigon():
    m = model_23()
    assert m.host.sink_bigon() not in delta_bigon_faces(m)


def test_crossing_order_determines_p():
    for q in range(2, 30):
        for p in range(1, q + 1, 2):
            try:
                order = ab_crossing_ranks(p, q)
            except Exception:
                continue
            end = "b" if q % 2 else "c"
            assert p in strand_from_order(order, end)
            assert len(strand_from_order(order, end)) == 1


def test_single_chord_levels_are_trivially_safe():
    found = 0
    for p in range(5, 14):
        for q in range(1, (p - 1) // 2 + 1):
            for s in range(p):
                try:
                    d = build_from_tuple(DiagramTuple(p, q, 0, s))
                except Exception:
                    continue
                if is_primitive(d):
                    continue
                try:
                    st = reduction_step(d, BETA)
                    m = sigma_plus_model(d, st.replaced_role)
                except Exception:
                    continue
                if len(m.chords) == 1:
                    with pytest.raises(TriviallySafe):
                        sigma_plus_push(m)
                    found += 1
    assert found


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=18))
def test_every_level_collapses_soundly(d):
    assume(not is_primitive(d))
    role = reduction_step(d, BETA).replaced_role
    m = sigma_plus_model(d, role)
    try:
        push = sigma_plus_push(m)
    except TriviallySafe:
        return
    assert push.all_safe
    col = collapse_to_sphere(push)
    assert col.sound and all(col.audit.values())
    assert col.strand.endpoints == endpoints_from_parity(col.strand.p, col.strand.q)
    assert col.strand.anchor_present
