import pytest
from hypothesis import given, settings

from helpers import diagrams, tuples
from sinkfree.diagram import (BETA, ArcClass, DiagramTuple, FaceClass, TorusDiagram, build_from_tuple,
                              canonical_key, census, classify_arcs, involution_image, involution_map,
                              is_primitive, is_primitive_standard, is_simple, isomorphic, primitive_twist,
                              primitive_twists, reverse_orientations, to_tuple, transform, validate,
                              valid_tuples)
from sinkfree.errors import DisconnectedBeta, InvalidTuple, NoPrimitiveTwist


def test_parse_round_trip():
    t = DiagramTuple.parse(" 23, 11,1 ,7")
    assert t == DiagramTuple(23, 11, 1, 7) and str(t) == "23,11,1,7"


@pytest.mark.parametrize("text", ["x,y", "1,2,3", "1,2,3,4,5", "a,1,0,0", ""])
def test_parse_rejects_malformed_text(text):
    with pytest.raises(ValueError):
        DiagramTuple.parse(text)


@pytest.mark.parametrize("vals", [(5, 3, 0, 0), (0, 0, 0, 0), (5, 1, 4, 0), (4, 2, 0, 0), (5, -1, 0, 0)])
def test_bounds_raise_invalid_tuple(vals):
    with pytest.raises(InvalidTuple):
        DiagramTuple(*vals)


def test_twist_is_reduced_mod_p():
    assert DiagramTuple(7, 3, 0, 8).s == 1


def test_homologous_curves_are_rejected():
    with pytest.raises(InvalidTuple, match="S\\^1 x S\\^2"):
        build_from_tuple(DiagramTuple(4, 1, 0, 2))


def test_disconnected_beta_is_rejected():
    bad = [t for t in (DiagramTuple(p, 0, 0, s) for p in range(2, 7) for s in range(p))
           if t not in set(valid_tuples(6))]
    assert bad
    with pytest.raises((DisconnectedBeta, InvalidTuple)):
        build_from_tuple(bad[0])


def test_five_two_and_figure_eight_are_primitive():
    for text in ("7,3,0,1", "5,2,0,1"):
        d = build_from_tuple(DiagramTuple.parse(text))
        assert validate(d).ok and is_primitive(d)


def test_23_11_1_7_is_valid_and_not_primitive():
    d = build_from_tuple(DiagramTuple(23, 11, 1, 7))
    c = census(d)
    assert validate(d).ok and not is_primitive(d)
    assert c.bigons == 2 and c.other == 0


def test_simple_diagram_has_only_quadrilaterals():
    d = build_from_tuple(DiagramTuple(5, 0, 0, 1))
    assert is_simple(d) and validate(d).ok
    assert census(d).quadrilaterals == len(d.faces)


def test_validate_flags_basepoints_in_same_face():
    d = build_from_tuple(DiagramTuple(7, 3, 0, 1))
    bad = TorusDiagram(d.beta, d.sign, d.z, d.faces[d.z_face][1] if len(d.faces[d.z_face]) > 1 else d.z)
    assert not validate(bad).ok


@settings(max_examples=60, deadline=None)
@given(diagrams(max_p=18))
def test_faces_partition_darts_and_euler_vanishes(d):
    darts = sorted(x for f in d.faces for x in f)
    assert darts == list(range(4 * d.n))
    assert d.n - 2 * d.n + len(d.faces) == 0


@settings(max_examples=60, deadline=None)
@given(diagrams(max_p=18))
def test_nonsimple_census_and_bigon_classes(d):
    c = census(d)
    assert c.bigons == 2
    assert (c.hexagons, c.octagons) in ((2, 0), (0, 1))
    assert len(d.faces_of_class(FaceClass.SINK_BIGON)) == 1
    assert len(d.faces_of_class(FaceClass.SOURCE_BIGON)) == 1
    assert {d.basepoints_in(f) for f in d.bigons} == {1}


@settings(max_examples=60, deadline=None)
@given(diagrams(max_p=16))
def test_relabelling_preserves_isomorphism_class(d):
    for k in (1, d.n - 1):
        e = transform(d, k)
        assert isomorphic(d, e) and canonical_key(d) == canonical_key(e)


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=16))
def test_normal_form_round_trip(d):
    assert isomorphic(build_from_tuple(to_tuple(d)), d)


@settings(max_examples=60, deadline=None)
@given(diagrams(max_p=18))
def test_face_and_standard_primitivity_agree(d):
    assert is_primitive(d) == is_primitive_standard(to_tuple(d))


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=16))
def test_involution_swaps_sink_and_source(d):
    h = involution_map(d)
    assert h.face_image(d, d.sink_bigon()) == d.source_bigon()
    assert h.face_image(d, d.z_face) == d.w_face
    assert isomorphic(involution_image(d), d)


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=16))
def test_reversing_orientations_keeps_one_sink_and_one_source_bigon(d):
    e = reverse_orientations(d)
    assert census(e) == census(d)
    assert e.sink_bigon() is not None and e.source_bigon() is not None
    one = reverse_orientations(d, alpha=True, beta=False)
    assert one.sink_bigon() is None and one.source_bigon() is None


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=16))
def test_dict_round_trip(d):
    assert TorusDiagram.from_dict(d.to_dict()) == d


def test_arc_classes_of_a_primitive_diagram():
    d = build_from_tuple(DiagramTuple(7, 3, 0, 1))
    arcs = classify_arcs(d)
    assert arcs[BETA].count(ArcClass.SINK) >= 1 and arcs[BETA].count(ArcClass.SOURCE) >= 1


def test_primitive_twist_examples():
    assert primitive_twist(7, 3, 0) in primitive_twists(7, 3, 0).values()
    assert is_primitive(build_from_tuple(DiagramTuple(7, 3, 0, primitive_twist(7, 3, 0))))


def test_primitive_twist_missing_sign_raises():
    tw = primitive_twists(7, 3, 0)
    missing = {1, -1} - set(tw)
    if missing:
        with pytest.raises(NoPrimitiveTwist):
            primitive_twist(7, 3, 0, sign=missing.pop())
    assert primitive_twists(5, 3, 0) == {}
    with pytest.raises(NoPrimitiveTwist):
        primitive_twist(5, 3, 0)


@settings(max_examples=40, deadline=None)
@given(tuples(max_p=20))
def test_primitive_twists_are_primitive(t):
    for s in primitive_twists(t.p, t.q, t.r).values():
        d = build_from_tuple(DiagramTuple(t.p, t.q, t.r, s))
        assert validate(d).ok and is_primitive(d)
