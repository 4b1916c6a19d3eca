from hypothesis import given, settings

from helpers import diagrams
from sinkfree.diagram import ALPHA, BETA, DiagramTuple, build_from_tuple, is_primitive, is_simple, validate
from sinkfree.errors import SimpleDiagram
from sinkfree.reduction import carrying_curve, reduction_hierarchy, reduction_step, replace_with_carrying, swap_curves
import pytest


def test_23_11_1_7_reduces_once_to_a_primitive_diagram():
    h = reduction_hierarchy(build_from_tuple(DiagramTuple(23, 11, 1, 7)), BETA)
    assert len(h.steps) == 1
    assert h.steps[0].replaced_role == BETA
    assert is_primitive(h.terminal) and h.terminal.n < 23


def test_primitive_input_has_empty_hierarchy():
    d = build_from_tuple(DiagramTuple(7, 3, 0, 1))
    h = reduction_hierarchy(d, BETA)
    assert h.steps == () and h.terminal == d


def test_simple_input_raises():
    with pytest.raises(SimpleDiagram, match="no associated branched surface"):
        reduction_hierarchy(build_from_tuple(DiagramTuple(5, 0, 0, 1)), BETA)


@settings(max_examples=50, deadline=None)
@given(diagrams(max_p=18))
def test_swap_is_an_involution(d):
    assert swap_curves(swap_curves(d)) == d


@settings(max_examples=50, deadline=None)
@given(diagrams(max_p=18))
def test_carrying_curve_crosses_each_parallel_arc_once(d):
    for role in (ALPHA, BETA):
        c = carrying_curve(d, role)
        assert len(set(c.crossed_edges)) == c.intersection_count
        assert c.intersection_count < d.n


@settings(max_examples=50, deadline=None)
@given(diagrams(max_p=20))
def test_hierarchy_laws(d):
    h = reduction_hierarchy(d, BETA)
    lv = h.levels
    assert all(b.n < a.n for a, b in zip(lv, lv[1:]))
    assert all(validate(x).ok and not is_simple(x) for x in lv)
    assert is_primitive(h.terminal)


@settings(max_examples=40, deadline=None)
@given(diagrams(max_p=20))
def test_step_prefers_beta_and_falls_back_to_alpha(d):
    if is_primitive(d):
        return
    st = reduction_step(d, BETA)
    if st.replaced_role == ALPHA:
        assert is_simple(replace_with_carrying(d, carrying_curve(d, BETA)))
    assert st.after.n == st.carrying.intersection_count
