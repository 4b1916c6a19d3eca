"""Hypothesis strategies shared by the test modules."""
from hypothesis import assume
from hypothesis import strategies as st

from sinkfree.diagram import DiagramTuple, build_from_tuple, is_simple, validate
from sinkfree.errors import DisconnectedBeta, InvalidTuple


@st.composite
def tuples(draw, max_p=20, min_p=3, nonsimple=True):
    p = draw(st.integers(min_p, max_p))
    q = draw(st.integers(1 if nonsimple else 0, (p - 1) // 2))
    r = draw(st.integers(0, p - 2 * q))
    s = draw(st.integers(0, p - 1))
    return DiagramTuple(p, q, r, s)


def diagram_of(t):
    """The valid diagram of ``t``; rejects the example otherwise."""
    try:
        d = build_from_tuple(t)
    except (DisconnectedBeta, InvalidTuple):
        assume(False)
    assume(validate(d).ok)
    return d


@st.composite
def diagrams(draw, max_p=20, nonsimple=True):
    d = diagram_of(draw(tuples(max_p=max_p, nonsimple=nonsimple)))
    if nonsimple:
        assume(not is_simple(d))
    return d


@st.composite
def coprime_pairs(draw, lo=1, hi=60):
    p = draw(st.integers(lo, hi))
    q = draw(st.integers(lo, hi))
    from math import gcd
    assume(gcd(p, q) == 1)
    return p, q
