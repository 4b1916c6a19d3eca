from math import gcd

import pytest
from hypothesis import given, settings

from helpers import coprime_pairs
from sinkfree.errors import AnchorViolation, DegenerateStrand, NotCoprime
from sinkfree.strand import (Strand, descent, descent_pushes, endpoints_from_parity, format_chain, ic_count,
                             strand_regions, strand_sink_tube_push, strand_word, tau, tau_for, word_slope)


def test_parity_rule():
    assert endpoints_from_parity(1, 4) == frozenset("cd")
    assert endpoints_from_parity(3, 5) == frozenset("bd")
    assert endpoints_from_parity(2, 7) == frozenset("bc")
    with pytest.raises(NotCoprime):
        endpoints_from_parity(4, 6)


def test_endpoints_must_match_parity():
    with pytest.raises(ValueError):
        Strand(1, 4, frozenset("bd"))


def test_descent_of_5_18():
    assert format_chain(descent(Strand(5, 18))) == "5/18 -> 3/11 -> 2/7 -> 1/4"


def test_anchor_forbids_q_below_two():
    with pytest.raises(AnchorViolation):
        Strand(3, 1, anchor_present=True)


def test_anchored_descent_ending_at_q_one_raises():
    with pytest.raises(AnchorViolation):
        descent(Strand(3, 2, anchor_present=True))


def test_push_needs_p_and_q_at_least_two():
    with pytest.raises(DegenerateStrand):
        strand_sink_tube_push(Strand(1, 4))


def test_parse():
    assert Strand.parse("3/11") == Strand(3, 11)
    with pytest.raises(ValueError):
        Strand.parse("3-11")


@settings(max_examples=80, deadline=None)
@given(coprime_pairs(1, 60))
def test_word_slope_recovers_p_and_q(pq):
    p, q = pq
    s = Strand(p, q)
    w = strand_word(s)
    assert word_slope(w) == (p, q)
    assert {w.start, w.end} == set(s.endpoints)
    assert ic_count(s, "bc") == p and ic_count(s, "ab") == q


@settings(max_examples=80, deadline=None)
@given(coprime_pairs(2, 60))
def test_push_shrinks_and_stays_coprime(pq):
    s = Strand(*pq)
    for st in descent_pushes(s):
        a, b = st.before, st.after
        assert b.p + b.q < a.p + a.q and gcd(b.p, b.q) == 1
        assert st.d_pq > 0


@settings(max_examples=60, deadline=None)
@given(coprime_pairs(2, 40))
def test_anchored_descent_with_p_below_q_ends_at_p_one(pq):
    p, q = sorted(pq)
    if p == q:
        return
    chain = descent(Strand(p, q, anchor_present=True))
    assert chain[-1].p == 1


@settings(max_examples=60, deadline=None)
@given(coprime_pairs(2, 40))
def test_regions_exist(pq):
    assert strand_regions(Strand(*pq)) is not None


def test_half_turns_swap_endpoints():
    w = strand_word(Strand(3, 5))
    name = tau_for({w.start, w.end})
    v = tau(w, name)
    assert {v.start, v.end} == {w.start, w.end}
    assert tau(v, name) == w
