from hypothesis import given, settings

from helpers import coprime_pairs
from sinkfree.billiard import billiard_oracle, frame_model, model_ic
from sinkfree.strand import Strand, ic_count, strand_sink_tube_push


@settings(max_examples=80, deadline=None)
@given(coprime_pairs(1, 50))
def test_frame_crossings(pq):
    p, q = pq
    m = frame_model(Strand(p, q))
    assert len(m.edges) == (p - 1) + (q - 1)
    for e in ("ab", "bc", "cd", "da"):
        assert model_ic(m, e) == ic_count(Strand(p, q), e)


@settings(max_examples=80, deadline=None)
@given(coprime_pairs(2, 50))
def test_oracle_matches_word_push(pq):
    s = Strand(*pq)
    assert billiard_oracle(s).to_dict() == strand_sink_tube_push(s).to_dict()


@settings(max_examples=60, deadline=None)
@given(coprime_pairs(2, 50))
def test_mirror_gives_the_same_push(pq):
    s = Strand(*pq)
    assert billiard_oracle(s, mirror=True).after == billiard_oracle(s).after
