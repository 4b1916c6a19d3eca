"""Strand descents, checked against the straight-line oracle and the lattice replay."""
import sys

from sinkfree.billiard import billiard_oracle
from sinkfree.strand import Strand, descent, format_chain, strand_sink_tube_push
from sinkfree.verify import verify_descent

text = sys.argv[1] if len(sys.argv) > 1 else "5/18"
s = Strand.parse(text, anchor_present=True)
chain = descent(s)
print(format_chain(chain))
for a in chain[:-1]:
    w, o = strand_sink_tube_push(a), billiard_oracle(a)
    print(f"  {a} -> {w.after}: P={w.p_corner} S={w.s_corner} d(P,Q)={w.d_pq} oracle agrees {w.to_dict() == o.to_dict()}")
print("lattice replay:", verify_descent([str(x) for x in chain]))
print("tampered chain:", verify_descent(["5/18", "3/11", "3/8", "1/4"]).divergence)
