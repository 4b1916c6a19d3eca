"""Exact geometric model of a strand, used as the oracle for the push.

The sphere is the plane modulo half-turns about integer points; the lattice
point (x, y) is corner ``c, b, a, d`` by the parities of x and y.  A strand
of slope p/q is a straight segment between two lattice points.  All
arithmetic is on Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .errors import DegenerateStrand, InternalContradiction
from .strand import PUSH_REASONS, Strand, StrandPush, corner_of

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class FrameModel:
    """The strand laid out in the plane.

    ``points`` are the endpoints and every frame crossing, in order;
    ``squares`` gives, per segment, the square it lies in and its two ends
    moved into that square (front is [0,1]^2, back is [1,2]x[0,1]).
    """

    strand: Strand
    start: tuple[int, int]
    vector: tuple[int, int]
    times: tuple[Fraction, ...]
    edges: tuple[str, ...]
    points: tuple[Point, ...]
    squares: tuple[tuple[int, Point, Point], ...]

    @property
    def end(self) -> tuple[int, int]:
        return (self.start[0] + self.vector[0], self.start[1] + self.vector[1])


def _fold(pt: Point, k: int, l: int) -> Point:
    """Move a point of the unit square (k, l) into the front or back square."""
    x, y = pt
    if k % 2 == 0 and l % 2 == 0:
        return (x - k, y - l)
    if k % 2 and l % 2:
        return (k + 1 - x, l + 1 - y)
    if k % 2:
        return (x - k + 1, y - l)
    return (k + 2 - x, l + 1 - y)


def frame_model(s: Strand, mirror: bool = False) -> FrameModel:
    """Straight strand from its parity start point; ``mirror`` uses slope -p/q."""
    p, q = s.p, s.q
    if p < 1 or q < 1:
        raise DegenerateStrand(f"{s} lies along the frame")
    x0 = 1 if (p % 2 and q % 2) else 0
    v = (q, -p if mirror else p)
    hits = []
    for k in range(1, q):
        hits.append((Fraction(k, q), "ab" if (x0 + k) % 2 else "cd"))
    for j in range(1, p):
        y = -j if mirror else j
        hits.append((Fraction(j, p), "da" if y % 2 else "bc"))
    hits.sort()
    times = (Fraction(0),) + tuple(t for t, _ in hits) + (Fraction(1),)
    pts = tuple((x0 + t * v[0], t * v[1]) for t in times)
    sq = []
    for a, b in zip(pts, pts[1:]):
        k, l = floor((a[0] + b[0]) / 2), floor((a[1] + b[1]) / 2)
        sq.append(((k + l) % 2, _fold(a, k, l), _fold(b, k, l)))
    return FrameModel(s, (x0, 0), v, times, tuple(e for _, e in hits), pts, tuple(sq))


def model_ic(m: FrameModel, edge: str) -> int:
    """Weighted intersections of the segment with the lines of one edge class."""
    return _segment_ic(m.start, m.end, edge)


def _segment_ic(a: tuple[int, int], b: tuple[int, int], edge: str) -> int:
    axis, parity = {"ab": (0, 1), "cd": (0, 0), "bc": (1, 0), "da": (1, 1)}[edge]
    lo, hi = sorted((a[axis], b[axis]))
    inner = sum(1 for k in range(lo + 1, hi) if k % 2 == parity)
    ends = (a[axis] % 2 == parity) + (b[axis] % 2 == parity)
    if lo == hi:
        raise DegenerateStrand("segment runs along a frame line")
    return 2 * inner + ends


def _near_point(m: FrameModel, corner: str) -> tuple[tuple[int, int], Fraction]:
    """The lattice point of class ``corner`` one step from the strand whose
    corner the strand cuts, with the time the strand passes it."""
    (x0, y0), (vx, vy) = m.start, m.vector
    c0 = vx * y0 - vy * x0
    found = []
    for mx in range(min(x0, x0 + vx), max(x0, x0 + vx) + 1):
        for side in (1, -1):
            num = c0 + side + vy * mx
            if num % vx:
                continue
            ny = num // vx
            if corner_of(mx, ny) != corner:
                continue
            tx = Fraction(mx - x0, vx)
            ty = Fraction(ny - y0, vy)
            if 0 < tx < 1 and 0 < ty < 1:
                found.append(((mx, ny), (tx + ty) / 2))
    if len(found) != 1:
        raise InternalContradiction(f"{len(found)} lattice points of class {corner} next to {m.strand}")
    return found[0]


def billiard_oracle(s: Strand, mirror: bool = False) -> StrandPush:
    """The push done on the straight strand.

    Q and R are the points where the strand turns around the free corner
    and around ``a``.  P is the endpoint on Q's side.  Collapsing the loop
    at Q turns the strand into the straight segment from S to the lattice
    point it turned around.
    """
    if s.p < 2 or s.q < 2:
        raise DegenerateStrand(f"{s}: push needs p, q >= 2")
    m = frame_model(s, mirror)
    x1 = m.end
    ends = {corner_of(*m.start), corner_of(*x1)}
    free = ({"b", "c", "d"} - ends).pop()
    yq, tq = _near_point(m, free)
    _, tr = _near_point(m, "a")
    inner = m.times[1:-1]
    before = lambda t: sum(1 for u in inner if u < t)   # noqa: E731
    half = Fraction(1, 2)
    if tq < tr:
        p_pt, s_pt = m.start, x1
        d_pq, d_rs = before(tq) + half, (len(inner) - before(tr)) + half
    else:
        p_pt, s_pt = x1, m.start
        d_pq, d_rs = (len(inner) - before(tq)) + half, before(tr) + half
    if d_pq != d_rs:
        raise InternalContradiction(f"d(P,Q)={d_pq} but d(R,S)={d_rs} for {s}")
    d_qr = Fraction(abs(before(tq) - before(tr)))
    p2 = _segment_ic(s_pt, yq, "bc")
    q2 = _segment_ic(s_pt, yq, "ab")
    if (p2, q2) != (abs(yq[1] - s_pt[1]), abs(yq[0] - s_pt[0])):
        raise InternalContradiction("intersection count disagrees with displacement")
    if gcd(p2, q2) != 1:
        raise InternalContradiction(f"oracle push of {s} is not primitive: {p2}/{q2}")
    after = Strand(p2, q2, frozenset((free, corner_of(*s_pt))), s.anchor_present, s.tails + 1)
    return StrandPush(s, after, True, free, corner_of(*p_pt), corner_of(*s_pt), d_pq, d_qr, PUSH_REASONS)
