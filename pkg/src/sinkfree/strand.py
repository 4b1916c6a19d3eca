"""Rational tangle strands on the 4-pointed sphere and their sink tube push.

The sphere is two unit squares (front and back) glued along their
boundary, which is the frame circle.  Its corners are the basepoints
a, b, c, d and the frame runs a -> b -> c -> d -> a.  A strand is stored
combinatorially as the list of frame edges it crosses (a ``StrandWord``).
Everything in this module works on words; the slope only enters when the
word of ``p/q`` is first written down.  ``billiard`` is the independent
geometric model.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .errors import AnchorViolation, DegenerateStrand, InternalContradiction, NotCoprime
from .safety import SafetyReason

CORNERS = ("a", "b", "c", "d")
EDGES = ("ab", "bc", "cd", "da")
FRONT, BACK = 0, 1
# the frame enters a corner along EPS_IN and leaves along EPS_OUT
EPS_IN = {"a": "da", "b": "ab", "c": "bc", "d": "cd"}
EPS_OUT = {"a": "ab", "b": "bc", "c": "cd", "d": "da"}
# boundary of either square as a cycle; increasing index runs against the frame
RING = ("c", "bc", "b", "ab", "a", "da", "d", "cd")
RING_POS = {x: i for i, x in enumerate(RING)}
_LATTICE = {(0, 0): "c", (1, 0): "b", (1, 1): "a", (0, 1): "d"}


def corner_of(x: int, y: int) -> str:
    return _LATTICE[(x % 2, y % 2)]


def endpoints_from_parity(p: int, q: int) -> frozenset:
    """Endpoints of the strand ``p/q``: odd/even {c,d}, odd/odd {b,d},
    even/odd {b,c}."""
    if gcd(p, q) != 1:
        raise NotCoprime(f"{p}/{q} is not in lowest terms")
    if p % 2 and q % 2 == 0:
        return frozenset("cd")
    if p % 2 and q % 2:
        return frozenset("bd")
    return frozenset("bc")


def _pair(e) -> frozenset:
    out = frozenset(e)
    if len(out) != 2 or not out <= set("bcd"):
        raise ValueError(f"endpoints must be two of b, c, d, got {sorted(out)}")
    return out


@dataclass(frozen=True)
class Strand:
    """The strand of slope ``p/q`` against the frame.

    ``anchor_present`` marks that the frame point next to ``a`` may not be
    moved, which forces ``q >= 2``.  ``tails`` counts the short tails left
    behind by earlier pushes.
    """

    p: int
    q: int
    endpoints: frozenset = None
    anchor_present: bool = False
    tails: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")
        ends = endpoints_from_parity(self.p, self.q)
        if self.endpoints is None:
            object.__setattr__(self, "endpoints", ends)
        elif _pair(self.endpoints) != ends:
            raise ValueError(f"endpoints {sorted(self.endpoints)} contradict the parity of {self.p}/{self.q}")
        else:
            object.__setattr__(self, "endpoints", ends)
        if self.anchor_present and self.q < 2:
            raise AnchorViolation(f"{self.p}/{self.q} cannot keep the anchor")

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    @classmethod
    def parse(cls, text: str, **kw) -> "Strand":
        try:
            p, q = (int(x) for x in text.strip().split("/"))
        except ValueError:
            raise ValueError(f"cannot parse strand {text!r}; expected p/q") from None
        return cls(p, q, **kw)

    @property
    def free_corner(self) -> str:
        """The corner other than ``a`` that the strand does not end at."""
        return (set("bcd") - self.endpoints).pop()

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "endpoints": sorted(self.endpoints),
                "anchor": self.anchor_present, "tails": self.tails}


# -- words

@dataclass(frozen=True)
class StrandWord:
    """A strand as the frame edges it crosses.

    Segment ``m`` runs between crossings ``m-1`` and ``m`` (or an endpoint);
    ``square`` is the square holding segment 0.  Every crossing switches
    squares.
    """

    start: str
    edges: tuple[str, ...]
    end: str
    square: int

    @property
    def n_segments(self) -> int:
        return len(self.edges) + 1

    def seg_square(self, m: int) -> int:
        return self.square ^ (m & 1)

    def sign(self, k: int) -> int:
        """+1 when the strand crosses the frame from right to left at
        crossing ``k``, which is when it leaves the front square."""
        return 1 if self.seg_square(k) == FRONT else -1

    def reversed(self) -> "StrandWord":
        return StrandWord(self.end, self.edges[::-1], self.start, self.seg_square(len(self.edges)))

    def __str__(self) -> str:
        return f"{self.start}[{' '.join(self.edges)}]{self.end}"


def strand_word(s: Strand) -> StrandWord:
    """Cutting sequence of the straight strand of slope ``p/q``."""
    p, q = s.p, s.q
    if p < 1 or q < 1:
        raise DegenerateStrand(f"{s} lies along the frame")
    x0 = 1 if (p % 2 and q % 2) else 0
    edges = []
    k, j = 1, 1
    # vertical line x0+k is crossed at time k/q, horizontal line j at j/p
    while k < q or j < p:
        if j >= p or (k < q and k * p < j * q):
            edges.append("ab" if (x0 + k) % 2 else "cd")
            k += 1
        else:
            edges.append("da" if j % 2 else "bc")
            j += 1
    return StrandWord(corner_of(x0, 0), tuple(edges), corner_of(x0 + q, p), x0 % 2)


def reduce_word(w: StrandWord) -> StrandWord:
    """Remove bigons with the frame and triangles at the endpoints."""
    start, end, sq = w.start, w.end, w.square
    edges = list(w.edges)
    changed = True
    while changed:
        changed = False
        if edges and start in edges[0]:
            edges.pop(0)
            sq ^= 1
            changed = True
            continue
        if edges and end in edges[-1]:
            edges.pop()
            changed = True
            continue
        for i in range(len(edges) - 1):
            if edges[i] == edges[i + 1]:
                del edges[i:i + 2]
                changed = True
                break
    return StrandWord(start, tuple(edges), end, sq)


def word_ic(w: StrandWord, edge: str) -> int:
    """Weighted intersection count with a frame edge: 2 per crossing and 1
    per endpoint on the edge."""
    return 2 * w.edges.count(edge) + (w.start in edge) + (w.end in edge)


def word_slope(w: StrandWord) -> tuple[int, int]:
    p, q = word_ic(w, "bc"), word_ic(w, "ab")
    if (p, q) != (word_ic(w, "da"), word_ic(w, "cd")):
        raise InternalContradiction(f"unbalanced word {w}")
    return p, q


def ic_count(s: Strand, edge: str) -> int:
    if edge not in EDGES:
        raise ValueError(f"unknown frame edge {edge!r}")
    if s.p == 0 or s.q == 0:
        # the strand runs along the frame; it only meets it at endpoints
        return sum(1 for c in s.endpoints if c in edge)
    return word_ic(strand_word(s), edge)


# -- positions along frame edges

def _ring_dir(edge: str) -> int:
    """+1 if the edge's first corner comes before it on RING."""
    return _RING_DIR[edge]


_RING_DIR = {e: 1 if RING[(RING_POS[e] - 1) % 8] == e[0] else -1 for e in EDGES}


def _exit(w: StrandWord, seg: int, d: int):
    k = seg if d > 0 else seg - 1
    if 0 <= k < len(w.edges):
        return ("x", k)
    return ("c", w.end if d > 0 else w.start)


def compare_crossings(w: StrandWord, i: int, j: int) -> int:
    """-1 if crossing ``i`` is nearer the first corner of its edge than
    crossing ``j``, +1 otherwise.  Both walk into a common square side by
    side until they part; chords in a square never cross, so the parting
    order fixes the entry order."""
    if i == j:
        return 0
    edge = w.edges[i]
    if w.edges[j] != edge:
        raise ValueError("crossings lie on different edges")
    sa, da = i + 1, 1
    sq = w.seg_square(sa)
    sb, db = (j + 1, 1) if w.seg_square(j + 1) == sq else (j, -1)
    factor = 1
    for _ in range(2 * len(w.edges) + 4):
        if w.seg_square(sa) != w.seg_square(sb) or sa == sb:
            raise InternalContradiction(f"walks from {i} and {j} separated in {w}")
        ea, eb = _exit(w, sa, da), _exit(w, sb, db)
        if ea[0] == "x" and eb[0] == "x" and w.edges[ea[1]] == w.edges[eb[1]]:
            e2 = w.edges[ea[1]]
            factor *= -_ring_dir(edge) * _ring_dir(e2)
            sa, sb, edge = sa + da, sb + db, e2
            continue
        base = RING_POS[edge] + 1
        ya = RING_POS[w.edges[ea[1]] if ea[0] == "x" else ea[1]]
        yb = RING_POS[w.edges[eb[1]] if eb[0] == "x" else eb[1]]
        a_first = (ya - base) % 8 > (yb - base) % 8   # a enters nearer the ring start of edge
        return factor * (-1 if a_first else 1) * _ring_dir(edge)
    raise InternalContradiction(f"walks from {i} and {j} never part in {w}")


def edge_orders(w: StrandWord) -> dict[str, list[int]]:
    """Crossings on each edge, ordered away from the edge's first corner."""
    out = {}
    for e in EDGES:
        idx = [k for k, x in enumerate(w.edges) if x == e]
        out[e] = sorted(idx, key=cmp_to_key(lambda i, j: compare_crossings(w, i, j)))
    return out


# -- regions of (sphere, strand, frame)

@dataclass(frozen=True)
class Region:
    square: int
    chords: tuple[tuple[int, int], ...]          # (segment, +1 if run forward)
    eps_sides: tuple[tuple[tuple, tuple, tuple[str, ...]], ...]   # (frame start, frame end, corners)
    kind: str
    eps_classes: tuple[str, ...]

    @property
    def corners(self) -> tuple[str, ...]:
        return tuple(c for _, _, cs in self.eps_sides for c in cs)

    @property
    def label(self) -> str:
        if self.kind in ("bigon", "triangle", "sector"):
            cls = set(self.eps_classes)
            tag = cls.pop() if len(cls) == 1 else "parallel"
            if tag not in ("sink", "source"):
                tag = "parallel"
            return f"{tag}_{self.kind}"
        return "other"


def _eps_class(w: StrandWord, a, b) -> str:
    """Class of a frame arc running from point ``a`` to point ``b``; points
    are ("x", k) crossings or ("c", corner) strand endpoints."""
    sa = w.sign(a[1]) if a[0] == "x" else None
    sb = w.sign(b[1]) if b[0] == "x" else None
    if sa is None and sb is None:
        return "parallel"
    if sa is None:
        return "sink" if sb == 1 else "source"
    if sb is None:
        return "sink" if sa == -1 else "source"
    if (sa, sb) == (-1, 1):
        return "sink"
    if (sa, sb) == (1, -1):
        return "source"
    return "parallel"


def word_regions(w: StrandWord) -> list[Region]:
    orders = edge_orders(w)
    rank = {}
    for e, lst in orders.items():
        for r, k in enumerate(lst):
            rank[k] = r + 1
    big = len(w.edges) + 2      # ring slot width; corners sit at multiples of it

    def ring_coord(pt) -> int:
        if pt[0] == "c":
            return RING_POS[pt[1]] * big
        e = w.edges[pt[1]]
        k = RING_POS[e]
        return (k - 1) * big + rank[pt[1]] if _ring_dir(e) > 0 else (k + 1) * big - rank[pt[1]]

    L = w.n_segments
    regions = []
    for sq in (FRONT, BACK):
        ends = []     # (coord, point, segment, direction leaving this end)
        for m in range(L):
            if w.seg_square(m) != sq:
                continue
            a = ("x", m - 1) if m > 0 else ("c", w.start)
            b = ("x", m) if m < L - 1 else ("c", w.end)
            ends.append((ring_coord(a), a, m, 1))
            ends.append((ring_coord(b), b, m, -1))
        ends.sort(key=lambda x: x[0])
        where = {(m, d): i for i, (_, _, m, d) in enumerate(ends)}
        used = set()
        n = len(ends)
        for k0 in range(n):
            if k0 in used:
                continue
            k = k0
            chords, sides = [], []
            while k not in used:
                used.add(k)
                k2 = (k + 1) % n
                lo, hi = ends[k][0], ends[k2][0]
                inside = tuple(RING[c // big] for c in range(0, 8 * big, 2 * big)
                               if (lo < c < hi) or (hi <= lo and (c > lo or c < hi)))
                # the frame runs down the ring, so this arc starts at k2
                sides.append((ends[k2][1], ends[k][1], inside))
                _, _, m, d = ends[k2]
                chords.append((m, d))
                k = where[(m, -d)]
            regions.append(_classify_region(w, sq, tuple(chords), tuple(sides)))
    return regions


def _classify_region(w: StrandWord, sq: int, chords, sides) -> Region:
    ends = {w.start, w.end}
    n_ch = len(chords)
    # chord ends are vertices; so is a strand endpoint the frame runs through
    verts = 2 * n_ch + sum(1 for _, _, cs in sides for c in cs if c in ends)
    corners = [c for _, _, cs in sides for c in cs]
    if n_ch == 1 and verts == 2 and len(corners) == 1:
        kind = "bigon"
    elif n_ch == 1 and verts == 3:
        kind = "triangle"
    elif n_ch == 2 and verts == 4:
        kind = "sector"
    else:
        kind = "other"
    classes = tuple(_eps_class(w, a, b) for a, b, _ in sides)
    return Region(sq, chords, sides, kind, classes)


@dataclass(frozen=True)
class RegionCensus:
    regions: tuple[Region, ...]
    counts: dict = field(hash=False, compare=False)

    def bigon_at(self, corner: str) -> Region:
        got = [r for r in self.regions if r.kind == "bigon" and r.corners == (corner,)]
        if len(got) != 1:
            raise InternalContradiction(f"{len(got)} bigons at {corner}")
        return got[0]

    def triangle_at(self, corner: str) -> Region:
        got = [r for r in self.regions if r.kind == "triangle" and corner in r.corners]
        if len(got) != 1:
            raise InternalContradiction(f"{len(got)} triangles at {corner}")
        return got[0]


def census_of_word(w: StrandWord) -> RegionCensus:
    regs = word_regions(w)
    return RegionCensus(tuple(regs), dict(Counter(r.label for r in regs)))


def strand_regions(s: Strand) -> RegionCensus:
    """Regions cut out by the strand and the frame."""
    if s.p < 2 or s.q < 2:
        raise DegenerateStrand(f"{s}: regions need p, q >= 2")
    return census_of_word(strand_word(s))


def swap_census(c: dict) -> dict:
    def sw(k):
        if k.startswith("sink_"):
            return "source_" + k[5:]
        if k.startswith("source_"):
            return "sink_" + k[7:]
        return k
    return {sw(k): v for k, v in c.items()}


# -- involutions

_TAU = {
    "tau1": ({"a": "d", "d": "a", "b": "c", "c": "b"}, {"ab": "cd", "cd": "ab"}, 1),
    "tau2": ({"a": "b", "b": "a", "c": "d", "d": "c"}, {"bc": "da", "da": "bc"}, 1),
    "tau3": ({"a": "c", "c": "a", "b": "d", "d": "b"}, {"ab": "cd", "cd": "ab", "bc": "da", "da": "bc"}, 0),
}


def tau(w: StrandWord, name: str) -> StrandWord:
    """Image under a half-turn of the sphere swapping basepoints in pairs."""
    cmap, emap, flip = _TAU[name]
    return StrandWord(cmap[w.start], tuple(emap.get(e, e) for e in w.edges), cmap[w.end], w.square ^ flip)


def tau_for(endpoints) -> str:
    """The half-turn exchanging the two endpoints."""
    e = frozenset(endpoints)
    for name, (cmap, _, _) in _TAU.items():
        x, y = sorted(e)
        if cmap[x] == y:
            return name
    raise ValueError(f"no involution swaps {sorted(e)}")


# -- the push

@dataclass(frozen=True)
class StrandPush:
    before: Strand
    after: Strand
    tail_added: bool
    loop_collapsed_at: str
    p_corner: str = ""
    s_corner: str = ""
    d_pq: Fraction = Fraction(0)
    d_qr: Fraction = Fraction(0)
    reasons: tuple = ()

    def to_dict(self) -> dict:
        return {
            "before": str(self.before), "after": str(self.after),
            "endpoints": sorted(self.after.endpoints),
            "loop_collapsed_at": self.loop_collapsed_at,
            "P": self.p_corner, "S": self.s_corner,
            "d_pq": str(self.d_pq), "d_qr": str(self.d_qr),
            "reasons": [[name, r.value] for name, r in self.reasons],
        }


PUSH_REASONS = (("X_q", SafetyReason.OUTWARD_PROVENANCE), ("X_p", SafetyReason.OUTWARD_PROVENANCE))


@dataclass(frozen=True)
class WordPush:
    before: StrandWord
    after: StrandWord
    q_segment: int
    r_segment: int
    p_corner: str
    s_corner: str
    loop_corner: str
    d_pq: Fraction
    d_qr: Fraction


def push_word(w: StrandWord) -> WordPush:
    """Push the long arc of the sink tube on PQ onto QS and collapse the loop.

    Q sits on the bigon at the free corner, R on the bigon at ``a``; P is
    the endpoint on Q's side.  The new strand runs from the free corner to S.
    """
    cen = census_of_word(w)
    free = ({"b", "c", "d"} - {w.start, w.end}).pop()
    jq = cen.bigon_at(free).chords[0][0]
    jr = cen.bigon_at("a").chords[0][0]
    last = w.n_segments - 1
    if jq < jr:
        p_c, s_c = w.start, w.end
        d_pq, d_rs = jq + Fraction(1, 2), (last - jr) + Fraction(1, 2)
        new = StrandWord(free, w.edges[jq:], w.end, w.seg_square(jq))
    else:
        p_c, s_c = w.end, w.start
        d_pq, d_rs = (last - jq) + Fraction(1, 2), jr + Fraction(1, 2)
        new = StrandWord(w.start, w.edges[:jq], free, w.square)
    if d_pq != d_rs:
        raise InternalContradiction(f"d(P,Q)={d_pq} but d(R,S)={d_rs} on {w}")
    # oriented so Q's bigon is the sink bigon, P must sit on the sink triangle
    q_kind = cen.bigon_at(free).label.split("_")[0]
    if cen.bigon_at("a").label.split("_")[0] == q_kind or cen.triangle_at(p_c).label.split("_")[0] != q_kind:
        raise InternalContradiction(f"sink and source labels of {w} do not match the push")
    return WordPush(w, reduce_word(new), jq, jr, p_c, s_c, free, d_pq, Fraction(abs(jq - jr)))


def strand_sink_tube_push(s: Strand) -> StrandPush:
    """One complete sink tube push (push, loop collapse, tail left at P)."""
    if s.p < 2 or s.q < 2:
        raise DegenerateStrand(f"{s}: push needs p, q >= 2")
    wp = push_word(strand_word(s))
    p2, q2 = word_slope(wp.after)
    ends = frozenset((wp.loop_corner, wp.s_corner))
    if gcd(p2, q2) != 1 or endpoints_from_parity(p2, q2) != ends:
        raise InternalContradiction(f"push of {s} gave {p2}/{q2} ending at {sorted(ends)}")
    after = Strand(p2, q2, ends, s.anchor_present, s.tails + 1)
    return StrandPush(s, after, True, wp.loop_corner, wp.p_corner, wp.s_corner,
                      wp.d_pq, wp.d_qr, PUSH_REASONS)


def descent(s: Strand, push=strand_sink_tube_push) -> list[Strand]:
    """Push until p or q drops below 2."""
    chain = [s]
    cur = s
    while cur.p >= 2 and cur.q >= 2:
        nxt = push(cur).after
        if nxt.p + nxt.q >= cur.p + cur.q or gcd(nxt.p, nxt.q) != 1:
            raise InternalContradiction(f"push {cur} -> {nxt} does not shrink")
        chain.append(nxt)
        cur = nxt
    if cur.anchor_present and cur.p != 1:
        raise AnchorViolation(f"anchored descent ended at {cur}")
    return chain


def descent_pushes(s: Strand) -> list[StrandPush]:
    out = []
    cur = s
    while cur.p >= 2 and cur.q >= 2:
        st = strand_sink_tube_push(cur)
        out.append(st)
        cur = st.after
    if cur.anchor_present and cur.p != 1:
        raise AnchorViolation(f"anchored descent ended at {cur}")
    return out


def format_chain(chain: list[Strand]) -> str:
    return " -> ".join(str(x) for x in chain)
