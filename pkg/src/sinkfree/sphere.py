"""The cut-open torus of one hierarchy level and its collapse to a sphere.

The host diagram is (alpha, beta) where beta is the curve the hierarchy
replaces; delta is its carrying curve.  Cutting the torus along delta
leaves two boundary circles (the cusp side and the horizontal-boundary
side), and the sink bigon holds a puncture circle.  The (alpha, delta)
source bigon cuts alpha down to a segment; the beta arcs with both ends on
that segment are its chords.  The beta-sink tube push happens on this
surface, after which collapsing the three circles and the midpoint of the
source bigon's alpha arc gives a sphere with basepoints a, b, c, d, and the
remaining beta arc becomes a rational tangle strand.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd

from .diagram import ALPHA, BETA, ArcClass, TorusDiagram
from .errors import InternalContradiction, PushUndefined, TriviallySafe
from .reduction import CarryingCurve, carrying_curve, swap_curves
from .shadow import (BranchShadow, DoublePoint, PushMove, SafetyEntry, SinkTube, push_arc,
                     rainbow_turns, safety_table, sink_disk_scan_all, sink_tube, tube_push_move)
from .strand import Strand, StrandWord, edge_orders, strand_word

# collapse targets of the three circles and the source-bigon alpha arc
CIRCLE_TARGETS = {"source_alpha_midpoint": "a", "delta_cusp": "b", "delta_boundary": "c",
                  "sink_puncture": "d"}


def delta_model(host: TorusDiagram, c: CarryingCurve) -> tuple[tuple[int, ...], TorusDiagram]:
    """The (alpha, delta) diagram drawn in the host's alpha coordinates.

    Vertex k of the result is delta's crossing on alpha edge ``par[k]``
    (``par`` sorted), so alpha keeps its direction and position.  The
    orientation of delta is the one giving a sink and a source bigon.
    """
    if c.replaced_role != BETA:
        raise ValueError("delta_model expects the carrying curve of beta")
    par = tuple(sorted(host.edge(x) for _, x in c.cycle))
    lab = {e: k for k, e in enumerate(par)}
    m = len(par)
    order = [lab[host.edge(x)] for _, x in c.cycle]
    sgn = [0] * m
    for _, x in c.cycle:
        sgn[lab[host.edge(x)]] = -1 if host.forward(x) else 1

    def moved(face: int) -> int:
        y = [x for x in host.faces[face] if host.is_alpha(x)][0]
        below = [k for k in range(m) if par[k] < host.edge(y)]
        return 2 * (below[-1] if below else m - 1) + (y % 2)

    z, w = moved(host.z_face), moved(host.w_face)
    found = []
    for flip in (False, True):
        beta = order[::-1] if flip else order
        signs = [-v for v in sgn] if flip else sgn
        nd = TorusDiagram(tuple(beta), tuple(signs), z, w)
        if nd.sink_bigon() is not None and nd.source_bigon() is not None:
            found.append(nd)
    if len(found) != 1:
        raise InternalContradiction(f"{len(found)} orientations of delta give a sink and a source bigon")
    return par, found[0]


@dataclass(frozen=True)
class SigmaPlusModel:
    """One hierarchy level cut open along delta.

    ``segment`` lists host vertices on the alpha segment of the (alpha,
    delta) source bigon.  ``chords`` are the beta edges with both ends on
    the segment, innermost first; the innermost is the source bigon's arc.
    """

    level: TorusDiagram
    replaced_role: str
    host: TorusDiagram
    carrying: CarryingCurve
    crossed: tuple[int, ...]
    delta: TorusDiagram
    segment_edge: int
    segment: tuple[int, ...]
    chords: tuple[int, ...]
    source_arc: int
    sink_arc: int
    shadow: BranchShadow

    @property
    def swapped(self) -> bool:
        return self.replaced_role == ALPHA

    @property
    def delta_faces(self) -> frozenset:
        return frozenset(self.carrying.faces)

    @property
    def pinch_points(self) -> tuple[DoublePoint, DoublePoint]:
        """M and N: where delta meets the ends of the segment.  Their sink
        corners are faces cut by delta."""
        h, m = self.host, len(self.crossed)
        k = self.segment_edge
        ends = (self.crossed[k], self.crossed[(k + 1) % m])
        return tuple(DoublePoint(lab, None, h.face_of[2 * e]) for lab, e in zip(("M", "N"), ends))

    def to_dict(self) -> dict:
        return {
            "replaced_role": self.replaced_role,
            "swapped": self.swapped,
            "host": self.host.to_dict(),
            "delta_crossed_alpha_edges": list(self.crossed),
            "delta": self.delta.to_dict(),
            "segment_edge": self.segment_edge,
            "segment": list(self.segment),
            "chords": list(self.chords),
            "source_arc": self.source_arc,
            "sink_arc": self.sink_arc,
            "delta_faces": sorted(self.delta_faces),
        }


def _beta_arc(d: TorusDiagram, face: int) -> int:
    return [x >> 1 for x in d.faces[face] if d.role(x) == BETA][0]


def sigma_plus_model(level: TorusDiagram, replaced_role: str) -> SigmaPlusModel:
    host = level if replaced_role == BETA else swap_curves(level)
    c = carrying_curve(host, BETA)
    par, nd = delta_model(host, c)
    n, m = host.n, len(par)
    src_face = nd.source_bigon()
    k = nd.edge([x for x in nd.faces[src_face] if nd.is_alpha(x)][0])
    seg, v = [], (par[k] + 1) % n
    while True:
        seg.append(v)
        if v == par[(k + 1) % m]:
            break
        v = (v + 1) % n
    pos = {v: i for i, v in enumerate(seg)}
    chords = [n + j for j in range(n) if host.beta[j] in pos and host.beta[(j + 1) % n] in pos]

    def span(e):
        return sorted((pos[host.tail(2 * e)], pos[host.head(2 * e)]))

    chords.sort(key=lambda e: span(e)[1] - span(e)[0])
    sink, source = host.sink_bigon(), host.source_bigon()
    src_arc, sink_arc = _beta_arc(host, source), _beta_arc(host, sink)
    _check_model(host, c, seg, chords, span, src_arc, sink)
    frozen = frozenset(x >> 1 for x in host.faces[source])
    prov = (("sink_bigon", "puncture_circle"), ("source_bigon", "removed_disk"),
            ("delta_faces", "cut_by_delta"))
    sh = BranchShadow(host, frozenset([source]), frozenset([sink]) | frozenset(c.faces), frozen,
                      provenance=prov)
    return SigmaPlusModel(level, replaced_role, host, c, par, nd, k, tuple(seg), tuple(chords),
                          src_arc, sink_arc, sh)


def _check_model(host, c, seg, chords, span, src_arc, sink) -> None:
    if not chords or chords[0] != src_arc:
        raise InternalContradiction("the source bigon arc is not the innermost chord")
    for a, b in zip(chords, chords[1:]):
        (a0, a1), (b0, b1) = span(a), span(b)
        if not b0 < a0 < a1 < b1:
            raise InternalContradiction(f"chords {a} and {b} are not nested")
    if any(host.dart_class(2 * e) != ArcClass.SOURCE for e in chords):
        raise InternalContradiction("a chord of the delta source bigon is not a source arc")
    turns = rainbow_turns(host, chords)
    if any(turns[a] == turns[b] for a, b in zip(chords, chords[1:])):
        raise InternalContradiction("chords do not alternate")
    if set(host.vertices_of_face(sink)) <= set(seg):
        raise InternalContradiction("the sink bigon lies inside the delta source bigon")
    if set(sink_tube(host, BETA).sectors) & set(c.faces):
        raise InternalContradiction("delta runs through the sink tube")


# -- the push on the cut-open torus

@dataclass(frozen=True)
class SigmaPlusPush:
    """The beta-sink tube push on the cut-open torus and what beta becomes.

    ``beta_s`` is the loop around the sink puncture, ``beta_c`` the arc
    joining the loops (listed from the sink end) and ``beta_delta`` the loop
    parallel to delta.  ``delta_end`` is the corner beta_delta collapses to.
    """

    model: SigmaPlusModel
    after: BranchShadow
    move: PushMove
    beta_s: tuple[int, ...]
    beta_c: tuple[int, ...]
    beta_delta: tuple[int, ...]
    delta_end: str
    points: tuple[DoublePoint, ...]
    table: tuple[SafetyEntry, ...]
    delta_pattern: tuple[tuple[int, int], ...]

    @property
    def all_safe(self) -> bool:
        return all(e.safe for e in self.table)

    def to_dict(self) -> dict:
        return {
            "move": self.move.to_dict(),
            "beta_s": list(self.beta_s),
            "beta_c": list(self.beta_c),
            "beta_delta": list(self.beta_delta),
            "delta_end": self.delta_end,
            "delta_pattern": [list(x) for x in self.delta_pattern],
            "safety": [e.to_dict() for e in self.table],
        }


def sigma_plus_push(m: SigmaPlusModel) -> SigmaPlusPush:
    """Push the long arc of the beta-sink tube that avoids the source arc.

    With a single chord there is nothing besides M and N to check and
    :class:`TriviallySafe` is raised.
    """
    if len(m.chords) == 1:
        raise TriviallySafe("one chord in the delta source bigon: only M and N remain")
    h, n = m.host, m.host.n
    tube = sink_tube(h, BETA)
    if set(tube.sectors) & m.delta_faces:
        raise InternalContradiction("the tube push would cross delta")
    side_u, side_v = tube.long_arcs
    if m.source_arc in side_u:
        side_u, side_v = side_v, side_u
    elif m.source_arc not in side_v:
        raise PushUndefined("neither long arc of the sink tube holds the source bigon arc")
    move = replace(tube_push_move(m.shadow, BETA), labels=("X_s", "X_delta"))
    if move.pushed_arc != side_u:
        raise InternalContradiction("tube move does not push the arc away from the source arc")
    base = BranchShadow(h, m.shadow.removed_faces, m.shadow.punctured_faces, m.shadow.frozen_edges,
                        extra_points=m.pinch_points, provenance=m.shadow.provenance)
    after = push_arc(base, move)
    order = [n + (m.sink_arc - n + i) % n for i in range(n)]
    taken = set(side_u) | set(side_v) | {m.sink_arc}
    rest = tuple(e for e in order if e not in taken)
    pattern = _alpha_pattern_of_path(h, rest)
    if not _cyclic_match(pattern, delta_pattern(m)):
        raise InternalContradiction("beta_delta meets alpha differently from delta")
    table = tuple(safety_table(after))
    return SigmaPlusPush(m, after, move, (m.sink_arc,), tuple(side_v), rest,
                         "b" if len(m.chords) % 2 else "c", after.extra_points[2:], table, pattern)


def _alpha_interval(h: TorusDiagram, pos2: int) -> int:
    """Which of the two alpha intervals between the basepoints holds the
    point at doubled alpha coordinate ``pos2`` (vertex v sits at 2v)."""
    ez = [x >> 1 for x in h.faces[h.z_face] if h.is_alpha(x)][0]
    ew = [x >> 1 for x in h.faces[h.w_face] if h.is_alpha(x)][0]
    a, b, size = 2 * ez + 1, 2 * ew + 1, 2 * h.n
    return 0 if 0 < (pos2 - a) % size < (b - a) % size else 1


def _alpha_pattern_of_path(h: TorusDiagram, path: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    n = h.n
    verts = [h.beta[e - n] for e in path[1:]]
    return tuple((_alpha_interval(h, 2 * v), h.sign[v]) for v in verts)


def delta_pattern(m: SigmaPlusModel) -> tuple[tuple[int, int], ...]:
    """Delta's crossings with alpha along delta: (interval, sign)."""
    h = m.host
    return tuple((_alpha_interval(h, 2 * h.edge(x) + 1), -1 if h.forward(x) else 1)
                 for _, x in m.carrying.cycle)


def _cyclic_match(a, b) -> bool:
    """Equal as unoriented cycles; reversing a curve flips every sign."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        return False
    flips = (a, a[::-1], tuple((g, -s) for g, s in a), tuple((g, -s) for g, s in a[::-1]))
    return any(f == b[i:] + b[:i] for f in flips for i in range(len(b)))


# -- collapse to the sphere

def ab_crossing_ranks(p: int, q: int) -> tuple[int, ...]:
    """Walking the straight strand p/q from d, the rank of each crossing
    with ab counted from a."""
    w = strand_word(Strand(p, q))
    if w.start != "d":
        w = w.reversed()
    rank = {k: i for i, k in enumerate(edge_orders(w)["ab"])}
    return tuple(rank[k] for k, e in enumerate(w.edges) if e == "ab")


def strand_from_order(order: tuple[int, ...], end: str) -> list[int]:
    """The p (odd, at most q) whose strand crosses ab in ``order``; a twist
    about ab moves p only to -p + 2kq, which has the same order."""
    q = 2 * len(order) + (1 if end == "b" else 0)
    return [p for p in range(1, q + 1, 2) if gcd(p, q) == 1 and ab_crossing_ranks(p, q) == order]


@dataclass(frozen=True)
class Collapse:
    strand: Strand
    record: dict
    audit: dict
    disks_before: tuple[int, ...]
    disks_after: tuple[int, ...]
    shadow: BranchShadow = field(compare=False)

    @property
    def sound(self) -> bool:
        return all(self.audit.values()) and self.disks_before == self.disks_after


def delta_bigon_faces(m: SigmaPlusModel) -> frozenset:
    """Host faces inside the (alpha, delta) source bigon, including the
    faces delta cuts along its side."""
    h = m.host
    start = h.source_bigon()
    seen, stack = {start}, [start]
    while stack:
        f = stack.pop()
        if f in m.delta_faces:
            continue
        for y in h.faces[f]:
            if h.is_alpha(y):
                continue
            g = h.face_of[y ^ 1]
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return frozenset(seen)


def collapse_to_sphere(push: SigmaPlusPush) -> Collapse:
    m = push.model
    h = m.host
    nest = {e: i for i, e in enumerate(m.chords)}
    on_c = [e for e in push.beta_c if e in nest]
    ranks = sorted(nest[e] for e in on_c)
    order = tuple(ranks.index(nest[e]) for e in on_c)
    cands = strand_from_order(order, push.delta_end)
    if len(cands) != 1:
        raise InternalContradiction(f"{len(cands)} slopes cross ab in the order {order}")
    q = 2 * len(order) + (1 if push.delta_end == "b" else 0)
    strand = Strand(cands[0], q, frozenset(("d", push.delta_end)), anchor_present=True)
    w = strand_word(strand)
    if w.start != "d":
        w = w.reversed()
    ab = [k for k, e in enumerate(w.edges) if e == "ab"]
    pairs = [{"chord": e, "Q": h.tail(2 * e), "R": h.head(2 * e), "crossing": k}
             for e, k in zip(on_c, ab)]
    anchor = [p for p in pairs if p["chord"] == m.source_arc]
    record = {
        "circles": {"sink_puncture": "d", "delta_cusp": "b", "delta_boundary": "c"},
        "source_alpha_midpoint": "a",
        "bigon_to_arc": {"alpha_edge": m.segment_edge, "segment": list(m.segment), "arc": "ab"},
        "loops": {"beta_s": "d", "beta_delta": push.delta_end},
        "pairs": pairs,
        "anchor": dict(anchor[0]) if anchor else None,
        "word": str(w),
    }
    targets = [record["source_alpha_midpoint"], *record["circles"].values()]
    audit = {
        "basepoints_bijective": sorted(targets) == ["a", "b", "c", "d"],
        "loops_on_circles": set(record["loops"].values()) <= {"b", "c", "d"},
        "pairs_cover_crossings": len(pairs) == len(ab) == len(on_c),
        "anchor_nearest_a": bool(anchor) and order.index(0) == on_c.index(m.source_arc),
        "endpoints_match_parity": strand.endpoints == frozenset(("d", push.delta_end)),
    }
    collapsed = delta_bigon_faces(m) | m.delta_faces | push.after.punctured_faces | push.after.removed_faces
    prov = push.after.provenance + tuple((k, v) for k, v in sorted(CIRCLE_TARGETS.items())) + (
        ("delta_source_bigon", "ab"),)
    sphere = BranchShadow(h, push.after.removed_faces, push.after.punctured_faces | collapsed,
                          push.after.frozen_edges, push.after.pushed_edges, push.after.extra_points,
                          prov, push.after.moves)
    before = tuple(sink_disk_scan_all(push.after))
    after = tuple(sink_disk_scan_all(sphere))
    return Collapse(strand, record, audit, before, after, sphere)
