"""The branched surface of a diagram, seen on the torus.

The torus carries the branch locus (alpha and beta minus the boundary of
the source bigon) with branch direction to the left of each oriented
curve.  A face sees an inward branch direction along one of its darts
exactly when the dart runs along its curve's orientation.  Pushing an arc
onto a disk takes its edges off the torus; the faces on both sides then
belong to one sector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

from .diagram import ALPHA, BETA, ArcClass, TorusDiagram, is_primitive, is_simple, other_role
from .errors import FrozenArc, IllegalCrossing, InternalContradiction, PushUndefined, SimpleDiagram
from .safety import SafetyReason

SHADOW_SCHEMA = "sinkfree.shadow/1"


@dataclass(frozen=True)
class DoublePoint:
    """A self-crossing of the branch locus and its sink corner (a sector id)."""

    ref: str
    vertex: int | None
    sink_corner: int

    def to_dict(self) -> dict:
        return {"ref": self.ref, "vertex": self.vertex, "sink_corner": self.sink_corner}


@dataclass(frozen=True)
class PushMove:
    """Take the edges of ``pushed_arc`` off the torus onto the disk behind
    ``target_arc``.  ``end_faces`` are the faces at the two ends of the arc;
    each receives a new double point whose sink corner is its sector.
    ``swept`` are the faces the arc slides across; when empty, every face
    next to the arc counts as swept."""

    pushed_arc: tuple[int, ...]
    target_arc: tuple[int, ...]
    end_faces: tuple[int, int]
    labels: tuple[str, str] = ("X1", "X2")
    swept: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"pushed": list(self.pushed_arc), "target": list(self.target_arc),
                "end_faces": list(self.end_faces), "labels": list(self.labels),
                "swept": list(self.swept)}


@dataclass(frozen=True)
class BranchShadow:
    base: TorusDiagram
    removed_faces: frozenset
    punctured_faces: frozenset
    frozen_edges: frozenset
    pushed_edges: frozenset = frozenset()
    extra_points: tuple[DoublePoint, ...] = ()
    provenance: tuple[tuple[str, str], ...] = ()
    moves: tuple[PushMove, ...] = ()

    # edges are numbered dart >> 1: alpha edges 0..n-1, beta edges n..2n-1

    def edge_id(self, dart: int) -> int:
        return dart >> 1

    def is_locus(self, dart: int) -> bool:
        e = dart >> 1
        return e not in self.frozen_edges and e not in self.pushed_edges

    @staticmethod
    def points_inward(dart: int) -> bool:
        """Branch direction along ``dart`` points into the face on its left."""
        return dart % 2 == 0

    # -- sectors

    @cached_property
    def sector_of(self) -> tuple[int, ...]:
        d = self.base
        parent = list(range(len(d.faces)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.pushed_edges:
            a, b = find(d.face_of[2 * e]), find(d.face_of[2 * e + 1])
            if a != b:
                parent[max(a, b)] = min(a, b)
        return tuple(find(f) for f in range(len(d.faces)))

    @cached_property
    def sectors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for f, s in enumerate(self.sector_of):
            out.setdefault(s, []).append(f)
        return {s: tuple(fs) for s, fs in out.items()}

    def sector_faces(self, s: int) -> tuple[int, ...]:
        return self.sectors[s]

    def sector_boundary(self, s: int) -> list[int]:
        """Darts on the boundary of a sector that are still on the torus."""
        faces = set(self.sectors[s])
        return [x for f in faces for x in self.base.faces[f] if (x >> 1) not in self.pushed_edges]

    def sector_euler(self, s: int) -> int:
        faces = set(self.sectors[s])
        inner = sum(1 for e in self.pushed_edges if self.base.face_of[2 * e] in faces)
        return len(faces) - inner

    def sector_is_disk(self, s: int) -> bool:
        return self.sector_euler(s) == 1 and not (set(self.sectors[s]) & self.punctured_faces)

    def euler_characteristic(self) -> int:
        d = self.base
        e = 2 * d.n - len(self.pushed_edges)
        return d.n - e + sum(self.sector_euler(s) for s in self.sectors)

    def touches_disk_sheet(self, s: int) -> bool:
        """The sector runs onto a compression disk across a removed arc."""
        return any((x >> 1) in self.frozen_edges for x in self.sector_boundary(s))

    def is_sink_disk(self, s: int) -> bool:
        if set(self.sectors[s]) & self.removed_faces:
            return False
        if not self.sector_is_disk(s) or self.touches_disk_sheet(s):
            return False
        return all(self.points_inward(x) for x in self.sector_boundary(s) if self.is_locus(x))

    @cached_property
    def rainbow_turns(self) -> dict[int, int]:
        return rainbow_turns(self.base)

    # -- double points

    def sink_corner_face(self, v: int) -> int:
        """Face at ``v`` between a forward outgoing dart and, next
        anticlockwise, a backward one; both locus arcs point into it."""
        rot = self.base.rotation(v)
        hits = [rot[i] for i in range(4) if rot[i] % 2 == 0 and rot[(i + 1) % 4] % 2 == 1]
        if len(hits) != 1:
            raise InternalContradiction(f"vertex {v} has {len(hits)} sink corners")
        return self.base.face_of[hits[0]]

    def is_double_point(self, v: int) -> bool:
        return all(self.is_locus(x) for x in self.base.rotation(v))

    @cached_property
    def double_points(self) -> tuple[DoublePoint, ...]:
        pts = [DoublePoint(f"v{v}", v, self.sector_of[self.sink_corner_face(v)])
               for v in range(self.base.n) if self.is_double_point(v)]
        pts.extend(DoublePoint(p.ref, p.vertex, self.sector_of[p.sink_corner]) for p in self.extra_points)
        return tuple(pts)

    # -- export

    def to_dict(self) -> dict:
        d = self.base
        secs = []
        for s, faces in sorted(self.sectors.items()):
            secs.append({
                "id": s,
                "faces": list(faces),
                "boundary": [[x, "in" if self.points_inward(x) else "out", self.is_locus(x)]
                             for x in self.sector_boundary(s)],
                "removed": bool(set(faces) & self.removed_faces),
                "punctured": bool(set(faces) & self.punctured_faces),
            })
        return {
            "schema": SHADOW_SCHEMA,
            "diagram": d.to_dict(),
            "frozen_edges": sorted(self.frozen_edges),
            "pushed_edges": sorted(self.pushed_edges),
            "sectors": secs,
            "double_points": [p.to_dict() for p in self.double_points],
            "provenance": [list(x) for x in self.provenance],
            "moves": [m.to_dict() for m in self.moves],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def shadow_from_diagram(d: TorusDiagram) -> BranchShadow:
    """Remove the source bigon, puncture the sink bigon."""
    if is_simple(d):
        raise SimpleDiagram()
    sink, source = d.sink_bigon(), d.source_bigon()
    if sink is None or source is None:
        raise InternalContradiction("diagram is not oriented with one sink and one source bigon")
    frozen = frozenset(x >> 1 for x in d.faces[source])
    prov = (("sink_bigon", "boundary_circle"), ("source_bigon", "removed_disk"))
    return BranchShadow(d, frozenset([source]), frozenset([sink]), frozen, provenance=prov)


def branch_locus_components(sh: BranchShadow) -> int:
    """Immersed circles in the locus, following each curve through its
    double points and joining alpha to beta at the ends of removed arcs."""
    d = sh.base
    live = [e for e in range(2 * d.n) if e not in sh.frozen_edges and e not in sh.pushed_edges]
    parent = {e: e for e in live}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def union(a, b):
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    n = d.n
    for e in live:
        nxt = (e + 1) % n if e < n else n + ((e - n + 1) % n)
        union(e, nxt)
    # where a curve's arc is removed, the locus turns onto the other curve
    for v in range(n):
        rot = d.rotation(v)
        gone = [x for x in rot if (x >> 1) in sh.frozen_edges]
        if len(gone) == 2:
            rest = [x >> 1 for x in rot if (x >> 1) not in sh.frozen_edges]
            if len(rest) == 2:
                union(rest[0], rest[1])
    return len({find(e) for e in live})


# -- sink tubes

@dataclass(frozen=True)
class SinkTube:
    """Faces from the sink bigon through sink sectors to a polygon.

    ``rungs`` are the darts crossed going out of each face; ``long_arcs``
    holds the edge ids of the two sides, each listed from the bigon end.
    """

    role: str
    faces: tuple[int, ...]
    rungs: tuple[int, ...]
    long_arcs: tuple[tuple[int, ...], tuple[int, ...]]
    ends: tuple[tuple[int, int], tuple[int, int]]

    @property
    def sectors(self) -> tuple[int, ...]:
        return self.faces[1:-1]

    @property
    def polygon(self) -> int:
        return self.faces[-1]


def sink_tube(sh: BranchShadow | TorusDiagram, role: str = BETA) -> SinkTube:
    """The ``role``-sink tube: its rungs are arcs of the other curve."""
    return _tube(sh.base if isinstance(sh, BranchShadow) else sh, role, ArcClass.SINK)


def source_tube(sh: BranchShadow | TorusDiagram, role: str = BETA) -> SinkTube:
    """The ``role``-source tube, walked from the source bigon."""
    return _tube(sh.base if isinstance(sh, BranchShadow) else sh, role, ArcClass.SOURCE)


def _tube(d: TorusDiagram, role: str, kind: ArcClass) -> SinkTube:
    rung_role = other_role(role)
    bigon = d.sink_bigon() if kind == ArcClass.SINK else d.source_bigon()
    if bigon is None:
        raise SimpleDiagram()
    start = [x for x in d.faces[bigon] if d.role(x) == rung_role][0]
    faces, rungs = [bigon], [start]
    u, v = d.tail(start), d.head(start)
    side_u, side_v = [], []
    x = start
    while True:
        f = d.across(x)
        faces.append(f)
        darts = d.faces[f]
        if len(darts) != 4:
            break
        own = [y for y in darts if d.role(y) == rung_role]
        if any(d.dart_class(y) != kind for y in own):
            raise InternalContradiction(f"face {f} in the tube is not a {kind.value} sector")
        entry = x ^ 1
        out = [y for y in own if y != entry][0]
        sides = [y for y in darts if d.role(y) == role]
        for y in sides:
            ends = {d.tail(y), d.head(y)}
            if u in ends:
                side_u.append(y >> 1)
                nu = (ends - {u}).pop()
            elif v in ends:
                side_v.append(y >> 1)
                nv = (ends - {v}).pop()
            else:
                raise InternalContradiction("tube sides do not continue")
        u, v = nu, nv
        rungs.append(out)
        x = out
        if len(faces) > len(d.faces):
            raise InternalContradiction("tube does not end")
    if d.dart_class(x ^ 1) != kind:
        raise InternalContradiction(f"tube ends on an arc that is not {kind.value}")
    u0, v0 = d.tail(start), d.head(start)
    return SinkTube(role, tuple(faces), tuple(rungs), (tuple(side_u), tuple(side_v)), ((u0, u), (v0, v)))


def sink_sectors(d: TorusDiagram, role: str = BETA, kind: ArcClass = ArcClass.SINK) -> list[int]:
    """All faces that are ``role``-sink (or source) sectors."""
    rung_role = other_role(role)
    out = []
    for f, darts in enumerate(d.faces):
        if len(darts) == 4:
            own = [y for y in darts if d.role(y) == rung_role]
            if all(d.dart_class(y) == kind for y in own):
                out.append(f)
    return out


def polygon_arc_classes(d: TorusDiagram, role: str = ALPHA) -> dict[ArcClass, int]:
    """How many ``role`` arcs on the hexagons/octagon fall in each class."""
    out = {c: 0 for c in ArcClass}
    seen = set()
    for f in d.polygons:
        for x in d.faces[f]:
            if d.role(x) == role and (x >> 1) not in seen:
                seen.add(x >> 1)
                out[d.dart_class(x)] += 1
    return out


# -- pushes

def push_arc(sh: BranchShadow, m: PushMove) -> BranchShadow:
    d = sh.base
    for e in m.pushed_arc:
        if e in sh.frozen_edges:
            raise FrozenArc(f"edge {e} bounds the removed source bigon")
        if e in sh.pushed_edges:
            raise ValueError(f"edge {e} is already off the torus")
        near = set(m.swept) or {d.face_of[2 * e], d.face_of[2 * e + 1]}
        if near & sh.punctured_faces:
            raise IllegalCrossing(f"edge {e} would be pushed across a puncture")
    for e in m.target_arc:
        if e in sh.pushed_edges or e in m.pushed_arc:
            raise ValueError(f"target edge {e} is not on the torus")
    pts = tuple(DoublePoint(lab, None, f) for lab, f in zip(m.labels, m.end_faces))
    return BranchShadow(d, sh.removed_faces, sh.punctured_faces, sh.frozen_edges,
                        sh.pushed_edges | frozenset(m.pushed_arc), sh.extra_points + pts,
                        sh.provenance, sh.moves + (m,))


def tube_push_move(sh: BranchShadow, role: str = BETA) -> PushMove:
    """The move pushing the long arc that avoids the source bigon onto the
    one that holds its arc."""
    tube = sink_tube(sh, role)
    d = sh.base
    src = [x >> 1 for x in d.faces[list(sh.removed_faces)[0]] if d.role(x) == role]
    side_u, side_v = tube.long_arcs
    if src and src[0] in side_v:
        pushed, target = side_u, side_v
    elif src and src[0] in side_u:
        pushed, target = side_v, side_u
    else:
        raise PushUndefined("neither long arc of the sink tube holds the source bigon arc")
    return PushMove(tuple(pushed), tuple(target), (tube.faces[0], tube.polygon), swept=tube.sectors)


def sink_tube_push(sh: BranchShadow, role: str = BETA) -> tuple[BranchShadow, tuple[DoublePoint, ...]]:
    """Push one long arc of the sink tube onto the other.  When the sink
    bigon sits directly on the polygon the long arcs are empty and the
    shadow comes back unchanged."""
    if not sink_tube(sh, role).sectors:
        return sh, ()
    m = tube_push_move(sh, role)
    out = push_arc(sh, m)
    return out, out.extra_points[len(sh.extra_points):]


# -- scans and safety

def rainbow_turns(d: TorusDiagram, edges=None) -> dict[int, int]:
    """For each rainbow beta arc (by edge id), +1 if the disk it cuts off
    against alpha lies on its left, -1 if on its right.  ``edges`` limits
    the work to some edge ids."""
    out = {}
    for j in range(d.n) if edges is None else [e - d.n for e in edges]:
        x = d.dart(BETA, j, True)
        if d.dart_class(x) in (ArcClass.SINK, ArcClass.SOURCE):
            left = _alpha_sides(d, _beyond_alpha(d, d.face_of[x], x >> 1))
            right = _alpha_sides(d, _beyond_alpha(d, d.face_of[x ^ 1], x >> 1))
            if len(left) == 1 and len(right) == 2:
                out[x >> 1] = 1
            elif len(right) == 1 and len(left) == 2:
                out[x >> 1] = -1
            else:
                raise InternalContradiction(f"rainbow arc {j} does not cut off a disk")
    return out


def _beyond_alpha(d: TorusDiagram, f0: int, cut: int) -> set[int]:
    """Faces reachable from ``f0`` without crossing alpha or edge ``cut``."""
    seen, stack = {f0}, [f0]
    while stack:
        f = stack.pop()
        for y in d.faces[f]:
            if d.is_alpha(y) or (y >> 1) == cut:
                continue
            g = d.face_of[y ^ 1]
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return seen


def _alpha_sides(d: TorusDiagram, faces: set[int]) -> set[bool]:
    # a face left of a forward alpha dart lies on the left side of alpha
    return {d.forward(y) for f in faces for y in d.faces[f] if d.is_alpha(y)}


def remaining_rainbow_turns(sh: BranchShadow) -> set[int]:
    """Turns of the rainbow arcs still in the branch locus, leaving out the
    arc of the sink bigon (it bounds the punctured face)."""
    d = sh.base
    skip = {x >> 1 for f in sh.punctured_faces for x in d.faces[f]}
    out = set()
    for e, t in sh.rainbow_turns.items():
        if e not in skip and sh.is_locus(2 * e):
            out.add(t)
    return out


def sink_disk_scan(sh: BranchShadow) -> list[int]:
    """Sink disks among the sink corners of double points."""
    return sorted({p.sink_corner for p in sh.double_points if sh.is_sink_disk(p.sink_corner)})


def sink_disk_scan_all(sh: BranchShadow) -> list[int]:
    """Sink disks among all sectors (the exhaustive check)."""
    return sorted(s for s in sh.sectors if sh.is_sink_disk(s))


def _beta_darts(sh: BranchShadow, s: int, kinds: set) -> list[int]:
    d = sh.base
    return [x for x in sh.sector_boundary(s)
            if d.role(x) == BETA and sh.is_locus(x) and d.dart_class(x) in kinds]


def _same_direction_pair(sh: BranchShadow, darts: list[int], direction) -> bool:
    """Two arcs going the same way whose darts disagree: one of them has
    its branch direction pointing out of the sector."""
    groups: dict[int, set[bool]] = {}
    for x in darts:
        groups.setdefault(direction(x >> 1), set()).add(sh.points_inward(x))
    return any(len(g) == 2 for g in groups.values())


def safety_reason(sh: BranchShadow, s: int) -> SafetyReason | None:
    """Why the sector ``s`` is not a sink disk, or None if no listed reason applies."""
    if not sh.sector_is_disk(s) or set(sh.sectors[s]) & sh.removed_faces:
        return SafetyReason.ANNULUS_CORNER
    d = sh.base
    vert = _beta_darts(sh, s, {ArcClass.PARALLEL})
    if _same_direction_pair(sh, vert, lambda e: d.sign[d.tail(2 * e)]):
        return SafetyReason.VERTICAL_PAIR
    rain = _beta_darts(sh, s, {ArcClass.SINK, ArcClass.SOURCE})
    turns = sh.rainbow_turns
    if _same_direction_pair(sh, rain, lambda e: turns[e]):
        return SafetyReason.RAINBOW_PAIR
    if sh.touches_disk_sheet(s):
        return SafetyReason.OUTWARD_PROVENANCE
    return None


@dataclass(frozen=True)
class SafetyEntry:
    point: DoublePoint
    reason: SafetyReason | None

    @property
    def safe(self) -> bool:
        return self.reason is not None

    def to_dict(self) -> dict:
        return {**self.point.to_dict(), "reason": self.reason.value if self.reason else None}


def safety_table(sh: BranchShadow) -> list[SafetyEntry]:
    return [SafetyEntry(p, safety_reason(sh, p.sink_corner)) for p in sh.double_points]


@dataclass
class PrimitiveRun:
    """The push on a primitive diagram and what it leaves behind."""

    before: BranchShadow
    after: BranchShadow
    new_points: tuple[DoublePoint, ...]
    disks_before: list[int]
    table: list[SafetyEntry] = field(default_factory=list)

    @property
    def pushed(self) -> bool:
        return bool(self.new_points)

    @property
    def all_safe(self) -> bool:
        return all(e.safe for e in self.table)


def primitive_push(d: TorusDiagram) -> PrimitiveRun:
    """Build the shadow of a primitive diagram and push its beta-sink tube."""
    if not is_primitive(d):
        raise PushUndefined("the tube push for the base case needs a primitive diagram")
    sh = shadow_from_diagram(d)
    before = sink_disk_scan_all(sh)
    after, pts = sink_tube_push(sh, BETA)
    return PrimitiveRun(sh, after, pts, before, safety_table(after))
