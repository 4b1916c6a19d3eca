"""Reduced doubly pointed genus-one diagrams as combinatorial maps.

A diagram is stored with its vertices labelled ``0..n-1`` in the order in
which the oriented alpha curve meets them, so alpha is implicit.  What is
left to record is the cyclic order in which beta meets the same vertices,
the crossing sign at every vertex, and two darts whose left faces hold the
basepoints ``z`` and ``w``.

Darts are small integers.  For ``n`` vertices:

* alpha edge ``i`` runs from vertex ``i`` to ``i + 1``; its forward dart is
  ``2*i`` and its backward dart ``2*i + 1``;
* beta edge ``j`` runs from ``beta[j]`` to ``beta[j + 1]``; its forward dart is
  ``2*n + 2*j`` and its backward dart ``2*n + 2*j + 1``.

``d ^ 1`` reverses a dart.  A face is the cycle of darts that keeps the face
on its left, so a face whose darts are all forward is traversed with both
curves' orientations and is bounded anticlockwise.

The sign at a vertex is ``+1`` when beta crosses alpha from its right side
to its left side (the cross product of the tangents is positive).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable

from .errors import DisconnectedBeta, InternalContradiction, InvalidTuple, NoPrimitiveTwist

ALPHA = "alpha"
BETA = "beta"
ROLES = (ALPHA, BETA)

DIAGRAM_SCHEMA = "sinkfree.diagram/1"


def other_role(role: str) -> str:
    if role == ALPHA:
        return BETA
    if role == BETA:
        return ALPHA
    raise ValueError(f"unknown curve role {role!r}")


class ArcClass(str, Enum):
    SINK = "sink"
    SOURCE = "source"
    PARALLEL = "parallel"


class FaceClass(str, Enum):
    SINK_BIGON = "sink_bigon"
    SOURCE_BIGON = "source_bigon"
    SINK_SECTOR = "sink_sector"
    SOURCE_SECTOR = "source_sector"
    PARALLEL_SECTOR = "parallel_sector"
    HEXAGON = "hexagon"
    OCTAGON = "octagon"
    OTHER = "other"


# ---------------------------------------------------------------- tuples


@dataclass(frozen=True)
class DiagramTuple:
    """The four integers (p, q, r, s) of a diagram in standard position.

    ``p`` intersections, ``2q`` rainbow arcs, ``r`` leaning vertical arcs and
    the gluing twist ``s``.  The twist is stored modulo ``p``.
    """

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("p", "q", "r", "s"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InvalidTuple(f"{name} must be an integer, got {v!r}")
        p, q, r = self.p, self.q, self.r
        if p < 1:
            raise InvalidTuple(f"p must be positive, got {p}")
        if q < 0 or r < 0:
            raise InvalidTuple(f"q and r must be non-negative, got q={q}, r={r}")
        if 2 * q + r > p:
            raise InvalidTuple(f"2q + r must not exceed p: 2*{q} + {r} > {p}")
        if p - 2 * q < 1:
            raise InvalidTuple(f"need at least one vertical arc: p - 2q = {p - 2 * q}")
        object.__setattr__(self, "s", self.s % p)

    @classmethod
    def parse(cls, text: str) -> "DiagramTuple":
        """Parse ``"p,q,r,s"``.  Raises ``ValueError`` on malformed text."""
        parts = [x.strip() for x in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 'p,q,r,s', got {text!r}")
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise ValueError(f"expected four integers, got {text!r}") from None
        return cls(*nums)

    def __str__(self) -> str:
        return f"{self.p},{self.q},{self.r},{self.s}"

    def as_list(self) -> list[int]:
        return [self.p, self.q, self.r, self.s]


def iter_tuples(max_p: int, min_p: int = 1, nonsimple: bool = False):
    """Yield every bound-respecting tuple with ``min_p <= p <= max_p``.

    Connectivity of beta is not checked here; see :func:`valid_tuples`.
    """
    for p in range(min_p, max_p + 1):
        for q in range(1 if nonsimple else 0, (p - 1) // 2 + 1):
            for r in range(0, p - 2 * q + 1):
                for s in range(p):
                    yield DiagramTuple(p, q, r, s)


def valid_tuples(max_p: int, min_p: int = 1, nonsimple: bool = False, normal: bool = False):
    """Tuples whose arc matching closes up into a single beta curve.

    With ``normal=True`` the redundant ``r = p - 2q`` copies (isomorphic to
    ``r = 0``) are skipped, except when ``p - 2q == r == 0`` cannot occur.
    """
    for t in iter_tuples(max_p, min_p, nonsimple):
        if normal and t.r == t.p - 2 * t.q and t.r > 0:
            continue
        try:
            _, sign = _trace(t)
        except DisconnectedBeta:
            continue
        if sum(sign) == 0:
            continue
        yield t


# ------------------------------------------------------- the standard trace


def _ceiling_verticals(p: int, q: int, r: int) -> list[int]:
    return list(range(0, r)) + list(range(r + 2 * q, p))


def _trace(t: DiagramTuple) -> tuple[list[int], list[int]]:
    """Follow beta through the square.  Returns (vertex order, signs).

    Floor position ``f`` is alpha vertex ``f``; ceiling position ``c`` is
    alpha vertex ``c + s``.  Floor arcs sit on the left of alpha.
    """
    p, q, r, s = t.p, t.q, t.r, t.s
    cv = _ceiling_verticals(p, q, r)
    cv_index = {c: k for k, c in enumerate(cv)}

    def floor_partner(f):
        # ('F', f') for a rainbow, ('C', c) for a vertical arc
        if f < 2 * q:
            return "F", 2 * q - 1 - f
        return "C", cv[f - 2 * q]

    def ceil_partner(c):
        if r <= c < r + 2 * q:
            return "C", 2 * r + 2 * q - 1 - c
        return "F", 2 * q + cv_index[c]

    start = q if q > 0 else 0
    order: list[int] = []
    sign = [0] * p
    v, up = start, True
    while True:
        if sign[v]:
            break
        order.append(v)
        sign[v] = 1 if up else -1
        if up:
            kind, x = floor_partner(v)
            if kind == "F":
                v, up = x, False
            else:
                v, up = (x + s) % p, True
        else:
            kind, x = ceil_partner((v - s) % p)
            if kind == "C":
                v, up = (x + s) % p, True
            else:
                v, up = x, False
    if v != start or len(order) != p:
        raise DisconnectedBeta(
            f"tuple {t}: beta closes after {len(order)} of {p} intersections")
    return order, sign


# ------------------------------------------------------------ the diagram


@dataclass(frozen=True)
class TorusDiagram:
    """Alpha and beta on the torus, with basepoints, as a combinatorial map.

    ``z`` and ``w`` are normalised to the smallest dart of their faces and
    ``beta`` is rotated to start at vertex 0, so dataclass equality is exact
    equality of labelled maps.
    """

    beta: tuple[int, ...]
    sign: tuple[int, ...]
    z: int
    w: int

    def __post_init__(self):
        n = len(self.beta)
        if n < 1:
            raise ValueError("a diagram needs at least one intersection")
        if sorted(self.beta) != list(range(n)):
            raise ValueError("beta must visit every vertex exactly once")
        if len(self.sign) != n or any(x not in (1, -1) for x in self.sign):
            raise ValueError("sign must be a tuple of +1/-1, one per vertex")
        for name in ("z", "w"):
            d = getattr(self, name)
            if not 0 <= d < 4 * n:
                raise ValueError(f"{name} dart {d} out of range")
        beta = tuple(self.beta)
        z, w = self.z, self.w
        k = beta.index(0)
        if k:
            shift = lambda d: d if d < 2 * n else 2 * n + (d - 2 * n - 2 * k) % (2 * n)
            beta = beta[k:] + beta[:k]
            z, w = shift(z), shift(w)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sign", tuple(self.sign))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z", min(self.faces[self.face_of[z]]))
        object.__setattr__(self, "w", min(self.faces[self.face_of[w]]))

    # -- darts

    @property
    def n(self) -> int:
        return len(self.beta)

    @cached_property
    def bpos(self) -> tuple[int, ...]:
        pos = [0] * self.n
        for j, v in enumerate(self.beta):
            pos[v] = j
        return tuple(pos)

    def is_alpha(self, d: int) -> bool:
        return d < 2 * self.n

    def role(self, d: int) -> str:
        return ALPHA if d < 2 * self.n else BETA

    def edge(self, d: int) -> int:
        """Index of the dart's edge on its own curve."""
        n = self.n
        return d // 2 if d < 2 * n else (d - 2 * n) // 2

    @staticmethod
    def forward(d: int) -> bool:
        return d % 2 == 0

    def dart(self, role: str, edge: int, forward: bool = True) -> int:
        base = 0 if role == ALPHA else 2 * self.n
        return base + 2 * (edge % self.n) + (0 if forward else 1)

    def tail(self, d: int) -> int:
        n = self.n
        if d < 2 * n:
            i = d // 2
            return i if d % 2 == 0 else (i + 1) % n
        j = (d - 2 * n) // 2
        return self.beta[j] if d % 2 == 0 else self.beta[(j + 1) % n]

    def head(self, d: int) -> int:
        return self.tail(d ^ 1)

    def edge_ends(self, role: str, edge: int) -> tuple[int, int]:
        """(start, end) vertices of an edge along its curve's orientation."""
        d = self.dart(role, edge)
        return self.tail(d), self.head(d)

    def rotation(self, v: int) -> tuple[int, int, int, int]:
        """Outgoing darts at ``v`` in anticlockwise order."""
        n = self.n
        a_out = 2 * v
        a_in = 2 * ((v - 1) % n) + 1
        j = self.bpos[v]
        b_out = 2 * n + 2 * j
        b_in = 2 * n + 2 * ((j - 1) % n) + 1
        if self.sign[v] > 0:
            return (a_out, b_out, a_in, b_in)
        return (a_out, b_in, a_in, b_out)

    @cached_property
    def next_dart(self) -> tuple[int, ...]:
        """Face permutation: the dart after ``d`` around its left face."""
        nxt = [0] * (4 * self.n)
        for v in range(self.n):
            rot = self.rotation(v)
            for i, h in enumerate(rot):
                nxt[h ^ 1] = rot[i - 1]
        return tuple(nxt)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Face dart cycles, each starting at its smallest dart, sorted."""
        seen = [False] * (4 * self.n)
        out = []
        for d in range(4 * self.n):
            if seen[d]:
                continue
            cyc = []
            e = d
            while not seen[e]:
                seen[e] = True
                cyc.append(e)
                e = self.next_dart[e]
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        fo = [0] * (4 * self.n)
        for k, f in enumerate(self.faces):
            for d in f:
                fo[d] = k
        return tuple(fo)

    @property
    def z_face(self) -> int:
        return self.face_of[self.z]

    @property
    def w_face(self) -> int:
        return self.face_of[self.w]

    def face_size(self, f: int) -> int:
        return len(self.faces[f])

    def basepoints_in(self, f: int) -> int:
        return (self.z_face == f) + (self.w_face == f)

    def vertices_of_face(self, f: int) -> list[int]:
        return [self.tail(d) for d in self.faces[f]]

    def across(self, d: int) -> int:
        """The face on the other side of the dart's edge."""
        return self.face_of[d ^ 1]

    # -- classification

    def arc_class(self, role: str, edge: int) -> ArcClass:
        """Class of an arc of ``role`` with respect to the other curve.

        An alpha arc u->v is a (beta-)sink arc when beta crosses into its
        left side at v and out of it at u, i.e. signs (-1, +1).  Beta arcs
        use the mirrored rule because the sign is measured from alpha.
        """
        u, v = self.edge_ends(role, edge)
        su, sv = self.sign[u], self.sign[v]
        if su == sv:
            return ArcClass.PARALLEL
        if role == ALPHA:
            return ArcClass.SINK if (su, sv) == (-1, 1) else ArcClass.SOURCE
        return ArcClass.SINK if (su, sv) == (1, -1) else ArcClass.SOURCE

    def dart_class(self, d: int) -> ArcClass:
        return self.arc_class(self.role(d), self.edge(d))

    def face_class(self, f: int, ref: str = BETA) -> FaceClass:
        """Class of a face.  ``ref=BETA`` classifies by the alpha arcs."""
        darts = self.faces[f]
        k = len(darts)
        if k == 2:
            if all(self.forward(d) for d in darts):
                return FaceClass.SINK_BIGON
            if not any(self.forward(d) for d in darts):
                return FaceClass.SOURCE_BIGON
            return FaceClass.OTHER
        if k == 6:
            return FaceClass.HEXAGON
        if k == 8:
            return FaceClass.OCTAGON
        if k == 4:
            own = ALPHA if ref == BETA else BETA
            cls = {self.dart_class(d) for d in darts if self.role(d) == own}
            if len(cls) != 1:
                return FaceClass.OTHER
            return {ArcClass.SINK: FaceClass.SINK_SECTOR,
                    ArcClass.SOURCE: FaceClass.SOURCE_SECTOR,
                    ArcClass.PARALLEL: FaceClass.PARALLEL_SECTOR}[cls.pop()]
        return FaceClass.OTHER

    def faces_of_class(self, cls: FaceClass, ref: str = BETA) -> list[int]:
        return [f for f in range(len(self.faces)) if self.face_class(f, ref) == cls]

    @property
    def bigons(self) -> list[int]:
        return [f for f, ds in enumerate(self.faces) if len(ds) == 2]

    @property
    def polygons(self) -> list[int]:
        """Faces with more than four sides (the hexagons or the octagon)."""
        return [f for f, ds in enumerate(self.faces) if len(ds) > 4]

    @cached_property
    def _bigon_classes(self) -> dict:
        out: dict = {}
        for f in self.bigons:
            out.setdefault(self.face_class(f), []).append(f)
        return out

    def sink_bigon(self) -> int | None:
        got = self._bigon_classes.get(FaceClass.SINK_BIGON, [])
        return got[0] if len(got) == 1 else None

    def source_bigon(self) -> int | None:
        got = self._bigon_classes.get(FaceClass.SOURCE_BIGON, [])
        return got[0] if len(got) == 1 else None

    # -- identity

    def key(self) -> tuple:
        return (self.beta, self.sign, self.z, self.w)

    def to_dict(self) -> dict:
        return {
            "schema": DIAGRAM_SCHEMA,
            "n": self.n,
            "alpha": list(range(self.n)),
            "beta": list(self.beta),
            "signs": list(self.sign),
            "vertices": [list(self.rotation(v)) for v in range(self.n)],
            "face_next": list(self.next_dart),
            "faces": [list(f) for f in self.faces],
            "z_face": self.z_face,
            "w_face": self.w_face,
            "z_dart": self.z,
            "w_dart": self.w,
            "orientation": 1,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TorusDiagram":
        if data.get("schema") != DIAGRAM_SCHEMA:
            raise ValueError(f"unsupported diagram schema {data.get('schema')!r}")
        return cls(tuple(data["beta"]), tuple(data["signs"]), data["z_dart"], data["w_dart"])


def build_from_tuple(t: DiagramTuple) -> TorusDiagram:
    """Standard-position diagram of a tuple.

    Beta is oriented so that the bigon around ``z`` is a sink bigon; the
    bigon around ``w`` then comes out as the source bigon.
    """
    order, sign = _trace(t)
    if sum(sign) == 0:
        raise InvalidTuple(
            f"tuple {t}: alpha and beta are homologous, the diagram describes S^1 x S^2")
    p, q = t.p, t.q
    probe = TorusDiagram(tuple(order), tuple(sign), 0, 0)
    z = probe.dart(ALPHA, (q - 1) % p, True)
    w = probe.dart(ALPHA, (t.r + q - 1 + t.s) % p, False)
    return TorusDiagram(tuple(order), tuple(sign), z, w)


# --------------------------------------------------------- relabelling


def _relabel(d: TorusDiagram, k: int, flip: bool, rev_beta: bool) -> tuple[list[int], list[int], callable]:
    """Vertex relabelling v -> v - k (or k - v when ``flip``).

    Returns the new beta order, the new sign list and a dart map.  When
    ``flip`` is set alpha's orientation is reversed; ``rev_beta`` reverses
    beta.  Signs change by the product of the two reversals.
    """
    n = d.n
    vmap = (lambda v: (k - v) % n) if flip else (lambda v: (v - k) % n)
    flip_sign = (-1 if flip else 1) * (-1 if rev_beta else 1)
    new_sign = [0] * n
    for v in range(n):
        new_sign[vmap(v)] = d.sign[v] * flip_sign
    seq = [vmap(v) for v in d.beta]
    if rev_beta:
        seq = seq[::-1]
    j0 = seq.index(0)
    new_beta = seq[j0:] + seq[:j0]
    pos = {v: j for j, v in enumerate(new_beta)}

    def dmap(x: int) -> int:
        if x < 2 * n:
            i = x // 2
            if flip:
                e = (k - i - 1) % n
                return 2 * e + (1 - x % 2)
            return 2 * ((i - k) % n) + x % 2
        j = (x - 2 * n) // 2
        if rev_beta:
            # old edge j (beta[j] -> beta[j+1]) becomes a reversed edge
            e = (pos[vmap(d.beta[(j + 1) % n])]) % n
            return 2 * n + 2 * e + (1 - x % 2)
        e = pos[vmap(d.beta[j])]
        return 2 * n + 2 * e + x % 2

    return new_beta, new_sign, dmap


def transform(d: TorusDiagram, k: int = 0, flip: bool = False, rev_beta: bool = False,
              swap_basepoints: bool = False) -> TorusDiagram:
    """Relabelled copy of ``d``; see :func:`_relabel`."""
    nb, ns, dmap = _relabel(d, k, flip, rev_beta)
    z, w = dmap(d.z), dmap(d.w)
    if swap_basepoints:
        z, w = w, z
    return TorusDiagram(tuple(nb), tuple(ns), z, w)


def reverse_orientations(d: TorusDiagram, alpha: bool = True, beta: bool = True) -> TorusDiagram:
    """The same picture with the chosen curves' orientations reversed."""
    if alpha:
        return transform(d, 0, True, beta)
    return transform(d, 0, False, beta)


def involution_image(d: TorusDiagram) -> TorusDiagram:
    """Image under the hyperelliptic involution.

    The rotation carries each curve to itself with its orientation reversed
    and exchanges the basepoints, so the image is the same picture with both
    orientations reversed and ``z``, ``w`` swapped.
    """
    return transform(d, 0, True, True, swap_basepoints=True)


@dataclass(frozen=True)
class HyperellipticMap:
    """An automorphism of the unoriented picture realising the involution.

    ``vertex[v]`` is the image vertex; ``dart[x]`` the image dart, which runs
    against its curve's orientation exactly when ``x`` runs with it.
    """

    vertex: tuple[int, ...]
    dart: tuple[int, ...]

    def face_image(self, d: TorusDiagram, f: int) -> int:
        return d.face_of[self.dart[d.faces[f][0]]]


def involution_map(d: TorusDiagram) -> HyperellipticMap:
    """Find v -> k - v carrying ``d`` onto itself with orientations reversed
    and basepoint faces exchanged.  Raises ``ValueError`` if none exists."""
    n = d.n
    for k in range(n):
        vmap = [(k - v) % n for v in range(n)]
        if any(d.sign[vmap[v]] != d.sign[v] for v in range(n)):
            continue
        # beta read backwards through the map must be beta again
        img = [vmap[v] for v in reversed(d.beta)]
        j0 = img.index(d.beta[0])
        if img[j0:] + img[:j0] != list(d.beta):
            continue
        darts = [0] * (4 * n)
        for x in range(4 * n):
            if x < 2 * n:
                i = x // 2
                darts[x] = 2 * ((k - i - 1) % n) + (1 - x % 2)
            else:
                j = (x - 2 * n) // 2
                u = vmap[d.beta[(j + 1) % n]]
                darts[x] = 2 * n + 2 * d.bpos[u] + (1 - x % 2)
        if d.face_of[darts[d.z]] != d.w_face or d.face_of[darts[d.w]] != d.z_face:
            continue
        return HyperellipticMap(tuple(vmap), tuple(darts))
    raise ValueError("no involution-realising automorphism found")


def canonical_key(d: TorusDiagram, oriented: bool = True) -> tuple:
    """Smallest key over all relabellings that keep alpha's orientation.

    With ``oriented=False`` the key is also minimised over reversing both
    curves together (basepoints stay put).
    """
    best = None
    options = [(False, False)] if oriented else [(False, False), (True, True)]
    for flip, rb in options:
        for k in range(d.n):
            key = transform(d, k, flip, rb).key()
            if best is None or key < best:
                best = key
    return best


def canonical_hash(d: TorusDiagram, oriented: bool = True) -> str:
    blob = json.dumps(canonical_key(d, oriented), separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def isomorphic(a: TorusDiagram, b: TorusDiagram, oriented: bool = True) -> bool:
    """Same as comparing canonical keys: relabellings form a group, so it
    is enough to look for one taking ``b`` onto ``a``.  Relabellings map
    faces to faces, so basepoints only need to land in the right faces."""
    if a.n != b.n or sorted(a.sign) != sorted(b.sign):
        return False
    options = [(False, False)] if oriented else [(False, False), (True, True)]
    for flip, rb in options:
        for k in range(a.n):
            nb, ns, dmap = _relabel(b, k, flip, rb)
            if (tuple(nb) == a.beta and tuple(ns) == a.sign
                    and a.face_of[dmap(b.z)] == a.z_face and a.face_of[dmap(b.w)] == a.w_face):
                return True
    return False


# -------------------------------------------------------------- reports


@dataclass
class FaceCensus:
    bigons: int = 0
    hexagons: int = 0
    octagons: int = 0
    quadrilaterals: int = 0
    other: int = 0

    def as_dict(self) -> dict:
        return {"bigons": self.bigons, "hexagons": self.hexagons, "octagons": self.octagons,
                "quadrilaterals": self.quadrilaterals, "other": self.other}


def census(d: TorusDiagram) -> FaceCensus:
    c = FaceCensus()
    for f in d.faces:
        k = len(f)
        if k == 2:
            c.bigons += 1
        elif k == 4:
            c.quadrilaterals += 1
        elif k == 6:
            c.hexagons += 1
        elif k == 8:
            c.octagons += 1
        else:
            c.other += 1
    return c


def is_simple(d: TorusDiagram) -> bool:
    return census(d).bigons == 0


@dataclass
class ValidationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def add(self, name: str, passed: bool, note: str = "") -> None:
        self.checks[name] = bool(passed)
        if note and not passed:
            self.notes.append(f"{name}: {note}")

    def __str__(self) -> str:
        lines = [f"{'ok  ' if v else 'FAIL'} {k}" for k, v in self.checks.items()]
        return "\n".join(lines + self.notes)


def validate(d: TorusDiagram) -> ValidationReport:
    rep = ValidationReport()
    n = d.n
    V, E, F = n, 2 * n, len(d.faces)
    rep.add("euler", V - E + F == 0, f"V-E+F = {V - E + F}")
    rep.add("degree", sum(len(f) for f in d.faces) == 2 * E, "face degrees do not sum to 2E")
    rep.add("alpha_cycle", True)
    rep.add("beta_cycle", len(set(d.beta)) == n)
    rep.add("not_s1xs2", sum(d.sign) != 0, "algebraic intersection of alpha and beta is zero")
    odd = [f for f, ds in enumerate(d.faces) if len(ds) % 2]
    rep.add("faces_alternate", not odd, f"odd faces {odd}")
    bad = [f for f in d.bigons if d.basepoints_in(f) != 1]
    rep.add("reduced", not bad, f"bigons without exactly one basepoint: {bad}")
    c = census(d)
    if c.bigons == 0:
        rep.add("census", c.quadrilaterals == F, f"simple diagram with census {c.as_dict()}")
    else:
        okc = (c.bigons == 2 and c.other == 0
               and ((c.hexagons == 2 and c.octagons == 0) or (c.hexagons == 0 and c.octagons == 1)))
        rep.add("census", okc, f"census {c.as_dict()}")
        rep.add("basepoints_distinct", d.z_face != d.w_face, "z and w share a face")
        kinds = sorted(d.face_class(f).value for f in d.bigons)
        rep.add("bigon_orientation", kinds == ["sink_bigon", "source_bigon"],
                f"bigon classes {kinds}")
    return rep


def classify_arcs(d: TorusDiagram) -> dict[str, list[ArcClass]]:
    """Arc classes: alpha arcs w.r.t. beta and beta arcs w.r.t. alpha."""
    return {role: [d.arc_class(role, e) for e in range(d.n)] for role in ROLES}


# ------------------------------------------------------------ primitivity


def is_primitive(d: TorusDiagram) -> bool:
    """Face criterion: quadrilaterals have parallel alpha arcs exactly when
    they have parallel beta arcs, and each hexagon's non-parallel alpha arc
    and non-parallel beta arc meet at a corner."""
    for f, darts in enumerate(d.faces):
        if len(darts) == 4:
            a_par = {d.dart_class(x) == ArcClass.PARALLEL for x in darts if d.is_alpha(x)}
            b_par = {d.dart_class(x) == ArcClass.PARALLEL for x in darts if not d.is_alpha(x)}
            if a_par != b_par:
                return False
        elif len(darts) == 6:
            k = len(darts)
            bent = [i for i, x in enumerate(darts) if d.dart_class(x) != ArcClass.PARALLEL]
            if len(bent) != 2 or d.is_alpha(darts[bent[0]]) == d.is_alpha(darts[bent[1]]):
                return False
            i, j = bent
            if (j - i) % k not in (1, k - 1):
                return False
    return True


def standard_arc_directions(t: DiagramTuple) -> dict:
    """Directions of the arcs of a tuple, read in the square.

    Rainbow directions are +1 for left-to-right, listed outermost first;
    vertical directions are +1 for upward.
    """
    order, sign = _trace(t)
    p, q, r, s = t.p, t.q, t.r, t.s
    floor = [0] * q
    ceil = [0] * q
    vert = []
    for j in range(p):
        u, v = order[j], order[(j + 1) % p]
        if sign[u] == 1 and sign[v] == -1:
            floor[min(u, v)] = 1 if v > u else -1
        elif sign[u] == -1 and sign[v] == 1:
            cu, cw = (u - s) % p, (v - s) % p
            ceil[min(cu, cw) - r] = 1 if cw > cu else -1
        else:
            vert.append(sign[u])
    return {"floor": floor, "ceiling": ceil, "vertical": vert}


def is_primitive_standard(t: DiagramTuple) -> bool:
    """Standard-position criterion: nested rainbows alternate in direction
    and all vertical arcs point the same way."""
    dirs = standard_arc_directions(t)
    for fam in (dirs["floor"], dirs["ceiling"]):
        if any(fam[i] == fam[i + 1] for i in range(len(fam) - 1)):
            return False
    return len(set(dirs["vertical"])) <= 1


def _sign_patterns(p: int, q: int, r: int, D: int, phase: int) -> tuple[list[int], list[int]]:
    """Expected floor and ceiling sign rows of a primitive diagram.

    Floor rainbows alternate with the innermost one running right to left;
    ``phase`` fixes the ceiling family and ``D`` the vertical direction.
    """
    floor = [(-1) ** ((f - q) % 2) if f < 2 * q else D for f in range(p)]
    ceil = [phase * (-1) ** ((c - r) % 2) if r <= c < r + 2 * q else D for c in range(p)]
    return floor, ceil


def primitive_twists(p: int, q: int, r: int) -> dict[int, int]:
    """Twists making (p, q, r, s) primitive, keyed by the sign of the
    algebraic intersection of alpha and beta (the vertical direction).

    Along floor and roof the signs alternate except for one long run made
    of the vertical arcs and one neighbour.  Gluing has to line the two runs
    up, which leaves one candidate per vertical direction; each candidate is
    kept only if the traced diagram really shows the predicted sign row.
    """
    try:
        DiagramTuple(p, q, r, 0)
    except InvalidTuple:
        return {}
    if q < 1:
        return {}
    found: dict[int, set] = {}
    for D in (1, -1):
        for phase in (1, -1):
            floor, ceil = _sign_patterns(p, q, r, D, phase)
            for s in range(p):
                if any(floor[v] != ceil[(v - s) % p] for v in range(p)):
                    continue
                try:
                    _, sign = _trace(DiagramTuple(p, q, r, s))
                except DisconnectedBeta:
                    continue
                if list(sign) == floor and sum(sign) != 0:
                    found.setdefault(D, set()).add(s)
    out = {}
    for D, ss in found.items():
        if len(ss) != 1:
            raise InternalContradiction(f"({p},{q},{r}) has twists {sorted(ss)} for direction {D}")
        out[D] = ss.pop()
    return out


def primitive_twist(p: int, q: int, r: int, sign: int | None = None) -> int:
    """The twist making (p, q, r, s) primitive.

    ``sign`` picks the sign of the algebraic intersection number (equal to
    the direction of the vertical arcs under the sink-bigon orientation).
    Without it the positive solution is preferred when both exist.
    """
    tw = primitive_twists(p, q, r)
    if sign is not None:
        if sign not in tw:
            raise NoPrimitiveTwist(f"no primitive twist for ({p},{q},{r}) with sign {sign:+d}")
        return tw[sign]
    if not tw:
        raise NoPrimitiveTwist(f"no twist makes ({p},{q},{r},s) primitive")
    return tw[1] if 1 in tw else tw[-1]


# ---------------------------------------------------------- normal form


def to_tuple(d: TorusDiagram) -> DiagramTuple:
    """Read (p, q, r, s) off a reduced diagram.

    Alpha is oriented so that ``z`` lies on its left (the floor side); the
    floor rainbows then form one nested block.  ``r`` is normalised into
    ``[0, p - 2q)``, which identifies ``r = 0`` with ``r = p - 2q``.
    """
    if not is_simple(d) and _z_right_of_alpha(d):
        d = reverse_orientations(d, alpha=True, beta=False)
    n = d.n
    sign = d.sign
    # the beta edge on each side of alpha at every vertex
    left_end = [0] * n   # partner vertex along the arc on the left
    right_end = [0] * n
    left_kind = [""] * n
    right_kind = [""] * n
    for j in range(n):
        u, v = d.beta[j], d.beta[(j + 1) % n]
        side_u = "L" if sign[u] == 1 else "R"
        side_v = "L" if sign[v] == -1 else "R"
        kind = "rainbow" if side_u == side_v else "vertical"
        for a, sa, b in ((u, side_u, v), (v, side_v, u)):
            if sa == "L":
                left_end[a], left_kind[a] = b, kind
            else:
                right_end[a], right_kind[a] = b, kind
    floor_block = [v for v in range(n) if left_kind[v] == "rainbow"]
    q2 = len(floor_block)
    if q2 % 2:
        raise ValueError("odd number of floor rainbow endpoints")
    q = q2 // 2
    if q == 0:
        c1 = left_end[0]
        return DiagramTuple(n, 0, 0, c1 % n)

    def block_start(kind_row):
        inb = [kind_row[v] == "rainbow" for v in range(n)]
        starts = [v for v in range(n) if inb[v] and not inb[(v - 1) % n]]
        if len(starts) != 1:
            raise ValueError("rainbow endpoints do not form one block")
        return starts[0]

    x = block_start(left_kind)
    y = block_start(right_kind)
    for i in range(q2):
        if left_end[(x + i) % n] != (x + q2 - 1 - i) % n:
            raise ValueError("floor rainbows are not nested")
        if right_end[(y + i) % n] != (y + q2 - 1 - i) % n:
            raise ValueError("ceiling rainbows are not nested")
    c1 = left_end[(x + q2) % n]
    o = (c1 - (y + q2)) % n
    m = n - q2
    r = (-o) % m
    pos = 0 if r > 0 else q2
    s = ((c1 - x) - pos) % n
    return DiagramTuple(n, q, r, s)


def _z_right_of_alpha(d: TorusDiagram) -> bool:
    """For a non-simple diagram: whether z's bigon lies right of alpha."""
    f = d.z_face
    for x in d.faces[f]:
        if d.is_alpha(x):
            return not d.forward(x)
    return False


def normalize_tuple(t: DiagramTuple) -> DiagramTuple:
    return to_tuple(build_from_tuple(t))


def diagram_from_any(obj) -> TorusDiagram:
    """Accept a diagram, a tuple or tuple text."""
    if isinstance(obj, TorusDiagram):
        return obj
    if isinstance(obj, DiagramTuple):
        return build_from_tuple(obj)
    if isinstance(obj, str):
        return build_from_tuple(DiagramTuple.parse(obj))
    if isinstance(obj, Iterable):
        return build_from_tuple(DiagramTuple(*obj))
    raise TypeError(f"cannot make a diagram from {obj!r}")
