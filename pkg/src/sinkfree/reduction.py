"""Carrying curves and the reduction hierarchy.

The carrying curve of alpha runs through the faces whose boundary holds
exactly two alpha-parallel beta arcs, crossing each such arc once.  Those
faces and arcs form a single cycle; following it gives the new curve.
Replacing beta works the same way after exchanging the roles of the curves.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import (ALPHA, BETA, ArcClass, TorusDiagram, is_primitive, is_simple, other_role,
                      reverse_orientations, to_tuple, validate)
from .errors import InternalContradiction, ResultSimple


def swap_curves(d: TorusDiagram) -> TorusDiagram:
    """The same picture with the names alpha and beta exchanged.

    Vertices are relabelled by their position along beta, so the new alpha
    is again implicit.  Signs flip because the cross product is taken in the
    other order; faces are unchanged.
    """
    n = d.n
    new_beta = tuple(d.bpos[v] for v in range(n))
    new_sign = [0] * n
    for v in range(n):
        new_sign[d.bpos[v]] = -d.sign[v]
    return TorusDiagram(new_beta, tuple(new_sign), _swap_dart(d, d.z), _swap_dart(d, d.w))


def _swap_dart(d: TorusDiagram, x: int) -> int:
    n = d.n
    return x + 2 * n if x < 2 * n else x - 2 * n


def swap_dart_map(d: TorusDiagram) -> list[int]:
    """Dart ``x`` of ``d`` as a dart of ``swap_curves(d)`` (before beta is
    re-rotated, which never happens because vertex 0 is first on alpha)."""
    return [_swap_dart(d, x) for x in range(4 * d.n)]


@dataclass(frozen=True)
class CarryingCurve:
    """A curve parallel to ``replaced_role`` through its region cycle.

    ``cycle`` lists ``(face, dart)`` pairs of the host: the curve sits in
    ``face`` and leaves it across the edge of ``dart`` (a dart of the other
    curve on that face's boundary).
    """

    host: TorusDiagram
    replaced_role: str
    cycle: tuple[tuple[int, int], ...]

    @property
    def faces(self) -> tuple[int, ...]:
        return tuple(f for f, _ in self.cycle)

    @property
    def crossed_edges(self) -> tuple[int, ...]:
        return tuple(self.host.edge(x) for _, x in self.cycle)

    @property
    def intersection_count(self) -> int:
        return len(self.cycle)

    @property
    def new_curve(self) -> tuple[int, ...]:
        """Edges of the other curve crossed, in the order the curve runs."""
        return self.crossed_edges


def _parallel_darts(d: TorusDiagram, f: int, other: str) -> list[int]:
    return [x for x in d.faces[f] if d.role(x) == other and d.dart_class(x) == ArcClass.PARALLEL]


def carrying_curve(d: TorusDiagram, role: str) -> CarryingCurve:
    """The carrying curve of the ``role`` curve, found as its region cycle."""
    other = other_role(role)
    par_edges = [e for e in range(d.n) if d.arc_class(other, e) == ArcClass.PARALLEL]
    if not par_edges:
        raise InternalContradiction("no parallel arcs: the curves cannot be in minimal position")
    start = d.dart(other, par_edges[0], True)
    cycle = []
    x = start
    while True:
        f = d.face_of[x]
        pd = _parallel_darts(d, f, other)
        if len(pd) != 2 or x not in pd:
            raise InternalContradiction(f"face {f} has {len(pd)} parallel arcs of {other}")
        out = pd[0] if pd[1] == x else pd[1]
        cycle.append((f, out))
        x = out ^ 1
        if x == start:
            break
        if len(cycle) > 4 * d.n:
            raise InternalContradiction("region cycle does not close")
    c = CarryingCurve(d, role, tuple(cycle))
    if sorted(c.crossed_edges) != par_edges:
        raise InternalContradiction(
            f"region cycle misses parallel arcs: {len(cycle)} of {len(par_edges)} visited")
    return c


def _replace_alpha(c: CarryingCurve) -> TorusDiagram:
    d = c.host
    m = len(c.cycle)
    n = d.n
    # new vertex i is the crossing on beta edge e_i; it is entered from face f_i
    edge_to_label = {}
    signs = [0] * m
    for i, (f, x) in enumerate(c.cycle):
        edge_to_label[d.edge(x)] = i
        signs[i] = 1 if d.forward(x) else -1
    crossed = sorted(edge_to_label)
    new_beta = [edge_to_label[e] for e in crossed]

    def new_dart(b: int) -> int:
        # beta dart of d lying on an uncrossed edge -> beta dart of the result
        j = d.edge(b)
        if j in edge_to_label:
            raise ValueError("basepoint face is cut by the carrying curve")
        k = max((idx for idx, e in enumerate(crossed) if e < j), default=len(crossed) - 1)
        return 2 * m + 2 * k + (b % 2)

    def locate(face: int) -> int:
        for b in d.faces[face]:
            if not d.is_alpha(b) and d.edge(b) not in edge_to_label:
                return new_dart(b)
        # the face is cut: keep the basepoint on the side the curve leaves
        for b in d.faces[face]:
            if not d.is_alpha(b) and d.edge(b) in edge_to_label:
                return _half_dart(d, b, crossed, edge_to_label, m)
        raise ValueError("face has no beta arc")

    z, w = locate(d.z_face), locate(d.w_face)
    out = TorusDiagram(tuple(new_beta), tuple(signs), z, w)
    if is_simple(out):
        # no bigons to orient by: keep the algebraic intersection number
        if sum(out.sign) * sum(d.sign) < 0:
            out = reverse_orientations(out, alpha=True, beta=False)
    elif out.sink_bigon() is None:
        out = reverse_orientations(out, alpha=True, beta=False)
    return out


def _half_dart(d, b, crossed, edge_to_label, m):
    """Dart for the half of a cut beta edge that follows the crossing."""
    j = d.edge(b)
    k = crossed.index(j)
    if b % 2 == 0:
        return 2 * m + 2 * k
    return 2 * m + 2 * ((k - 1) % m) + 1


def replace_with_carrying(d: TorusDiagram, c: CarryingCurve, strict: bool = False) -> TorusDiagram:
    """Swap the carried curve for its carrying curve.

    The new curve is oriented so that the result again has one sink and one
    source bigon; a bigon-free result keeps the host's algebraic
    intersection number instead.  ``strict`` raises
    :class:`ResultSimple` for a bigon-free result instead of returning it.
    """
    if c.host is not d and c.host != d:
        raise ValueError("carrying curve was computed on another diagram")
    if c.replaced_role == ALPHA:
        out = _replace_alpha(c)
    else:
        sw = swap_curves(d)
        smap = swap_dart_map(d)
        cyc = tuple((sw.face_of[smap[d.faces[f][0]]], smap[x]) for f, x in c.cycle)
        out = swap_curves(_replace_alpha(CarryingCurve(sw, ALPHA, cyc)))
    rep = validate(out)
    if not rep.ok:
        raise InternalContradiction(f"carrying replacement is not a valid diagram: {rep.failures}")
    if is_simple(out) and strict:
        raise ResultSimple(f"replacing {c.replaced_role} gives a simple diagram")
    return out


@dataclass(frozen=True)
class HierarchyStep:
    before: TorusDiagram
    replaced_role: str
    after: TorusDiagram
    carrying: CarryingCurve

    def to_dict(self) -> dict:
        return {
            "before": str(to_tuple(self.before)),
            "replaced_role": self.replaced_role,
            "after": str(to_tuple(self.after)),
            "p_before": self.before.n,
            "p_after": self.after.n,
        }


@dataclass(frozen=True)
class Hierarchy:
    start: TorusDiagram
    steps: tuple[HierarchyStep, ...]
    terminal: TorusDiagram

    @property
    def levels(self) -> list[TorusDiagram]:
        return [self.start] + [s.after for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "schema": "sinkfree.hierarchy/1",
            "start": str(to_tuple(self.start)),
            "steps": [s.to_dict() for s in self.steps],
            "terminal": str(to_tuple(self.terminal)),
        }


def reduction_step(d: TorusDiagram, prefer: str = BETA) -> HierarchyStep:
    """One replacement.  Tries ``prefer`` first and falls back to the other
    curve when the preferred result has no bigons."""
    for role in (prefer, other_role(prefer)):
        c = carrying_curve(d, role)
        out = replace_with_carrying(d, c)
        if not is_simple(out):
            return HierarchyStep(d, role, out, c)
    raise InternalContradiction("both carrying replacements give simple diagrams")


def reduction_hierarchy(d: TorusDiagram, prefer: str = BETA) -> Hierarchy:
    """Replace curves by carrying curves until the diagram is primitive."""
    if is_simple(d):
        from .errors import SimpleDiagram
        raise SimpleDiagram()
    steps = []
    cur = d
    while not is_primitive(cur):
        st = reduction_step(cur, prefer)
        if st.after.n >= cur.n:
            raise InternalContradiction(f"p did not drop: {cur.n} -> {st.after.n}")
        steps.append(st)
        cur = st.after
        if len(steps) > d.n:
            raise InternalContradiction("hierarchy longer than p")
    return Hierarchy(d, tuple(steps), cur)
