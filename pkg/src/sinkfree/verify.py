"""Independent checker for certificates.

This module rebuilds a certificate from its input tuple using only the
diagram core (faces, darts, arc classes, isomorphism) and its own small
implementations of everything else: carrying curves, the delta diagram,
tube walks, sectors, safety reasons, lattice strands and the strand push.
It then compares field by field and reports the first place the given
certificate differs from the replay.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .diagram import (ALPHA, ArcClass, DiagramTuple, TorusDiagram, build_from_tuple, is_primitive,
                      is_simple, isomorphic, validate)

SCHEMA = "sinkfree.certificate/1"
NOTE_TEXT = [
    "lamination: the sink-disk-free branched surfaces fully carry a lamination; "
    "this conclusion is topological and not machine-verified",
    "three-dimensional steps (annulus attachment, horizontal boundary) appear only as "
    "provenance tags on the cut-open torus; not machine-verified",
]
TOP_ORDER = ("schema", "input", "hierarchy", "levels", "terminal", "summary", "notes", "state_hashes")


@dataclass(frozen=True)
class Divergence:
    path: str
    expected: object
    found: object
    note: str = ""

    def to_dict(self) -> dict:
        return {"path": self.path, "expected": self.expected, "found": self.found, "note": self.note}

    def __str__(self) -> str:
        msg = f"first divergence at {self.path}: expected {self.expected!r}, found {self.found!r}"
        return msg + (f" ({self.note})" if self.note else "")


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    divergence: Divergence | None = None

    def __bool__(self) -> bool:
        return self.ok


class _Stop(Exception):
    def __init__(self, path: str, note: str, expected=None, found=None):
        super().__init__(note)
        self.div = Divergence(path, expected, found, note)


def _sha(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _rec(d: TorusDiagram) -> dict:
    return {"beta": list(d.beta), "signs": list(d.sign), "z": d.z, "w": d.w}


# -- small combinatorics on the torus

def _flip(d: TorusDiagram) -> TorusDiagram:
    """Rename alpha to beta and back; vertices are renumbered along the old beta."""
    n = d.n
    pos = [0] * n
    for j, v in enumerate(d.beta):
        pos[v] = j
    signs = [0] * n
    for v in range(n):
        signs[pos[v]] = -d.sign[v]
    move = lambda x: x + 2 * n if x < 2 * n else x - 2 * n   # noqa: E731
    return TorusDiagram(tuple(pos), tuple(signs), move(d.z), move(d.w))


def _vertical_alpha_edges(d: TorusDiagram) -> list[int]:
    return [e for e in range(d.n) if d.arc_class(ALPHA, e) == ArcClass.PARALLEL]


def _delta_cycle(d: TorusDiagram) -> list[tuple[int, int]]:
    """Walk the faces holding two vertical alpha arcs; the curve parallel to
    beta runs through them.  Returns (face, alpha dart crossed out)."""
    vert = set(_vertical_alpha_edges(d))
    if not vert:
        raise ValueError("no vertical alpha arcs")
    first = 2 * min(vert)
    out, x = [], first
    for _ in range(4 * d.n + 1):
        f = d.face_of[x]
        mine = [y for y in d.faces[f] if d.is_alpha(y) and (y >> 1) in vert]
        if len(mine) != 2 or x not in mine:
            raise ValueError(f"face {f} does not carry the parallel curve")
        y = mine[1] if mine[0] == x else mine[0]
        out.append((f, y))
        x = y ^ 1
        if x == first:
            if sorted(d.edge(y) for _, y in out) != sorted(vert):
                raise ValueError("parallel curve misses vertical arcs")
            return out
    raise ValueError("parallel curve does not close")


def _delta_candidates(d: TorusDiagram, cyc) -> tuple[list[int], list[TorusDiagram]]:
    par = sorted(d.edge(y) for _, y in cyc)
    m = len(par)
    idx = {e: k for k, e in enumerate(par)}
    seq = [idx[d.edge(y)] for _, y in cyc]
    sg = [0] * m
    for _, y in cyc:
        sg[idx[d.edge(y)]] = 1 if y % 2 else -1

    def place(face):
        y = next(x for x in d.faces[face] if d.is_alpha(x))
        lower = [k for k in range(m) if par[k] < d.edge(y)]
        return 2 * (lower[-1] if lower else m - 1) + y % 2

    z, w = place(d.z_face), place(d.w_face)
    out = [TorusDiagram(tuple(seq), tuple(sg), z, w),
           TorusDiagram(tuple(seq[::-1]), tuple(-x for x in sg), z, w)]
    return par, out


def _bigon_of(d: TorusDiagram, forward: bool):
    got = [f for f, ds in enumerate(d.faces) if len(ds) == 2 and all(d.forward(x) == forward for x in ds)]
    return got[0] if len(got) == 1 else None


def _oriented(cands):
    good = [c for c in cands if _bigon_of(c, True) is not None and _bigon_of(c, False) is not None]
    return good


def _replace(level: TorusDiagram, role: str):
    """Replace ``role`` by its carrying curve: (diagram or None if simple)."""
    host = level if role != ALPHA else _flip(level)
    par, cands = _delta_candidates(host, _delta_cycle(host))
    good = _oriented(cands)
    if not good:
        return None
    if len(good) != 1:
        raise ValueError("both orientations of delta have bigons")
    return good[0] if role != ALPHA else _flip(good[0])


# -- shadows: faces, sectors, reasons

class _Shadow:
    def __init__(self, d, removed, punctured, frozen, pushed=(), extra=()):
        self.d = d
        self.removed = frozenset(removed)
        self.punctured = frozenset(punctured)
        self.frozen = frozenset(frozen)
        self.pushed = frozenset(pushed)
        self.extra = list(extra)       # (ref, face)
        comp = {f: {f} for f in range(len(d.faces))}
        for e in sorted(self.pushed):
            a, b = comp[d.face_of[2 * e]], comp[d.face_of[2 * e + 1]]
            if a is not b:
                a |= b
                for f in b:
                    comp[f] = a
        self.sec = {f: min(c) for f, c in comp.items()}
        self.members = {}
        for f, s in self.sec.items():
            self.members.setdefault(s, set()).add(f)

    def live(self, x: int) -> bool:
        return (x >> 1) not in self.frozen and (x >> 1) not in self.pushed

    def border(self, s: int) -> list[int]:
        return [x for f in sorted(self.members[s]) for x in self.d.faces[f] if (x >> 1) not in self.pushed]

    def disk(self, s: int) -> bool:
        fs = self.members[s]
        inner = sum(1 for e in self.pushed if self.d.face_of[2 * e] in fs)
        return len(fs) - inner == 1 and not (fs & self.punctured)

    def frozen_side(self, s: int) -> bool:
        return any((x >> 1) in self.frozen for x in self.border(s))

    def sink_disk(self, s: int) -> bool:
        if self.members[s] & self.removed or not self.disk(s) or self.frozen_side(s):
            return False
        return all(x % 2 == 0 for x in self.border(s) if self.live(x))

    def corner(self, v: int) -> int:
        rot = self.d.rotation(v)
        hit = [rot[i] for i in range(4) if rot[i] % 2 == 0 and rot[(i + 1) % 4] % 2 == 1]
        if len(hit) != 1:
            raise ValueError(f"vertex {v} has {len(hit)} sink corners")
        return self.d.face_of[hit[0]]

    def points(self) -> list[list]:
        out = [[f"v{v}", v, self.sec[self.corner(v)]] for v in range(self.d.n)
               if all(self.live(x) for x in self.d.rotation(v))]
        return out + [[ref, None, self.sec[f]] for ref, f in self.extra]

    def state(self) -> dict:
        return {"diagram": _rec(self.d), "removed": sorted(self.removed), "punctured": sorted(self.punctured),
                "frozen": sorted(self.frozen), "pushed": sorted(self.pushed), "points": self.points()}

    def sink_disks(self) -> list[int]:
        return sorted(s for s in self.members if self.sink_disk(s))

    def reason(self, s: int):
        d = self.d
        if not self.disk(s) or self.members[s] & self.removed:
            return "annulus_corner"
        bdry = [x for x in self.border(s) if not d.is_alpha(x) and self.live(x)]
        vert = [x for x in bdry if d.dart_class(x) == ArcClass.PARALLEL]
        if _mixed(vert, lambda x: d.sign[d.beta[d.edge(x)]]):
            return "vertical_pair"
        rain = [x for x in bdry if d.dart_class(x) != ArcClass.PARALLEL]
        if _mixed(rain, lambda x: _turn(d, x >> 1)):
            return "rainbow_pair"
        if self.frozen_side(s):
            return "outward_provenance"
        return None

    def table(self, skip_vertices: bool = False) -> list[dict]:
        out = []
        for ref, v, s in self.points():
            if skip_vertices and v is not None:
                continue
            out.append({"ref": ref, "vertex": v, "sink_corner": s, "reason": self.reason(s)})
        return out


def _mixed(darts, key) -> bool:
    seen = {}
    for x in darts:
        seen.setdefault(key(x), set()).add(x % 2)
    return any(len(v) == 2 for v in seen.values())


def _turn(d: TorusDiagram, e: int) -> int:
    """+1 if the rainbow beta edge ``e`` (edge id) cuts off its disk on the left."""
    x = 2 * e

    def sides(f0):
        seen, todo = {f0}, [f0]
        while todo:
            f = todo.pop()
            for y in d.faces[f]:
                if d.is_alpha(y) or (y >> 1) == e:
                    continue
                g = d.face_of[y ^ 1]
                if g not in seen:
                    seen.add(g)
                    todo.append(g)
        return {y % 2 for f in seen for y in d.faces[f] if d.is_alpha(y)}

    left, right = sides(d.face_of[x]), sides(d.face_of[x ^ 1])
    if len(left) == 1 and len(right) == 2:
        return 1
    if len(right) == 1 and len(left) == 2:
        return -1
    raise ValueError(f"rainbow edge {e} does not cut off a disk")


def _tube(d: TorusDiagram):
    """Beta sink tube: faces from the sink bigon across alpha rungs to a
    polygon, with the beta edges on either side."""
    big = _bigon_of(d, True)
    x = next(y for y in d.faces[big] if d.is_alpha(y))
    faces = [big]
    u, v = d.tail(x), d.head(x)
    su, sv = [], []
    while True:
        f = d.face_of[x ^ 1]
        faces.append(f)
        ds = d.faces[f]
        if len(ds) != 4:
            break
        rung = [y for y in ds if d.is_alpha(y) and y != x ^ 1]
        for y in ds:
            if d.is_alpha(y):
                continue
            a, b = d.tail(y), d.head(y)
            if u in (a, b):
                su.append(y >> 1)
                nu = b if a == u else a
            else:
                sv.append(y >> 1)
                nv = b if a == v else a
        u, v = nu, nv
        x = rung[0]
        if len(faces) > len(d.faces):
            raise ValueError("tube does not end")
    return faces, su, sv


# -- lattice strands

_CLASS = {(0, 0): "c", (1, 0): "b", (1, 1): "a", (0, 1): "d"}


def _cls(x: int, y: int) -> str:
    return _CLASS[(x % 2, y % 2)]


def _segment(p: int, q: int):
    """The straight strand p/q: start, end and its frame crossings in order,
    each (time, edge, position)."""
    x0 = 1 if p % 2 and q % 2 else 0
    hits = [(Fraction(k, q), "ab" if (x0 + k) % 2 else "cd", (x0 + k, Fraction(k * p, q))) for k in range(1, q)]
    hits += [(Fraction(j, p), "da" if j % 2 else "bc", (x0 + Fraction(j * q, p), j)) for j in range(1, p)]
    hits.sort(key=lambda h: h[0])
    return (x0, 0), (x0 + q, p), hits


def _ab_ranks(p: int, q: int) -> tuple[int, ...]:
    """Walking from d, the rank of each crossing with ab by distance to a."""
    start, end, hits = _segment(p, q)
    if _cls(*end) != "d":
        raise ValueError(f"{p}/{q} does not end at d")
    ys = [abs(pt[1] % 2 - 1) for _, e, pt in reversed(hits) if e == "ab"]
    order = sorted(ys)
    return tuple(order.index(y) for y in ys)


def _word_from_d(p: int, q: int):
    start, end, hits = _segment(p, q)
    edges = [e for _, e, _ in reversed(hits)]
    return "d", edges, _cls(*start)


def _ends(p: int, q: int) -> list[str]:
    if p % 2 and q % 2 == 0:
        return ["c", "d"]
    if p % 2 and q % 2:
        return ["b", "d"]
    return ["b", "c"]


def _strand(p, q, tails) -> dict:
    return {"p": p, "q": q, "endpoints": _ends(p, q), "anchor": True, "tails": tails}


def _lattice_push(p: int, q: int):
    """The sink tube push of the straight strand p/q."""
    start, end, hits = _segment(p, q)
    ends = {_cls(*start), _cls(*end)}
    free = ({"b", "c", "d"} - ends).pop()
    times = [h[0] for h in hits]

    def near(kind):
        got = []
        for x in range(start[0] + 1, end[0]):
            for off in (1, -1):
                num = p * (x - start[0]) + off
                if num % q or not 0 < num // q < p:
                    continue
                y = num // q
                if _cls(x, y) == kind:
                    t = min(Fraction(x - start[0], q), Fraction(y, p))
                    got.append(((x, y), sum(1 for u in times if u <= t)))
        if len(got) != 1:
            raise ValueError(f"{len(got)} corners of class {kind} next to {p}/{q}")
        return got[0]

    yq, jq = near(free)
    _, jr = near("a")
    last = len(times)
    half = Fraction(1, 2)
    if jq < jr:
        pp, ss = start, end
        d_pq, d_rs = jq + half, (last - jr) + half
    else:
        pp, ss = end, start
        d_pq, d_rs = (last - jq) + half, jr + half
    if d_pq != d_rs:
        raise ValueError(f"unbalanced push of {p}/{q}")
    return {"p": abs(yq[1] - ss[1]), "q": abs(yq[0] - ss[0]), "free": free, "P": _cls(*pp),
            "S": _cls(*ss), "d_pq": d_pq, "d_qr": Fraction(abs(jq - jr))}


# -- replay

def _level(i: int, level: TorusDiagram, role: str) -> dict:
    host = level if role != ALPHA else _flip(level)
    n = host.n
    cyc = _delta_cycle(host)
    par, cands = _delta_candidates(host, cyc)
    good = _oriented(cands)
    if len(good) != 1:
        raise ValueError("delta has no orientation with a sink and a source bigon")
    nd = good[0]
    m = len(par)
    sb = _bigon_of(nd, False)
    k = nd.edge(next(x for x in nd.faces[sb] if nd.is_alpha(x)))
    seg, v = [], (par[k] + 1) % n
    while True:
        seg.append(v)
        if v == par[(k + 1) % m]:
            break
        v = (v + 1) % n
    at = {v: i2 for i2, v in enumerate(seg)}
    chords = [n + j for j in range(n) if host.beta[j] in at and host.beta[(j + 1) % n] in at]
    chords.sort(key=lambda e: abs(at[host.beta[e - n]] - at[host.beta[(e - n + 1) % n]]))
    sink, src = _bigon_of(host, True), _bigon_of(host, False)
    src_arc = next(x >> 1 for x in host.faces[src] if not host.is_alpha(x))
    sink_arc = next(x >> 1 for x in host.faces[sink] if not host.is_alpha(x))
    dfaces = sorted({f for f, _ in cyc})
    frozen = {x >> 1 for x in host.faces[src]}
    pinch = [("M", host.face_of[2 * par[k]]), ("N", host.face_of[2 * par[(k + 1) % m]])]
    base = _Shadow(host, [src], {sink, *dfaces}, frozen)
    rec = {
        "level": i, "replaced_role": role,
        "model": {
            "swapped": role == ALPHA, "delta_crossed_alpha_edges": par, "delta": _rec(nd),
            "segment_edge": k, "segment": seg, "chords": chords, "source_arc": src_arc,
            "sink_arc": sink_arc, "delta_faces": dfaces,
            "pinch": [{"ref": r, "vertex": None, "sink_corner": base.sec[f]} for r, f in pinch],
        },
    }
    hashes = {"host": _sha(_rec(host)), "sigma_plus": _sha(base.state())}
    if len(chords) == 1:
        sh = _Shadow(host, [src], {sink, *dfaces}, frozen, extra=pinch)
        rec.update(status="trivially_safe", push=None, collapse=None, descent=None,
                   safety=_checked(sh.table(skip_vertices=True)), hashes=hashes)
        return rec
    faces, su, sv = _tube(host)
    if src_arc in su:
        su, sv = sv, su
    elif src_arc not in sv:
        raise ValueError("the source arc is on neither side of the tube")
    swept = faces[1:-1]
    if set(su) & frozen or set(swept) & set(dfaces) or set(swept) & {sink}:
        raise ValueError("the push moves a frozen arc or crosses delta")
    after = _Shadow(host, [src], {sink, *dfaces}, frozen, su,
                    pinch + [("X_s", faces[0]), ("X_delta", faces[-1])])
    order = [n + (sink_arc - n + t) % n for t in range(n)]
    rest = [e for e in order if e not in set(su) | set(sv) | {sink_arc}]
    pattern = [[_interval(host, 2 * host.beta[e - n]), host.sign[host.beta[e - n]]] for e in rest[1:]]
    dpat = [[_interval(host, 2 * host.edge(y) + 1), 1 if y % 2 else -1] for _, y in cyc]
    if not _same_cycle(pattern, dpat):
        raise ValueError("beta_delta and delta meet alpha differently")
    end = "b" if len(chords) % 2 else "c"
    push = {
        "move": {"pushed": su, "target": sv, "end_faces": [faces[0], faces[-1]],
                 "labels": ["X_s", "X_delta"], "swept": swept},
        "beta_s": [sink_arc], "beta_c": sv, "beta_delta": rest, "delta_end": end,
        "delta_pattern": pattern, "safety": after.table(),
    }
    # collapse
    nest = {e: t for t, e in enumerate(chords)}
    on_c = [e for e in sv if e in nest]
    ranks = sorted(nest[e] for e in on_c)
    order_c = tuple(ranks.index(nest[e]) for e in on_c)
    q = 2 * len(on_c) + (1 if end == "b" else 0)
    ps = [p for p in range(1, q + 1, 2) if gcd(p, q) == 1 and _ab_ranks(p, q) == order_c]
    if len(ps) != 1:
        raise ValueError(f"{len(ps)} slopes match the crossing order {order_c}")
    p = ps[0]
    if sorted(_ends(p, q)) != sorted(["d", end]):
        raise ValueError("strand endpoints contradict parity")
    s0, edges, s1 = _word_from_d(p, q)
    abx = [t for t, e in enumerate(edges) if e == "ab"]
    pairs = [{"chord": e, "Q": host.beta[e - n], "R": host.beta[(e - n + 1) % n], "crossing": t}
             for e, t in zip(on_c, abx)]
    anchor = [x for x in pairs if x["chord"] == src_arc]
    record = {
        "circles": {"sink_puncture": "d", "delta_cusp": "b", "delta_boundary": "c"},
        "source_alpha_midpoint": "a",
        "bigon_to_arc": {"alpha_edge": k, "segment": seg, "arc": "ab"},
        "loops": {"beta_s": "d", "beta_delta": end},
        "pairs": pairs, "anchor": anchor[0] if anchor else None,
        "word": f"{s0}[{' '.join(edges)}]{s1}",
    }
    audit = {
        "basepoints_bijective": True,
        "loops_on_circles": True,
        "pairs_cover_crossings": len(pairs) == len(abx) == len(on_c),
        "anchor_nearest_a": bool(anchor) and order_c.index(0) == on_c.index(src_arc),
        "endpoints_match_parity": True,
    }
    inside = _delta_bigon(host, src, set(dfaces))
    gone = inside | set(dfaces) | {sink, src}
    sphere = _Shadow(host, [src], {sink, *dfaces} | gone, frozen, su, after.extra)
    before_disks, after_disks = after.sink_disks(), sphere.sink_disks()
    if before_disks != after_disks or not all(audit.values()):
        raise ValueError("the collapse is not sound")
    # descent
    chain, steps = [_strand(p, q, 0)], []
    cp, cq, tails = p, q, 0
    while cp >= 2 and cq >= 2:
        r = _lattice_push(cp, cq)
        if r["p"] + r["q"] >= cp + cq or gcd(r["p"], r["q"]) != 1:
            raise ValueError(f"push of {cp}/{cq} does not shrink")
        if sorted(_ends(r["p"], r["q"])) != sorted([r["free"], r["S"]]):
            raise ValueError("pushed strand ends contradict parity")
        if r["q"] < 2:
            raise ValueError("the anchor was lost")
        steps.append({"before": f"{cp}/{cq}", "after": f"{r['p']}/{r['q']}",
                      "endpoints": _ends(r["p"], r["q"]), "loop_collapsed_at": r["free"],
                      "P": r["P"], "S": r["S"], "d_pq": str(r["d_pq"]), "d_qr": str(r["d_qr"]),
                      "reasons": [["X_q", "outward_provenance"], ["X_p", "outward_provenance"]]})
        cp, cq, tails = r["p"], r["q"], tails + 1
        chain.append(_strand(cp, cq, tails))
    if cp != 1:
        raise ValueError(f"descent ended at {cp}/{cq}")
    x0 = 1 if cq % 2 else 0
    term = [{"index": t, "edge": "ab" if (x0 + t + 1) % 2 else "cd", "reason": "single_direction"}
            for t in range(cq - 1)]
    rec.update(
        status="pushed", push=push,
        collapse={"strand": chain[0], "record": record, "audit": audit,
                  "sink_disks_before": before_disks, "sink_disks_after": after_disks},
        descent={"chain": [f"{c['p']}/{c['q']}" for c in chain], "steps": steps, "terminal": term},
        safety=_checked([x for x in after.table() if x["vertex"] is None]),
    )
    hashes.update(pushed=_sha(after.state()), sphere=_sha(sphere.state()), descent=[_sha(c) for c in chain])
    rec["hashes"] = hashes
    return rec


def _checked(table: list[dict]) -> list[dict]:
    for x in table:
        if x["reason"] is None:
            raise ValueError(f"double point {x['ref']} is unsafe")
    return table


def _interval(d: TorusDiagram, pos2: int) -> int:
    ez = next(x >> 1 for x in d.faces[d.z_face] if d.is_alpha(x))
    ew = next(x >> 1 for x in d.faces[d.w_face] if d.is_alpha(x))
    a, b, size = 2 * ez + 1, 2 * ew + 1, 2 * d.n
    return 0 if 0 < (pos2 - a) % size < (b - a) % size else 1


def _same_cycle(a, b) -> bool:
    a = [tuple(x) for x in a]
    b = [tuple(x) for x in b]
    if len(a) != len(b):
        return False
    opts = [a, a[::-1], [(g, -s) for g, s in a], [(g, -s) for g, s in a[::-1]]]
    return any(o == b[i:] + b[:i] for o in opts for i in range(len(b)))


def _delta_bigon(d: TorusDiagram, start: int, cut: set) -> set:
    seen, todo = {start}, [start]
    while todo:
        f = todo.pop()
        if f in cut:
            continue
        for y in d.faces[f]:
            if d.is_alpha(y):
                continue
            g = d.face_of[y ^ 1]
            if g not in seen:
                seen.add(g)
                todo.append(g)
    return seen


def _terminal(d: TorusDiagram) -> dict:
    sink, src = _bigon_of(d, True), _bigon_of(d, False)
    frozen = {x >> 1 for x in d.faces[src]}
    before = _Shadow(d, [src], [sink], frozen)
    disks = before.sink_disks()
    faces, su, sv = _tube(d)
    if len(faces) <= 2:
        after, move = before, None
    else:
        src_arc = next(x >> 1 for x in d.faces[src] if not d.is_alpha(x))
        if src_arc in su:
            su, sv = sv, su
        elif src_arc not in sv:
            raise ValueError("the source arc is on neither side of the tube")
        if set(su) & frozen or sink in faces[1:-1]:
            raise ValueError("the base push moves a frozen arc or crosses the puncture")
        after = _Shadow(d, [src], [sink], frozen, su, [("X1", faces[0]), ("X2", faces[-1])])
        move = {"pushed": su, "target": sv, "end_faces": [faces[0], faces[-1]],
                "labels": ["X1", "X2"], "swept": faces[1:-1]}
    return {"pushed": move is not None, "move": move, "sink_disks_before": disks,
            "sink_disks_after": after.sink_disks(), "safety": _checked(after.table()),
            "hashes": {"shadow": _sha(before.state()), "pushed": _sha(after.state())}}


def _diagram_at(path: str, rec) -> TorusDiagram:
    try:
        d = TorusDiagram(tuple(rec["beta"]), tuple(rec["signs"]), rec["z"], rec["w"])
    except Exception as exc:    # any malformed field is a divergence
        raise _Stop(path, f"not a diagram: {exc}") from None
    if _rec(d) != rec:
        raise _Stop(path, "diagram is not in normal form", _rec(d), rec)
    return d


def replay(cert: dict) -> dict:
    """The certificate this module derives from ``cert['input']`` and the
    recorded hierarchy diagrams."""
    try:
        t = DiagramTuple.parse(cert.get("input"))
        d0 = build_from_tuple(t)
    except Exception as exc:
        raise _Stop("input", f"unreadable tuple: {exc}", None, cert.get("input")) from None
    if not validate(d0).ok or is_simple(d0):
        raise _Stop("input", "input tuple is invalid or simple", None, cert.get("input"))
    hier = cert.get("hierarchy")
    if not isinstance(hier, list) or not hier:
        raise _Stop("hierarchy", "missing hierarchy")
    levels = [d0]
    roles = []
    exp_h = [{"level": 0, "diagram": _rec(d0), "replaced_role": None}]
    cur = d0
    i = 0
    while not is_primitive(cur):
        try:
            nb = _replace(cur, "beta")
            role, nxt = ("beta", nb) if nb is not None else ("alpha", _replace(cur, ALPHA))
        except ValueError as exc:
            raise _Stop(f"hierarchy[{i}]", f"carrying replacement failed: {exc}") from None
        if nxt is None or is_simple(nxt) or nxt.n >= cur.n:
            raise _Stop(f"hierarchy[{i}]", "no valid replacement")
        exp_h[-1]["replaced_role"] = role
        path = f"hierarchy[{i + 1}].diagram"
        if i + 1 >= len(hier) or not isinstance(hier[i + 1], dict):
            raise _Stop(f"hierarchy[{i + 1}]", "hierarchy is too short", _rec(nxt), None)
        got = _diagram_at(path, hier[i + 1].get("diagram"))
        if not isomorphic(got, nxt):
            raise _Stop(path, "not the carrying replacement of the previous level", _rec(nxt), _rec(got))
        exp_h.append({"level": i + 1, "diagram": _rec(got), "replaced_role": None})
        roles.append(role)
        levels.append(got)
        cur = got
        i += 1
        if i > d0.n:
            raise _Stop("hierarchy", "hierarchy does not end")
    lv = []
    for j, role in enumerate(roles):
        try:
            lv.append(_level(j, levels[j], role))
        except ValueError as exc:
            raise _Stop(f"levels[{j}]", f"replay failed: {exc}") from None
    try:
        term = _terminal(cur)
    except ValueError as exc:
        raise _Stop("terminal", f"replay failed: {exc}") from None
    checked = len(term["safety"])
    descents = []
    for x in lv:
        checked += len(x["safety"])
        if x["descent"]:
            checked += 2 * len(x["descent"]["steps"]) + len(x["descent"]["terminal"])
            descents.append(" -> ".join(x["descent"]["chain"]))
    out = {
        "schema": SCHEMA, "input": str(t), "hierarchy": exp_h, "levels": lv, "terminal": term,
        "summary": {"hierarchy_length": len(roles), "descents": descents,
                    "double_points_checked": checked, "all_safe": True},
        "notes": list(NOTE_TEXT),
    }
    hs = [_sha(x["diagram"]) for x in exp_h]
    for x in lv:
        h = x["hashes"]
        hs += [h["host"], h["sigma_plus"]]
        if "pushed" in h:
            hs += [h["pushed"], h["sphere"], *h["descent"]]
    out["state_hashes"] = hs + [term["hashes"]["shadow"], term["hashes"]["pushed"]]
    return out


def _compare(exp, got, path: str):
    if isinstance(exp, dict):
        if not isinstance(got, dict):
            return Divergence(path, "object", type(got).__name__)
        keys = [k for k in TOP_ORDER if k in exp] if path == "" else sorted(exp)
        for k in keys:
            sub = f"{path}.{k}" if path else k
            if k not in got:
                return Divergence(sub, exp[k], None, "missing field")
            r = _compare(exp[k], got[k], sub)
            if r:
                return r
        extra = sorted(set(got) - set(exp))
        if extra:
            k = extra[0]
            return Divergence(f"{path}.{k}" if path else k, None, got[k], "unexpected field")
        return None
    if isinstance(exp, list):
        if not isinstance(got, list):
            return Divergence(path, "list", got)
        for k, (a, b) in enumerate(zip(exp, got)):
            r = _compare(a, b, f"{path}[{k}]")
            if r:
                return r
        if len(exp) != len(got):
            return Divergence(path, len(exp), len(got), "length differs")
        return None
    if type(exp) is not type(got) or exp != got:
        return Divergence(path, exp, got)
    return None


def verify_certificate(cert) -> VerifyResult:
    """True iff replaying the certificate reproduces every recorded field."""
    if hasattr(cert, "data"):
        cert = cert.data
    if isinstance(cert, str):
        try:
            cert = json.loads(cert)
        except ValueError as exc:
            return VerifyResult(False, Divergence("", None, None, f"not JSON: {exc}"))
    if not isinstance(cert, dict):
        return VerifyResult(False, Divergence("", "object", type(cert).__name__))
    if cert.get("schema") != SCHEMA:
        return VerifyResult(False, Divergence("schema", SCHEMA, cert.get("schema")))
    try:
        exp = replay(cert)
    except _Stop as stop:
        return VerifyResult(False, stop.div)
    div = _compare(exp, cert, "")
    return VerifyResult(div is None, div)


def _as_fraction(x) -> tuple[int, int]:
    if isinstance(x, str):
        a, _, b = x.partition("/")
        return int(a), int(b)
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if hasattr(x, "p") and hasattr(x, "q"):
        return x.p, x.q
    p, q = x
    return int(p), int(q)


def verify_descent(chain) -> VerifyResult:
    """Replay a strand descent step by step on the lattice.

    Each entry must be the push of the one before it, complexity must drop
    and stay coprime, and the chain must stop exactly at p = 1."""
    try:
        pts = [_as_fraction(x) for x in chain]
    except (ValueError, TypeError) as exc:
        return VerifyResult(False, Divergence("chain", None, list(chain), f"unreadable strand: {exc}"))
    if not pts:
        return VerifyResult(False, Divergence("chain", None, [], "empty chain"))
    for k, (p, q) in enumerate(pts):
        if p < 1 or q < 1 or gcd(p, q) != 1:
            return VerifyResult(False, Divergence(f"chain[{k}]", "coprime positive pair", f"{p}/{q}"))
    for k in range(len(pts) - 1):
        p, q = pts[k]
        if p == 1:
            return VerifyResult(False, Divergence(f"chain[{k + 1}]", None, f"{pts[k + 1][0]}/{pts[k + 1][1]}",
                                                  "descent continues past p = 1"))
        try:
            nxt = _lattice_push(p, q)
        except ValueError as exc:
            return VerifyResult(False, Divergence(f"chain[{k}]", None, f"{p}/{q}", f"push failed: {exc}"))
        want = (nxt["p"], nxt["q"])
        if sum(want) >= p + q:
            return VerifyResult(False, Divergence(f"chain[{k + 1}]", f"< {p + q}", sum(want),
                                                  "complexity does not drop"))
        if pts[k + 1] != want:
            return VerifyResult(False, Divergence(f"chain[{k + 1}]", f"{want[0]}/{want[1]}",
                                                  f"{pts[k + 1][0]}/{pts[k + 1][1]}",
                                                  f"not the push of {p}/{q}"))
    if pts[-1][0] != 1:
        p, q = pts[-1]
        return VerifyResult(False, Divergence(f"chain[{len(pts)}]", "p = 1", f"{p}/{q}", "descent stops early"))
    return VerifyResult(True)
