"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line,
and the lines are repeated in the terminal summary."""
import copy
import json
import random
import re
import time
from functools import cache
from math import gcd

from sinkfree.billiard import billiard_oracle
from sinkfree.certify import certify
from sinkfree.diagram import (ALPHA, BETA, ROLES, ArcClass, DiagramTuple, FaceClass, build_from_tuple,
                              census, involution_map, is_primitive, is_simple, primitive_twists,
                              validate, valid_tuples)
from sinkfree.errors import DisconnectedBeta, InvalidTuple
from sinkfree.reduction import reduction_hierarchy
from sinkfree.shadow import (polygon_arc_classes, primitive_push, sink_disk_scan, sink_disk_scan_all,
                             sink_sectors, sink_tube, source_tube)
from sinkfree.strand import Strand, descent, endpoints_from_parity, strand_sink_tube_push
from sinkfree.verify import verify_certificate


@cache
def valid_30() -> tuple[DiagramTuple, ...]:
    """Every tuple with p <= 30 that builds a valid diagram."""
    return tuple(t for t in valid_tuples(30) if validate(build_from_tuple(t)).ok)


def nonsimple_30() -> list[DiagramTuple]:
    return [t for t in valid_30() if t.q >= 1]


@cache
def random_40(n: int = 500, seed: int = 40) -> tuple[DiagramTuple, ...]:
    """Distinct random valid non-simple tuples with p <= 40."""
    rng = random.Random(seed)
    out: dict[str, DiagramTuple] = {}
    while len(out) < n:
        p = rng.randint(3, 40)
        q = rng.randint(1, (p - 1) // 2)
        r = rng.randint(0, p - 2 * q)
        t = DiagramTuple(p, q, r, rng.randrange(p))
        try:
            d = build_from_tuple(t)
        except (DisconnectedBeta, InvalidTuple):
            continue
        if validate(d).ok and not is_simple(d):
            out[str(t)] = t
    return tuple(out.values())


def test_descent_chain_5_18(report):
    t0 = time.perf_counter()
    chain = [str(s) for s in descent(Strand(5, 18))]
    dt = time.perf_counter() - t0
    ok = chain == ["5/18", "3/11", "2/7", "1/4"] and dt < 1.0
    report("descent(5/18) = [5/18, 3/11, 2/7, 1/4]", ok, f"{' -> '.join(chain)}, {dt:.3f}s")
    assert ok


def test_pipeline_23_11_1_7(report):
    t0 = time.perf_counter()
    cert = certify("23,11,1,7")
    dt = time.perf_counter() - t0
    strand = cert.data["levels"][0]["collapse"]["strand"]
    ok = (strand["p"], strand["q"]) == (1, 4) and strand["endpoints"] == ["c", "d"]
    ok = ok and endpoints_from_parity(1, 4) == frozenset("cd") and dt < 1.0
    report("certify(23,11,1,7) level 0 collapses to 1/4 with endpoints {c,d}", ok,
           f"{strand['p']}/{strand['q']} {strand['endpoints']}, {dt:.3f}s")
    assert ok


def test_strand_push_equals_billiard_oracle(report):
    t0 = time.perf_counter()
    pairs = [(p, q) for p in range(2, 51) for q in range(2, 51) if gcd(p, q) == 1]
    bad = []
    for p, q in pairs:
        cur = Strand(p, q)
        while cur.p >= 2 and cur.q >= 2:
            a, b = strand_sink_tube_push(cur), billiard_oracle(cur)
            nxt = a.after
            if (a.to_dict() != b.to_dict() or nxt != b.after or nxt.p + nxt.q >= cur.p + cur.q
                    or gcd(nxt.p, nxt.q) != 1):
                bad.append(str(cur))
                break
            cur = nxt
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report("strand_sink_tube_push equals billiard_oracle on every coprime pair 2 <= p,q <= 50", ok,
           f"{len(pairs)} ordered pairs, {len(bad)} mismatches, {dt:.1f}s")
    assert ok, bad[:10]


def test_primitive_push_leaves_no_sink_disk(report):
    t0 = time.perf_counter()
    n, bad = 0, []
    for t in nonsimple_30():
        d = build_from_tuple(t)
        if not is_primitive(d):
            continue
        n += 1
        run = primitive_push(d)
        corner = sink_disk_scan(run.after)
        every = sink_disk_scan_all(run.after)
        if corner or every != corner or not run.all_safe or not run.table:
            bad.append(str(t))
    dt = time.perf_counter() - t0
    ok = n > 0 and not bad and dt < 300
    report("primitive p <= 30: no sink disk after the push, every double point safe, "
           "exhaustive scan agrees with corner scan", ok, f"{n} tuples, {len(bad)} failures, {dt:.1f}s")
    assert ok, bad[:10]


def test_hierarchy_laws(report):
    bad = []
    for t in random_40():
        d = build_from_tuple(t)
        try:
            h = reduction_hierarchy(d, BETA)
        except Exception as exc:
            bad.append(f"{t}: {exc}")
            continue
        lv = h.levels
        if any(b.n >= a.n for a, b in zip(lv, lv[1:])):
            bad.append(f"{t}: p does not drop")
        if any(not validate(x).ok or is_simple(x) for x in lv):
            bad.append(f"{t}: a level is not reduced or is simple")
        if not is_primitive(h.terminal) or any(is_primitive(x) for x in lv[:-1]):
            bad.append(f"{t}: terminal level is wrong")
    ok = not bad
    report("hierarchy laws on 500 random non-simple tuples p <= 40", ok, f"{len(bad)} failures")
    assert ok, bad[:10]


def _structure_failures(d) -> list[str]:
    out = []
    if d.n - 2 * d.n + len(d.faces) != 0:
        out.append("euler")
    if is_simple(d):
        return out
    if census(d).bigons != 2 or any(d.basepoints_in(f) != 1 for f in d.bigons):
        out.append("bigons")
    if (len(d.faces_of_class(FaceClass.SINK_BIGON)) != 1
            or len(d.faces_of_class(FaceClass.SOURCE_BIGON)) != 1):
        out.append("bigon classes")
    pc = polygon_arc_classes(d, ALPHA)
    if pc[ArcClass.SINK] != 1 or pc[ArcClass.SOURCE] != 1:
        out.append("polygon alpha arcs")
    for role in ROLES:
        if not set(sink_sectors(d, role)) <= set(sink_tube(d, role).faces):
            out.append(f"{role} sink tube")
        if not set(sink_sectors(d, role, ArcClass.SOURCE)) <= set(source_tube(d, role).faces):
            out.append(f"{role} source tube")
    h = involution_map(d)
    if h.face_image(d, d.sink_bigon()) != d.source_bigon():
        out.append("involution on bigons")
    for role in ROLES:
        if [h.face_image(d, f) for f in sink_tube(d, role).faces] != list(source_tube(d, role).faces):
            out.append(f"involution on {role} tube")
    img = sorted(h.face_image(d, f) for f in sink_sectors(d, BETA))
    if img != sink_sectors(d, BETA, ArcClass.SOURCE):
        out.append("involution on sectors")
    return out


def test_structural_invariants(report):
    bad = []
    ts = valid_30()
    for t in ts:
        f = _structure_failures(build_from_tuple(t))
        if f:
            bad.append(f"{t}: {f}")
    ok = not bad
    report("structural invariants on every valid tuple p <= 30", ok, f"{len(ts)} tuples, {len(bad)} failures")
    assert ok, bad[:10]


def test_primitive_twist_matches_exhaustive_search(report):
    bad, n = [], 0
    for p in range(3, 31):
        for q in range(1, (p - 1) // 2 + 1):
            for r in range(0, p - 2 * q + 1):
                n += 1
                found: dict[int, set] = {}
                for s in range(p):
                    try:
                        d = build_from_tuple(DiagramTuple(p, q, r, s))
                    except (DisconnectedBeta, InvalidTuple):
                        continue
                    if validate(d).ok and not is_simple(d) and is_primitive(d):
                        found.setdefault(1 if sum(d.sign) > 0 else -1, set()).add(s)
                got = {k: {v} for k, v in primitive_twists(p, q, r).items()}
                if got != found:
                    bad.append(f"({p},{q},{r}): {got} vs {found}")
    ok = not bad
    report("primitive_twist agrees with exhaustive search over s for p <= 30", ok,
           f"{n} triples, {len(bad)} mismatches")
    assert ok, bad[:10]


# -- certificate integrity

REASONS = ["annulus_corner", "vertical_pair", "rainbow_pair", "outward_provenance", "single_direction"]


def _leaves(o, path=""):
    if isinstance(o, dict):
        for k, v in o.items():
            yield from _leaves(v, f"{path}.{k}" if path else k)
    elif isinstance(o, list):
        for i, v in enumerate(o):
            yield from _leaves(v, f"{path}[{i}]")
    else:
        yield path, o


def _set(o, path, val):
    toks = re.findall(r"[^.\[\]]+|\[\d+\]", path)
    for t in toks[:-1]:
        o = o[int(t[1:-1])] if t.startswith("[") else o[t]
    t = toks[-1]
    if t.startswith("["):
        o[int(t[1:-1])] = val
    else:
        o[t] = val


def _mutate(v, rng):
    if isinstance(v, bool):
        return not v
    if isinstance(v, int):
        return v + rng.choice([1, -1])
    if v is None:
        return 0
    if v in REASONS:
        return rng.choice([r for r in REASONS if r != v])
    return v + "x"


def _localized(path: str, div_path: str) -> bool:
    return path == div_path or path.startswith(div_path + ".") or path.startswith(div_path + "[")


def test_certificate_integrity(report):
    t0 = time.perf_counter()
    swept = list(nonsimple_30()) + list(random_40())
    bad = []
    for t in swept:
        try:
            if not verify_certificate(certify(t).to_json()):
                bad.append(str(t))
        except Exception as exc:
            bad.append(f"{t}: {exc!r}")
    rng = random.Random(8)
    base = [json.loads(certify(t).to_json()) for t in ("23,11,1,7", "7,3,0,1", "19,4,5,3", "13,4,2,5")]
    missed = []
    for _ in range(100):
        c = copy.deepcopy(rng.choice(base))
        path, v = rng.choice(list(_leaves(c)))
        _set(c, path, _mutate(v, rng))
        res = verify_certificate(c)
        if res.ok or not _localized(path, res.divergence.path):
            missed.append(f"{path}: {res.divergence}")
    dt = time.perf_counter() - t0
    ok = not bad and not missed
    report("verify(certify(t)) on every swept tuple; 100 single-field mutations rejected and localized", ok,
           f"{len(swept)} certificates, {len(bad)} rejected, {len(missed)} mutations missed, {dt:.0f}s")
    assert ok, (bad[:10], missed[:10])
