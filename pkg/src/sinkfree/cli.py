"""Command line interface: ``sinkfree <command> ...`` or ``python -m sinkfree``.

Exit codes: 0 success, 1 domain failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from collections import Counter
from multiprocessing import Pool
from pathlib import Path

from .certify import certify
from .diagram import (BETA, DiagramTuple, build_from_tuple, census, classify_arcs, is_primitive,
                      is_simple, validate, valid_tuples)
from .errors import InvalidTuple, SimpleDiagram, SinkfreeError
from .reduction import reduction_hierarchy
from .render import RenderSpec, render_svg
from .verify import verify_certificate

OUT_ENV = "SINKFREE_OUT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "."))


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _fail(msg: str, code: int = EXIT_FAIL) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _read_tuple(text: str) -> DiagramTuple:
    """Malformed text raises ``ValueError``; out-of-bounds raises ``InvalidTuple``."""
    return DiagramTuple.parse(text)


# -- commands

def cmd_validate(args) -> int:
    try:
        t = _read_tuple(args.tuple)
    except InvalidTuple as exc:
        _emit(args, {"input": args.tuple, "valid": False, "failures": [str(exc)]}, f"invalid: {exc}")
        return EXIT_FAIL
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        d = build_from_tuple(t)
    except SinkfreeError as exc:
        _emit(args, {"input": str(t), "valid": False, "failures": [str(exc)]}, f"invalid: {exc}")
        return EXIT_FAIL
    rep = validate(d)
    payload = {"input": str(t), "valid": rep.ok, "checks": rep.checks, "notes": rep.notes,
               "simple": is_simple(d), "primitive": (not is_simple(d)) and is_primitive(d),
               "census": census(d).as_dict()}
    head = f"{t}: {'valid' if rep.ok else 'invalid'}"
    _emit(args, payload, head + "\n" + str(rep))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_inspect(args) -> int:
    try:
        t = _read_tuple(args.tuple)
        d = build_from_tuple(t)
    except InvalidTuple as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except SinkfreeError as exc:
        return _fail(str(exc))
    arcs = {k: [c.value for c in v] for k, v in classify_arcs(d).items()}
    payload = {"input": str(t), "diagram": d.to_dict(), "census": census(d).as_dict(), "arcs": arcs,
               "simple": is_simple(d), "primitive": (not is_simple(d)) and is_primitive(d)}
    if not is_simple(d):
        h = reduction_hierarchy(d, BETA)
        payload["hierarchy"] = h.to_dict()
    lines = [f"{t}: {d.n} intersections, faces {census(d).as_dict()}",
             f"simple {str(payload['simple']).lower()}, primitive {str(payload['primitive']).lower()}"]
    for role, cls in arcs.items():
        lines.append(f"{role} arcs: {Counter(cls).most_common()}")
    if "hierarchy" in payload:
        chain = [payload["hierarchy"]["start"]] + [s["after"] for s in payload["hierarchy"]["steps"]]
        lines.append("hierarchy: " + " -> ".join(chain))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_reduce(args) -> int:
    try:
        t = _read_tuple(args.tuple)
        d = build_from_tuple(t)
    except InvalidTuple as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except SinkfreeError as exc:
        return _fail(str(exc))
    if is_simple(d):
        return _fail(str(SimpleDiagram()))
    h = reduction_hierarchy(d, BETA).to_dict()
    lines = [f"{t}: hierarchy length {len(h['steps'])}"]
    for i, st in enumerate(h["steps"]):
        lines.append(f"  level {i}: {st['before']} -> {st['after']} (replace {st['replaced_role']}, "
                     f"p {st['p_before']} -> {st['p_after']})")
    lines.append(f"terminal {h['terminal']} (primitive)")
    _emit(args, h, "\n".join(lines))
    return EXIT_OK


def _certify_or_fail(text: str):
    """(certificate, None) or (None, (exit code, message))."""
    try:
        t = _read_tuple(text)
    except InvalidTuple as exc:
        return None, (EXIT_FAIL, str(exc))
    except ValueError as exc:
        return None, (EXIT_USAGE, str(exc))
    try:
        return certify(t), None
    except SimpleDiagram as exc:
        return None, (EXIT_FAIL, str(exc))
    except SinkfreeError as exc:
        return None, (EXIT_FAIL, f"{type(exc).__name__}: {exc}")


def cmd_certify(args) -> int:
    cert, err = _certify_or_fail(args.tuple)
    if err:
        return _fail(err[1], err[0])
    path = Path(args.out) if args.out else out_dir() / f"certificate_{args.tuple.replace(',', '_')}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cert.to_json(indent=1) + "\n")
    s = cert.summary
    levels = [lv["descent"]["chain"] if lv["descent"] else [] for lv in cert.data["levels"]]
    payload = {"input": cert.data["input"], "certificate": str(path), "hierarchy_length": s["hierarchy_length"],
               "descent_chains": levels, "double_points_checked": s["double_points_checked"],
               "all_safe": s["all_safe"]}
    lines = [cert.summary_text()]
    for i, chain in enumerate(levels):
        lines.append(f"  level {i}: " + (" -> ".join(chain) if chain else "trivially safe"))
    lines.append(f"written to {path}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        text = Path(args.certificate).read_text()
    except OSError as exc:
        return _fail(str(exc), EXIT_USAGE)
    res = verify_certificate(text)
    payload = {"certificate": args.certificate, "ok": res.ok,
               "divergence": res.divergence.to_dict() if res.divergence else None}
    _emit(args, payload, "ok" if res.ok else f"rejected: {res.divergence}")
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_render(args) -> int:
    try:
        t = _read_tuple(args.tuple)
        style = RenderSpec.parse_style(args.style) if args.style is not None else RenderSpec().style
    except InvalidTuple as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    if args.size < 50:
        return _fail("--size must be at least 50", EXIT_USAGE)
    try:
        d = build_from_tuple(t)
    except SinkfreeError as exc:
        return _fail(str(exc))
    spec = RenderSpec(out=args.out, size=args.size, style=style)
    delta = ()
    if "delta" in style and not is_simple(d) and not is_primitive(d):
        from .sphere import delta_bigon_faces, sigma_plus_model
        role = reduction_hierarchy(d, BETA).steps[0].replaced_role
        m = sigma_plus_model(d, role)
        if m.swapped:
            return _fail("the level replaces alpha; its delta region lives on the swapped diagram")
        delta = delta_bigon_faces(m)
    svg = render_svg(d, spec, delta)
    path = Path(args.out) if args.out else out_dir() / f"diagram_{args.tuple.replace(',', '_')}.svg"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg)
    _emit(args, {"input": str(t), "svg": str(path), "style": sorted(style), "size": args.size},
          f"wrote {path}")
    return EXIT_OK


# -- sweep

def sweep_one(text: str) -> dict:
    """Certify and verify one tuple; the record that goes in the checkpoint."""
    cert, err = _certify_or_fail(text)
    if err:
        return {"tuple": text, "ok": False, "divergence": err[1], "hierarchy_length": None, "descents": []}
    res = verify_certificate(cert.to_json())
    lens = [len(lv["descent"]["chain"]) for lv in cert.data["levels"] if lv["descent"]]
    return {"tuple": text, "ok": res.ok, "divergence": None if res.ok else str(res.divergence),
            "hierarchy_length": cert.summary["hierarchy_length"], "descents": lens}


def sweep_tuples(max_p: int, sample: int | None, seed: int) -> list[str]:
    ts = [str(t) for t in valid_tuples(max_p, min_p=3, nonsimple=True)]
    if sample is not None and sample < len(ts):
        ts = sorted(random.Random(seed).sample(ts, sample), key=lambda x: tuple(map(int, x.split(","))))
    return ts


def summarize(records: list[dict]) -> dict:
    records = sorted(records, key=lambda r: tuple(map(int, r["tuple"].split(","))))
    hl = Counter(r["hierarchy_length"] for r in records if r["ok"])
    dl = Counter(n for r in records if r["ok"] for n in r["descents"])
    return {
        "total": len(records),
        "passed": sum(r["ok"] for r in records),
        "failed": sum(not r["ok"] for r in records),
        "hierarchy_length_histogram": {str(k): hl[k] for k in sorted(hl)},
        "descent_length_histogram": {str(k): dl[k] for k in sorted(dl)},
        "failures": [{"tuple": r["tuple"], "divergence": r["divergence"]} for r in records if not r["ok"]],
    }


def _load_checkpoint(path: Path) -> dict[str, dict]:
    done = {}
    if path.exists():
        for line in path.read_text().splitlines():
            try:
                rec = json.loads(line)
            except ValueError:
                continue        # a line cut short by an interruption
            done[rec["tuple"]] = rec
    return done


def cmd_sweep(args) -> int:
    if args.max_p < 3:
        return _fail("--max-p must be at least 3", EXIT_USAGE)
    if args.jobs < 1:
        return _fail("--jobs must be at least 1", EXIT_USAGE)
    todo = sweep_tuples(args.max_p, args.sample, args.seed)
    ck = Path(args.checkpoint) if args.checkpoint else out_dir() / f"sweep_{args.max_p}.jsonl"
    ck.parent.mkdir(parents=True, exist_ok=True)
    done = _load_checkpoint(ck) if args.resume else {}
    if not args.resume and ck.exists():
        ck.unlink()
    wanted = set(todo)
    pending = [t for t in todo if t not in done]
    if args.stop_after is not None:
        pending = pending[:args.stop_after]
    with ck.open("a") as fh:
        if ck.stat().st_size and not ck.read_text().endswith("\n"):
            fh.write("\n")      # start after a torn last line
        if args.jobs == 1:
            results = map(sweep_one, pending)
            pool = None
        else:
            pool = Pool(args.jobs)
            results = pool.imap_unordered(sweep_one, pending, chunksize=8)
        try:
            for rec in results:
                done[rec["tuple"]] = rec
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
                fh.flush()
        finally:
            if pool is not None:
                pool.close()
                pool.join()
    records = [done[t] for t in todo if t in done]
    summary = summarize(records)
    summary["complete"] = len(records) == len(wanted)
    summary["max_p"] = args.max_p
    lines = [f"sweep p <= {args.max_p}: {summary['passed']} passed, {summary['failed']} failed "
             f"of {summary['total']}" + ("" if summary["complete"] else f" (incomplete, {len(wanted)} planned)"),
             "hierarchy lengths: " + ", ".join(f"{k}: {v}" for k, v in summary["hierarchy_length_histogram"].items()),
             "descent lengths: " + ", ".join(f"{k}: {v}" for k, v in summary["descent_length_histogram"].items())]
    for f in summary["failures"]:
        lines.append(f"FAIL {f['tuple']}: {f['divergence']}")
    _emit(args, summary, "\n".join(lines))
    if not summary["complete"]:
        return EXIT_FAIL
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


# -- wiring

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for any random choice (sampling)")
    ap = _Parser(prog="sinkfree", description="Sink-disk-free certificates for genus-one doubly pointed diagrams.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a tuple p,q,r,s")
    p.add_argument("tuple")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("inspect", parents=[common], help="faces, arc classes and hierarchy of a tuple")
    p.add_argument("tuple")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("reduce", parents=[common], help="the reduction hierarchy of a tuple")
    p.add_argument("tuple")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify", parents=[common], help="build and write a certificate")
    p.add_argument("tuple")
    p.add_argument("--out", help=f"certificate path (default: ${OUT_ENV} or the current directory)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[common], help="replay a certificate independently")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", parents=[common], help="draw a diagram as SVG")
    p.add_argument("tuple")
    p.add_argument("--out")
    p.add_argument("--size", type=int, default=600, help="width and height in pixels")
    p.add_argument("--style", help="comma list of orientations,classes,tube,disks,delta")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("sweep", parents=[common], help="certify and verify every tuple up to a bound")
    p.add_argument("--max-p", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--sample", type=int, help="check a seeded random sample of this size")
    p.add_argument("--checkpoint", help="JSON lines file of finished tuples")
    p.add_argument("--resume", action="store_true", help="skip tuples already in the checkpoint")
    p.add_argument("--stop-after", type=int, help="stop after this many new tuples")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
