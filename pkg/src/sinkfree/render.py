"""Deterministic SVG pictures of a diagram on the square with identifications.

Alpha runs horizontally through the middle; top and bottom are glued, as
are left and right.  Every edge is drawn as a polyline in the plane
covering the torus, and faces are traced by chaining the polylines of
their darts, so shading follows the exact regions.  Pieces that leave the
square are repeated by whole periods and clipped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import floor, pi, sin, cos, atan2

from .diagram import BETA, ArcClass, TorusDiagram, is_simple
from .shadow import shadow_from_diagram, sink_disk_scan_all, sink_tube

STYLE_KEYS = ("orientations", "classes", "tube", "disks", "delta")
CLASS_COLOR = {ArcClass.SINK: "#c0392b", ArcClass.SOURCE: "#2471a3", ArcClass.PARALLEL: "#555555"}


@dataclass(frozen=True)
class RenderSpec:
    out: str | None = None
    size: int = 600
    style: frozenset = field(default_factory=lambda: frozenset(("orientations", "classes", "tube", "disks")))

    @classmethod
    def parse_style(cls, text: str) -> frozenset:
        keys = frozenset(x.strip() for x in text.split(",") if x.strip())
        bad = keys - set(STYLE_KEYS)
        if bad:
            raise ValueError(f"unknown style options {sorted(bad)}; choose from {', '.join(STYLE_KEYS)}")
        return keys


Point = tuple[float, float]


class _Layout:
    def __init__(self, d: TorusDiagram, size: int):
        self.d = d
        self.W = self.H = float(size)
        n = d.n
        self.mid = self.H / 2
        self.x = [(v + 0.5) * self.W / n for v in range(n)]
        self.band = 0.3 * self.H
        self.paths = {}        # beta edge index j -> polyline from beta[j] to beta[j+1]
        self._build()

    def _upper(self, j: int) -> tuple[bool, bool]:
        """Whether the ends of beta edge j sit on the upper side of alpha."""
        d = self.d
        u, v = d.beta[j], d.beta[(j + 1) % d.n]
        return d.sign[u] > 0, d.sign[v] < 0

    def _build(self) -> None:
        d, n, W = self.d, self.d.n, self.W
        ends = {}
        for j in range(n):
            ends[j] = self._upper(j)
        up_v = sorted(d.beta[j] if ends[j][0] else d.beta[(j + 1) % n] for j in range(n) if ends[j][0] != ends[j][1])
        low_v = sorted(d.beta[(j + 1) % n] if ends[j][0] else d.beta[j] for j in range(n) if ends[j][0] != ends[j][1])
        rainbows = {j: ends[j][0] for j in range(n) if ends[j][0] == ends[j][1]}
        spans = {}
        for j, top in rainbows.items():
            u, v = d.beta[j], d.beta[(j + 1) % n]
            side = up_v if top else low_v
            lo, hi = min(u, v), max(u, v)
            inside = any(lo < w < hi for w in side)
            # the disk of a rainbow holds no vertical end on its side
            a, b = (lo, hi) if not inside else (hi, lo + n)
            spans[j] = (a, b)
        rmax = max([(b - a) for a, b in spans.values()], default=1)
        for j, (a, b) in spans.items():
            top = rainbows[j]
            xa, xb = (a + 0.5) * W / n, (b + 0.5) * W / n
            c, r = (xa + xb) / 2, (xb - xa) / 2
            k = self.band / (rmax * W / n / 2)
            pts = []
            for i in range(25):
                t = pi * i / 24
                y = k * r * sin(t)
                pts.append((c - r * cos(t), self.mid + (y if top else -y)))
            u = d.beta[j]
            if u % n != a % n:
                pts = pts[::-1]
            self.paths[j] = pts
        if up_v:
            k = len(up_v)
            lookup = {}
            for j in range(n):
                if ends[j][0] != ends[j][1]:
                    a = d.beta[j] if ends[j][0] else d.beta[(j + 1) % n]
                    b = d.beta[(j + 1) % n] if ends[j][0] else d.beta[j]
                    lookup[a] = (j, b)
            shift = low_v.index(lookup[up_v[0]][1])
            for i, a in enumerate(up_v):
                j, b = lookup[a]
                if low_v[(i + shift) % k] != b:
                    raise ValueError("vertical arcs do not run parallel")
                xb = self.x[b] + W * floor((i + shift) / k)
                xa = self.x[a]
                pts = [(xa, self.mid), (xa, self.mid + self.band * 1.05),
                       (xb, self.mid + self.H - self.band * 1.05), (xb, self.mid + self.H)]
                if d.beta[j] != a:
                    pts = pts[::-1]
                self.paths[j] = pts

    def dart_path(self, x: int) -> list[Point]:
        d, n, W = self.d, self.d.n, self.W
        if d.is_alpha(x):
            e = d.edge(x)
            pts = [(self.x[e], self.mid), (self.x[e] + W / n, self.mid)]
        else:
            pts = self.paths[d.edge(x)]
        return pts if d.forward(x) else pts[::-1]

    def face_polygon(self, f: int) -> list[Point]:
        out: list[Point] = []
        for x in self.d.faces[f]:
            pts = self.dart_path(x)
            if out:
                dx = out[-1][0] - pts[0][0]
                dy = out[-1][1] - pts[0][1]
                dx, dy = round(dx / self.W) * self.W, round(dy / self.H) * self.H
                pts = [(a + dx, b + dy) for a, b in pts]
                out.extend(pts[1:])
            else:
                out.extend(pts)
        return out


def _copies(pts: list[Point], W: float, H: float):
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    for i in range(floor(-max(xs) / W), floor((W - min(xs)) / W) + 1):
        for j in range(floor(-max(ys) / H), floor((H - min(ys)) / H) + 1):
            yield [(a + i * W, b + j * H) for a, b in pts]


def _fmt(pts: list[Point], H: float) -> str:
    return " ".join(f"{a:.2f},{H - b:.2f}" for a, b in pts)


def render_svg(d: TorusDiagram, spec: RenderSpec = RenderSpec(), delta_faces=()) -> str:
    """The SVG document for ``d`` as a string."""
    lay = _Layout(d, spec.size)
    W, H = lay.W, lay.H
    st = spec.style
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(W)}" height="{int(H)}" '
           f'viewBox="0 0 {int(W)} {int(H)}">',
           f'<defs><clipPath id="sq"><rect x="0" y="0" width="{int(W)}" height="{int(H)}"/></clipPath></defs>',
           f'<rect x="0" y="0" width="{int(W)}" height="{int(H)}" fill="#ffffff" stroke="#000000"/>',
           '<g clip-path="url(#sq)">']

    def shade(faces, color, tag):
        for f in sorted(faces):
            for pts in _copies(lay.face_polygon(f), W, H):
                out.append(f'<polygon class="{tag}" points="{_fmt(pts, H)}" fill="{color}" stroke="none"/>')

    simple = is_simple(d)
    if "delta" in st and delta_faces:
        shade(delta_faces, "#f9e79f", "delta-bigon")
    if "tube" in st and not simple:
        shade(sink_tube(d, BETA).faces[:-1], "#f5b7b1", "sink-tube")
    disks = []
    if "disks" in st and not simple:
        disks = [f for s in sink_disk_scan_all(shadow_from_diagram(d))
                 for f in shadow_from_diagram(d).sectors[s]]
        shade(disks, "#d2b4de", "sink-disk")
    out.append(f'<line x1="0" y1="{H - lay.mid:.2f}" x2="{W:.2f}" y2="{H - lay.mid:.2f}" '
               f'stroke="#000000" stroke-width="2"/>')
    for j in range(d.n):
        color = CLASS_COLOR[d.arc_class(BETA, j)] if "classes" in st else "#000000"
        for pts in _copies(lay.paths[j], W, H):
            out.append(f'<polyline class="beta" points="{_fmt(pts, H)}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"/>')
            if "orientations" in st:
                out.append(_arrow(pts, H, color))
    if "orientations" in st:
        for v in range(d.n):
            a = (lay.x[v] + W / d.n / 2, lay.mid)
            out.append(_arrow([(a[0] - 1, a[1]), (a[0] + 1, a[1])], H, "#000000"))
    for name, f in (("z", d.z_face), ("w", d.w_face)):
        cx, cy = _centroid(lay.face_polygon(f))
        for pts in _copies([(cx, cy)], W, H):
            (a, b), = pts
            out.append(f'<circle cx="{a:.2f}" cy="{H - b:.2f}" r="4" fill="#000000"/>')
            out.append(f'<text x="{a + 6:.2f}" y="{H - b - 6:.2f}" font-size="12">{name}</text>')
    for f in disks:
        cx, cy = _centroid(lay.face_polygon(f))
        for pts in _copies([(cx, cy)], W, H):
            (a, b), = pts
            out.append(f'<text class="sink-disk-label" x="{a:.2f}" y="{H - b:.2f}" font-size="11" '
                       f'text-anchor="middle">sink disk</text>')
    for v in range(d.n):
        out.append(f'<circle cx="{lay.x[v]:.2f}" cy="{H - lay.mid:.2f}" r="2.5" fill="#000000"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _centroid(pts: list[Point]) -> Point:
    return sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts)


def _arrow(pts: list[Point], H: float, color: str) -> str:
    i = len(pts) // 2
    (x0, y0), (x1, y1) = pts[i - 1], pts[i] if len(pts) > 1 else pts[0]
    mx, my = (x0 + x1) / 2, (y0 + y1) / 2
    ang = atan2(y1 - y0, x1 - x0)
    tip = (mx + 6 * cos(ang), my + 6 * sin(ang))
    l = (mx + 4 * cos(ang + 2.5), my + 4 * sin(ang + 2.5))
    r = (mx + 4 * cos(ang - 2.5), my + 4 * sin(ang - 2.5))
    return f'<polygon class="arrow" points="{_fmt([tip, l, r], H)}" fill="{color}"/>'
