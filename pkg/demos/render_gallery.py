"""Write SVG pictures of a few diagrams into ./gallery (or $SINKFREE_OUT)."""
import os
from pathlib import Path

from sinkfree.diagram import DiagramTuple, build_from_tuple
from sinkfree.render import RenderSpec, render_svg

out = Path(os.environ.get("SINKFREE_OUT", "gallery"))
out.mkdir(parents=True, exist_ok=True)
for text, style in [("7,3,0,1", {"orientations", "classes", "disks"}),
                    ("5,2,0,1", {"classes", "tube"}),
                    ("23,11,1,7", {"classes", "tube"})]:
    d = build_from_tuple(DiagramTuple.parse(text))
    path = out / f"{text.replace(',', '_')}.svg"
    path.write_text(render_svg(d, RenderSpec(size=500, style=frozenset(style))))
    print("wrote", path)
