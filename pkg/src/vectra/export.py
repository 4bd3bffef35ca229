"""Vector output: ASCII DXF (R12 dialect) and the NetGraph JSON document.

One POLYLINE/VERTEX/SEQEND entity is written per arc.  Raster row 0 sits
at the top of the image, so Y is flipped at export to the mathematical
convention; all earlier stages share the raster convention.
"""

from __future__ import annotations

import json
import math

from .errors import ValidationError
from .lineargraph import NetGraph


def _aci_palette() -> list[tuple[int, int, int]]:
    """RGB values for AutoCAD color indices 1..255.

    Indices 1-7 are the fixed primaries, 8-9 grays, 10-249 the hue wheel
    (24 hues, five value rows, full and half saturation), 250-255 a gray
    ramp.  Index 0 is reserved and never chosen.
    """
    pal: list[tuple[int, int, int]] = [(0, 0, 0)]  # index 0 placeholder
    pal += [
        (255, 0, 0), (255, 255, 0), (0, 255, 0), (0, 255, 255),
        (0, 0, 255), (255, 0, 255), (255, 255, 255), (128, 128, 128),
        (192, 192, 192),
    ]
    values = (1.0, 0.8, 0.6, 0.5, 0.3)
    for hue_step in range(24):
        hue = hue_step * 15.0
        for row in range(5):
            for sat in (1.0, 0.5):
                pal.append(_hsv_to_rgb255(hue, sat, values[row]))
    grays = (51, 92, 133, 174, 215, 255)
    pal += [(v, v, v) for v in grays]
    assert len(pal) == 256
    return pal


def _hsv_to_rgb255(h: float, s: float, v: float) -> tuple[int, int, int]:
    h = (h % 360.0) / 60.0
    c = v * s
    x = c * (1 - abs(h % 2 - 1))
    m = v - c
    r, g, b = (
        (c, x, 0), (x, c, 0), (0, c, x), (0, x, c), (x, 0, c), (c, 0, x)
    )[int(h) % 6]
    return (round((r + m) * 255), round((g + m) * 255), round((b + m) * 255))


_ACI = _aci_palette()


def nearest_aci(rgb: tuple[float, float, float]) -> int:
    """Nearest standard DXF color index for an RGB triple in [0, 1]."""
    r, g, b = (max(0.0, min(1.0, float(v))) * 255.0 for v in rgb)
    best, best_d = 7, math.inf
    for idx in range(1, 256):
        pr, pg, pb = _ACI[idx]
        d = (pr - r) ** 2 + (pg - g) ** 2 + (pb - b) ** 2
        if d < best_d:
            best, best_d = idx, d
    return best


def _fmt(v: float) -> str:
    return f"{v:.9f}"


def write_dxf(g: NetGraph, layer: str = "NETWORK",
              color: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> bytes:
    """Serialize the graph as deterministic ASCII DXF bytes.

    Every arc needs an attached polyline.  Coordinates stay in pixel
    units; Y is flipped against the graph's raster height.
    """
    height = g.height
    if height <= 0:
        ys = [y for arc in g.arcs.values() for _, y in (arc.polyline or [])]
        height = int(math.ceil(max(ys))) + 1 if ys else 1
    aci = nearest_aci(color)
    lines: list[str] = []
    put = lines.extend
    put(["0", "SECTION", "2", "HEADER",
         "9", "$ACADVER", "1", "AC1009",
         "0", "ENDSEC"])
    put(["0", "SECTION", "2", "TABLES"])
    put(["0", "TABLE", "2", "LTYPE", "70", "1",
         "0", "LTYPE", "2", "CONTINUOUS", "70", "0",
         "3", "Solid line", "72", "65", "73", "0", "40", "0.0",
         "0", "ENDTAB"])
    put(["0", "TABLE", "2", "LAYER", "70", "1",
         "0", "LAYER", "2", layer, "70", "0",
         "62", str(aci), "6", "CONTINUOUS",
         "0", "ENDTAB"])
    put(["0", "ENDSEC"])
    put(["0", "SECTION", "2", "ENTITIES"])
    for aid in sorted(g.arcs):
        arc = g.arcs[aid]
        if not arc.polyline or len(arc.polyline) < 2:
            raise ValidationError(f"arc {aid} has no polyline; attach before export")
        put(["0", "POLYLINE", "8", layer, "66", "1", "70", "0",
             "10", "0.0", "20", "0.0", "30", "0.0"])
        for x, y in arc.polyline:
            put(["0", "VERTEX", "8", layer,
                 "10", _fmt(x), "20", _fmt(height - 1 - y), "30", "0.0"])
        put(["0", "SEQEND", "8", layer])
    put(["0", "ENDSEC", "0", "EOF"])
    return ("\n".join(lines) + "\n").encode("ascii")


def write_json(g: NetGraph) -> bytes:
    """The NetGraph JSON document as UTF-8 bytes."""
    return json.dumps(g.to_json_obj(), separators=(",", ":")).encode("utf-8")


def read_json(data: bytes | str) -> NetGraph:
    return NetGraph.from_json(data)
