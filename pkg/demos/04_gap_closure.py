"""
Gap restoration
===============

Four dangling arcs: three aim at a common area (joined simultaneously at
the barycenter of their ray crossings), and the fourth is picked up by
the isolated-endpoint pass.  Inhibition examples show a crossing and a
degenerate-cycle candidate being dropped.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from vectra import ConnectionParams, close_gaps
from vectra.gapclosure import candidate_connections, inhibit
from vectra.lineargraph import NetGraph, NodeKind

from pathlib import Path

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)


def build(*polylines):
    g = NetGraph(100, 100)
    seen = {}
    for poly in polylines:
        for p in (poly[0], poly[-1]):
            if p not in seen:
                seen[p] = g.add_node(p[0], p[1], NodeKind.ENDPOINT)
        g.add_arc(seen[poly[0]], seen[poly[-1]], list(poly), list(poly))
    return g


def radial(center, deg, r_tip, r_tail):
    a = math.radians(deg)
    d = (math.cos(a), math.sin(a))
    return [(center[0] + r_tail * d[0], center[1] + r_tail * d[1]),
            (center[0] + r_tip * d[0], center[1] + r_tip * d[1])]


C = (50.0, 50.0)
arm2 = radial(C, 210, 15, 35)
tip4 = (arm2[-1][0] + 9 * math.cos(math.radians(75)),
        arm2[-1][1] + 9 * math.sin(math.radians(75)))
tail4 = (tip4[0] - 15 * math.cos(math.radians(255)),
         tip4[1] - 15 * math.sin(math.radians(255)))
g = build(radial(C, 90, 15, 35), arm2, radial(C, 330, 15, 35), [tail4, tip4])

params = ConnectionParams(max_cost=40.0, min_terminal_len=3.0,
                          ang_min=math.radians(50), ang_max=math.radians(80),
                          cycle_min_len=5.0, elongation_max=50.0,
                          isolated_cost_max=15.0)

proposed = candidate_connections(g, params)
surviving = inhibit(g, proposed, params)
print(f"{len(proposed)} proposed, {len(surviving)} survive inhibition")

endpoints = {c.e1 for c in proposed} | {c.e2 for c in proposed}
positions = {nid: g.nodes[nid].pos for nid in endpoints}
before = [list(a.polyline) for a in g.arcs.values()]
closed, report = close_gaps(g, params)
print("groups:", report["groups"], "pairs:", report["pairs"])
print("components after closure:", len(closed.components()))

fig, axes = plt.subplots(1, 2, figsize=(12, 6))
for poly in before:
    axes[0].plot([p[0] for p in poly], [p[1] for p in poly], "k-", lw=2)
for c in proposed:
    a, b = positions[c.e1], positions[c.e2]
    style = "g--" if c in surviving else "r:"
    axes[0].plot([a[0], b[0]], [a[1], b[1]], style, lw=1.2)
axes[0].set_title("broken network + proposals")
for arc in closed.arcs.values():
    pts = arc.polyline
    axes[1].plot([p[0] for p in pts], [p[1] for p in pts], "-", lw=2)
axes[1].set_title("after gap closure (1 component)")
for ax in axes:
    ax.set_aspect("equal")
    ax.invert_yaxis()
fig.tight_layout()
fig.savefig(out / "04_gap_closure.png", dpi=110)
print(f"wrote {out / '04_gap_closure.png'}")
