"""
Skeletonization and graph conversion
====================================

Chamfer distance transform, ridge-anchored skeleton, thinning to unit
width, conversion to a node/arc graph, pruning, and polygonal fitting.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vectra import attach_polylines, chamfer_distance, prune, raster_to_graph, skeletonize, thin
from vectra.lineargraph import NodeKind

from pathlib import Path

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# a thick Y shape with a blob: skeleton keeps the branching structure
mask = np.zeros((160, 160), dtype=bool)
yy, xx = np.mgrid[0:160, 0:160]
mask |= np.abs(yy - xx) < 4  # diagonal stroke
mask |= (np.abs(yy - 80) < 4) & (xx > 60)  # horizontal stroke
mask |= (xx - 120) ** 2 + (yy - 40) ** 2 < 130  # blob

dt = chamfer_distance(mask)
skel = skeletonize(mask)
unit = thin(skel)

graph = raster_to_graph(unit)
pruned = prune(graph, chain_min=12.0, branch_min=8.0)
fitted = attach_polylines(pruned, tol=2.0)

print("nodes:", len(fitted.nodes), "arcs:", len(fitted.arcs))
for kind in NodeKind:
    n = sum(1 for nd in fitted.nodes.values() if nd.kind is kind)
    print(f"  {kind.value}: {n}")

fig, axes = plt.subplots(1, 4, figsize=(20, 5))
axes[0].imshow(mask, cmap="gray")
axes[0].set_title("input regions")
axes[1].imshow(np.where(mask, dt, 0), cmap="magma")
axes[1].set_title("(3,4) chamfer distance")
axes[2].imshow(unit, cmap="gray")
axes[2].set_title("skeleton, unit width")
axes[3].imshow(mask, cmap="gray", alpha=0.3)
for arc in fitted.arcs.values():
    px = [p[0] for p in arc.polyline]
    py = [p[1] for p in arc.polyline]
    axes[3].plot(px, py, "-o", markersize=2.5, linewidth=1.2)
axes[3].set_title("pruned graph, polygonal arcs")
axes[3].set_xlim(0, 160), axes[3].set_ylim(160, 0)
for ax in axes:
    ax.set_xticks([]), ax.set_yticks([])
fig.tight_layout()
fig.savefig(out / "03_skeleton.png", dpi=110)
print(f"wrote {out / '03_skeleton.png'}")
