"""
Color histogram and preliminary extraction
==========================================

Build the 2D color histogram of a synthetic map, render it, outline the
river's color cluster, and extract the matching pixels.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from vectra import ColorSelection, ProjectionMode, build_histogram, extract_mask, render_histogram
from vectra.colorspace import project, rgb_to_hsi, RgbPixel
from vectra.synth import RIVER_BLUE, make_river_map

from pathlib import Path

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

image, _ = make_river_map(size=(512, 512), river_width=6.0, amplitude=60.0,
                          period=256.0, grid_spacing=150, grid_width=7.0,
                          grid_offset=70)

# saturation on X, hue on Y; grays collapse into the first columns
hist = build_histogram(image, ProjectionMode.SATURATION_HUE)
view = render_histogram(hist)

# where does the river's color land on the grid?
x, y = project(rgb_to_hsi(RgbPixel(*RIVER_BLUE)), ProjectionMode.SATURATION_HUE, (256, 256))
selection = ColorSelection(ProjectionMode.SATURATION_HUE,
                           rect=(max(0, x - 4), max(0, y - 4),
                                 min(255, x + 4), min(255, y + 4)))
mask = extract_mask(image, selection)

fig, axes = plt.subplots(1, 3, figsize=(15, 5))
axes[0].imshow(image)
axes[0].set_title("input map")
axes[1].imshow(view, origin="lower")
axes[1].add_patch(plt.Rectangle((x - 4, y - 4), 8, 8, fill=False, color="w"))
axes[1].set_title("2D histogram + selection")
axes[2].imshow(mask, cmap="gray")
axes[2].set_title(f"preliminary mask ({int(mask.sum())} px)")
for ax in axes:
    ax.set_xticks([]), ax.set_yticks([])
fig.tight_layout()
fig.savefig(out / "01_histogram.png", dpi=110)
print(f"wrote {out / '01_histogram.png'}")
