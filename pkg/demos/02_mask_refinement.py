"""
Mask cleanup and completion
===========================

Area-based noise removal, seeded region growing under the color metric,
conservative connection of adjacent regions, and hole filling.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vectra import (
    ColorSelection,
    GrowthParams,
    ProjectionMode,
    connect_adjacent,
    extract_mask,
    label_components,
    region_grow,
    remove_small_holes,
    remove_small_regions,
)
from vectra.colorspace import project, rgb_to_hsi, RgbPixel
from vectra.synth import RIVER_BLUE, make_river_map

from pathlib import Path

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

rng = np.random.default_rng(7)
image, _ = make_river_map(size=(384, 384), river_width=6.0, amplitude=40.0,
                          period=192.0, grid_spacing=120, grid_width=7.0,
                          grid_offset=60)
# sprinkle salt noise in the river's color so area filtering has work to do
noise = rng.random(image.shape[:2]) < 0.002
image[noise] = RIVER_BLUE

x, y = project(rgb_to_hsi(RgbPixel(*RIVER_BLUE)), ProjectionMode.SATURATION_HUE, (256, 256))
sel = ColorSelection(ProjectionMode.SATURATION_HUE,
                     rect=(max(0, x - 4), max(0, y - 4), min(255, x + 4), min(255, y + 4)))

preliminary = extract_mask(image, sel)
_, table = label_components(preliminary)
cleaned = remove_small_regions(preliminary, table, 8)

grown = region_grow(image, cleaned, GrowthParams(d_max=0.08))
connected = connect_adjacent(grown)
_, table2 = label_components(connected)
refined = remove_small_regions(connected, table2, 30)
_, table3 = label_components(refined)
refined = remove_small_holes(refined, table3, 50)

stages = [("preliminary", preliminary), ("area-filtered", cleaned),
          ("grown", grown), ("connected + refined", refined)]
fig, axes = plt.subplots(1, len(stages), figsize=(5 * len(stages), 5))
for ax, (title, m) in zip(axes, stages):
    ax.imshow(m, cmap="gray")
    ax.set_title(f"{title} ({int(m.sum())} px)")
    ax.set_xticks([]), ax.set_yticks([])
fig.tight_layout()
fig.savefig(out / "02_refinement.png", dpi=110)
print(f"wrote {out / '02_refinement.png'}")
