"""Synthetic map fixtures: a colored river drawn as a sinusoid band,
optionally overprinted by a gray grid that interrupts it.

Used by the test suite and the demo scripts in place of scanned maps.
"""

from __future__ import annotations

import math

import numpy as np

# 8-bit-exact channel values so PNG round trips reproduce them exactly
RIVER_BLUE = (38 / 255, 89 / 255, 217 / 255)
GRID_GRAY = (140 / 255, 140 / 255, 140 / 255)
PAPER_WHITE = (1.0, 1.0, 1.0)


def river_curve(width: int, amplitude: float, period: float, y_center: float):
    """Ground-truth sinusoid as a dense point list [(x, y), ...]."""
    xs = np.linspace(0.0, width - 1.0, 4 * width)
    ys = y_center + amplitude * np.sin(2.0 * math.pi * xs / period)
    return np.stack([xs, ys], axis=1)


def make_river_map(
    size: tuple[int, int] = (1024, 1024),
    river_width: float = 5.0,
    amplitude: float = 80.0,
    period: float = 512.0,
    grid_spacing: int | None = None,
    grid_width: float = 7.0,
    grid_offset: int = 0,
):
    """Render the synthetic map.

    Returns (image, curve): the (H, W, 3) float image and the true curve
    points.  With grid_spacing set, vertical gray grid lines are drawn
    over the river, breaking it where they cross.
    """
    w, h = size
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    y_center = h / 2.0
    river = np.abs(yy - (y_center + amplitude * np.sin(2.0 * math.pi * xx / period)))
    img = np.ones((h, w, 3), dtype=np.float64)
    img[river <= river_width / 2.0] = RIVER_BLUE
    if grid_spacing:
        for gx in range(grid_offset, w, grid_spacing):
            x0 = max(0, int(math.floor(gx - grid_width / 2.0)))
            x1 = min(w, int(math.ceil(gx + grid_width / 2.0)) + 1)
            img[:, x0:x1] = GRID_GRAY
    return img, river_curve(w, amplitude, period, y_center)


def two_tone_image(size: tuple[int, int], left, right):
    """Vertical split image: left half one color, right half another."""
    w, h = size
    img = np.empty((h, w, 3), dtype=np.float64)
    img[:, : w // 2] = left
    img[:, w // 2 :] = right
    return img


def random_blob_mask(rng: np.random.Generator, size: int = 48,
                     blobs: int = 3, radius: float = 9.0) -> np.ndarray:
    """Union of random filled disks: an organic mask for skeleton tests."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(blobs):
        cx, cy = rng.uniform(radius, size - radius, 2)
        r = rng.uniform(radius * 0.4, radius)
        mask |= (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    return mask
