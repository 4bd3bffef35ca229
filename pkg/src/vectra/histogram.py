"""2D color histogram: building, rendering, and mask extraction.

The operator looks at the rendered histogram, outlines the cluster that
codes the features of interest, and the selection is re-projected over
the source image to produce the preliminary binary mask.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .colorspace import (
    S_MAX,
    TWO_PI,
    ProjectionMode,
    hsi_to_rgb,
    project_image,
    rgb_image_to_hsi,
)
from .errors import ValidationError

DEFAULT_BINS = (256, 256)


@dataclass
class Histogram2D:
    """Binned occurrence frequencies over a projected color plane.

    counts is indexed [y, x].  The hue accumulators are kept as unit-vector
    sums so the per-bin mean hue survives the 0/2pi wrap; they are only
    used for rendering the saturation-intensity projection.
    """

    mode: ProjectionMode
    width: int
    height: int
    counts: np.ndarray
    total: int
    hue_cos_sum: np.ndarray
    hue_sin_sum: np.ndarray
    sat_sum: np.ndarray

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        """Bin-wise combination; associative and order-independent."""
        if (self.mode, self.width, self.height) != (other.mode, other.width, other.height):
            raise ValidationError("histograms are not bin-compatible")
        return Histogram2D(
            self.mode,
            self.width,
            self.height,
            self.counts + other.counts,
            self.total + other.total,
            self.hue_cos_sum + other.hue_cos_sum,
            self.hue_sin_sum + other.hue_sin_sum,
            self.sat_sum + other.sat_sum,
        )


def build_histogram(
    image: np.ndarray,
    mode: ProjectionMode = ProjectionMode.SATURATION_HUE,
    bins: tuple[int, int] = DEFAULT_BINS,
) -> Histogram2D:
    """Histogram every pixel's projected bin coordinate.

    The image may be partitioned into row bands and per-band histograms
    merged; a single vectorized pass is used here.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3 or image.size == 0:
        raise ValidationError("expected a non-empty (H, W, 3) image")
    xb, yb = bins
    if xb < 2 or yb < 2:
        raise ValidationError("need at least 2 bins per axis")
    hsi = rgb_image_to_hsi(image)
    xs, ys = project_image(hsi, mode, bins)
    flat = (ys * xb + xs).ravel()
    counts = np.bincount(flat, minlength=xb * yb).reshape(yb, xb)
    h = hsi[..., 0].ravel()
    s = hsi[..., 1].ravel()
    cos_sum = np.bincount(flat, weights=np.cos(h) * s, minlength=xb * yb).reshape(yb, xb)
    sin_sum = np.bincount(flat, weights=np.sin(h) * s, minlength=xb * yb).reshape(yb, xb)
    sat_sum = np.bincount(flat, weights=s, minlength=xb * yb).reshape(yb, xb)
    return Histogram2D(mode, xb, yb, counts, int(counts.sum()), cos_sum, sin_sum, sat_sum)


def render_histogram(h: Histogram2D) -> np.ndarray:
    """Render the histogram as an (height, width, 3) RGB image.

    Display intensity is log(1+count) normalized by the maximum bin, so
    empty bins are black.  Saturation comes from the bin X coordinate;
    hue comes from the bin Y coordinate in the saturation-hue projection
    and from the per-bin mean hue otherwise.  Saturation is clamped to
    the display gamut at the chosen intensity.
    """
    counts = h.counts.astype(np.float64)
    max_count = counts.max()
    if max_count <= 0:
        return np.zeros((h.height, h.width, 3))
    intensity = np.log1p(counts) / math.log1p(max_count)
    xs = (np.arange(h.width, dtype=np.float64) + 0.5) / h.width
    sat = np.broadcast_to(xs * S_MAX, (h.height, h.width))
    if h.mode is ProjectionMode.SATURATION_HUE:
        ys = (np.arange(h.height, dtype=np.float64) + 0.5) / h.height
        hue = np.broadcast_to((ys * TWO_PI)[:, None], (h.height, h.width))
    else:
        hue = np.mod(np.arctan2(h.hue_sin_sum, h.hue_cos_sum), TWO_PI)
    rgb = hsi_to_rgb(hue, sat, intensity, clamp_saturation=True)
    rgb[counts == 0] = 0.0
    return rgb


@dataclass
class ColorSelection:
    """An operator-drawn region on the histogram grid.

    Either an inclusive axis-aligned bin rectangle (x0, y0, x1, y1) or a
    closed polygon in bin coordinates.
    """

    mode: ProjectionMode
    rect: tuple[int, int, int, int] | None = None
    polygon: list[tuple[float, float]] = field(default_factory=list)

    def validate(self, bins: tuple[int, int]) -> None:
        xb, yb = bins
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            if not (0 <= x0 <= x1 < xb and 0 <= y0 <= y1 < yb):
                raise ValidationError(f"selection rectangle {self.rect} outside {xb}x{yb} grid")
        elif self.polygon:
            if len(self.polygon) < 3:
                raise ValidationError("selection polygon needs at least 3 vertices")
            for x, y in self.polygon:
                if not (0 <= x < xb and 0 <= y < yb):
                    raise ValidationError(f"polygon vertex ({x}, {y}) outside {xb}x{yb} grid")
        else:
            raise ValidationError("selection has neither rect nor polygon")

    def to_json(self) -> str:
        doc: dict = {"mode": self.mode.value}
        if self.rect is not None:
            doc["rect"] = list(self.rect)
        else:
            doc["polygon"] = [[float(x), float(y)] for x, y in self.polygon]
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str | bytes | dict) -> "ColorSelection":
        doc = text if isinstance(text, dict) else json.loads(text)
        try:
            mode = ProjectionMode(doc["mode"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad selection mode: {exc}") from exc
        if "rect" in doc:
            rect = tuple(int(v) for v in doc["rect"])
            if len(rect) != 4:
                raise ValidationError("rect must be [x0, y0, x1, y1]")
            return cls(mode, rect=rect)
        if "polygon" in doc:
            poly = [(float(x), float(y)) for x, y in doc["polygon"]]
            return cls(mode, polygon=poly)
        raise ValidationError("selection needs a rect or polygon")


def selection_bin_mask(sel: ColorSelection, bins: tuple[int, int]) -> np.ndarray:
    """Rasterize the selection into a boolean grid over the histogram bins.

    Boundary bins are included: operators drag around visible clusters and
    expect edge bins to count.
    """
    sel.validate(bins)
    xb, yb = bins
    grid = np.zeros((yb, xb), dtype=bool)
    if sel.rect is not None:
        x0, y0, x1, y1 = sel.rect
        grid[y0 : y1 + 1, x0 : x1 + 1] = True
        return grid
    xs = np.arange(xb, dtype=np.float64)[None, :]
    ys = np.arange(yb, dtype=np.float64)[:, None]
    px = np.broadcast_to(xs, (yb, xb)).ravel()
    py = np.broadcast_to(ys, (yb, xb)).ravel()
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    verts = sel.polygon
    n = len(verts)
    for k in range(n):
        ax, ay = verts[k]
        bx, by = verts[(k + 1) % n]
        # even-odd crossing test against the edge
        cond = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = ax + (py - ay) * (bx - ax) / (by - ay) if by != ay else np.full_like(px, np.nan)
        inside ^= cond & (px < xcross)
        # inclusive boundary: point on the closed segment
        apx, apy = px - ax, py - ay
        abx, aby = bx - ax, by - ay
        ab2 = abx * abx + aby * aby
        if ab2 == 0:
            on_edge |= (apx == 0) & (apy == 0)
            continue
        cross = apx * aby - apy * abx
        t = (apx * abx + apy * aby) / ab2
        on_edge |= (np.abs(cross) < 1e-9 * max(1.0, math.sqrt(ab2))) & (t >= 0) & (t <= 1)
    return (inside | on_edge).reshape(yb, xb)


def extract_mask(
    image: np.ndarray,
    sel: ColorSelection,
    bins: tuple[int, int] = DEFAULT_BINS,
) -> np.ndarray:
    """Preliminary extraction: foreground iff the pixel's projected bin
    lies inside the selection (inclusive boundary)."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.size == 0:
        raise ValidationError("expected a non-empty (H, W, 3) image")
    grid = selection_bin_mask(sel, bins)
    hsi = rgb_image_to_hsi(image)
    xs, ys = project_image(hsi, sel.mode, bins)
    return grid[ys, xs]
