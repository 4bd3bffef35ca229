"""RGB to HSI conversion, planar projection, and the color distance metric.

The HSI transform is the linear opponent form: intensity is the channel
mean, and the two chroma axes are

    V1 = (-R - G + 2B) / sqrt(6)
    V2 = (R - G) / sqrt(2)

with hue = atan2(V2, V1) remapped to [0, 2pi) and saturation the chroma
magnitude.  All three channel weights in each chroma row sum to zero, so
the gray axis has saturation exactly 0, and every fully saturated cube
corner reaches S_MAX = sqrt(2/3).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

# Maximum saturation over the RGB unit cube; attained at all six chromatic
# corners.  Fixed analytically so bin coordinates are image-independent.
S_MAX = math.sqrt(2.0 / 3.0)

_INV_SQRT6 = 1.0 / math.sqrt(6.0)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class RgbPixel(NamedTuple):
    r: float
    g: float
    b: float


class HsiPixel(NamedTuple):
    h: float  # hue angle, radians in [0, 2pi)
    s: float  # saturation >= 0
    i: float  # intensity in [0, 1]


class ProjectionMode(Enum):
    """Which color plane the 2D histogram is built over."""

    SATURATION_HUE = "sh"
    SATURATION_INTENSITY = "si"


def rgb_to_hsi(p: RgbPixel | tuple[float, float, float]) -> HsiPixel:
    """Convert one RGB pixel (channels in [0, 1]) to HSI coordinates.

    Total function: the achromatic case V1 = V2 = 0 returns hue 0.
    """
    r, g, b = p
    i = (r + g + b) / 3.0
    v1 = (-r - g + 2.0 * b) * _INV_SQRT6
    v2 = (r - g) * _INV_SQRT2
    s = math.hypot(v1, v2)
    if s == 0.0:
        return HsiPixel(0.0, 0.0, i)
    h = math.atan2(v2, v1)
    if h < 0.0:
        h += TWO_PI
    if h >= TWO_PI:  # atan2 can round to -0.0 -> 2pi
        h = 0.0
    return HsiPixel(h, s, i)


def rgb_image_to_hsi(img: np.ndarray) -> np.ndarray:
    """Vectorized rgb_to_hsi over an (..., 3) float array in [0, 1].

    Returns an array of the same shape with channels (h, s, i).
    """
    img = np.asarray(img, dtype=np.float64)
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    i = (r + g + b) / 3.0
    v1 = (-r - g + 2.0 * b) * _INV_SQRT6
    v2 = (r - g) * _INV_SQRT2
    s = np.hypot(v1, v2)
    h = np.arctan2(v2, v1)
    np.mod(h, TWO_PI, out=h)
    h[s == 0.0] = 0.0
    h[h >= TWO_PI] = 0.0
    return np.stack([h, s, i], axis=-1)


def hsi_to_rgb(h, s, i, clamp_saturation: bool = True):
    """Inverse transform, vectorized over broadcastable arrays.

    With clamp_saturation the saturation is reduced, per element, to the
    largest value that keeps all three RGB channels inside [0, 1] at the
    given intensity (the display gamut clamp used by histogram rendering).
    """
    h = np.asarray(h, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    i = np.asarray(i, dtype=np.float64)
    # Unit-saturation channel directions: rgb = i + s * dir
    c, z = np.cos(h), np.sin(h)
    dr = -c * _INV_SQRT6 + z * _INV_SQRT2
    dg = -c * _INV_SQRT6 - z * _INV_SQRT2
    db = 2.0 * c * _INV_SQRT6
    if clamp_saturation:
        s = np.minimum(s, max_display_saturation(h, i))
    r = i + s * dr
    g = i + s * dg
    b = i + s * db
    rgb = np.stack(np.broadcast_arrays(r, g, b), axis=-1)
    return np.clip(rgb, 0.0, 1.0)


def max_display_saturation(h, i):
    """Largest saturation representable in RGB at hue h and intensity i."""
    h = np.asarray(h, dtype=np.float64)
    i = np.asarray(i, dtype=np.float64)
    c, z = np.cos(h), np.sin(h)
    dirs = np.stack(
        np.broadcast_arrays(
            -c * _INV_SQRT6 + z * _INV_SQRT2,
            -c * _INV_SQRT6 - z * _INV_SQRT2,
            2.0 * c * _INV_SQRT6,
        ),
        axis=-1,
    )
    ii = np.broadcast_to(i, dirs.shape[:-1])[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(dirs > 1e-12, (1.0 - ii) / dirs, np.inf)
        down = np.where(dirs < -1e-12, ii / -dirs, np.inf)
    limit = np.minimum(up, down).min(axis=-1)
    return np.maximum(limit, 0.0)


def quantize(value: float, bins: int) -> int:
    """Map value in [0, 1] to a bin index by the floor rule, clamping to
    the last bin so range endpoints stay inside the grid."""
    k = int(value * bins)
    if k < 0:
        return 0
    if k >= bins:
        return bins - 1
    return k


def project(p: HsiPixel, mode: ProjectionMode, bins: tuple[int, int]) -> tuple[int, int]:
    """Project an HSI pixel onto the selected color plane bin grid.

    Saturation is always the X axis (normalized by S_MAX); Y is hue for
    SATURATION_HUE and intensity for SATURATION_INTENSITY.
    """
    xb, yb = bins
    x = quantize(p.s / S_MAX, xb)
    if mode is ProjectionMode.SATURATION_HUE:
        y = quantize(p.h / TWO_PI, yb)
    else:
        y = quantize(p.i, yb)
    return x, y


def project_image(hsi: np.ndarray, mode: ProjectionMode, bins: tuple[int, int]):
    """Vectorized project over an (..., 3) HSI array; returns (xs, ys)."""
    xb, yb = bins
    xs = np.clip((hsi[..., 1] / S_MAX * xb).astype(np.int64), 0, xb - 1)
    if mode is ProjectionMode.SATURATION_HUE:
        ys = np.clip((hsi[..., 0] / TWO_PI * yb).astype(np.int64), 0, yb - 1)
    else:
        ys = np.clip((hsi[..., 2] * yb).astype(np.int64), 0, yb - 1)
    return xs, ys


def hue_difference(h1, h2):
    """Absolute hue difference wrapped into [0, pi]."""
    d = np.abs(np.asarray(h1, dtype=np.float64) - np.asarray(h2, dtype=np.float64))
    return np.where(d > math.pi, TWO_PI - d, d)


def color_distance(a: HsiPixel, b: HsiPixel) -> float:
    """Euclidean distance in cylindrical HSI space.

    Intensity difference combined with the chord length between the two
    (saturation, hue) polar points: d = sqrt(dI^2 + dC^2) with
    dC^2 = S1^2 + S2^2 - 2 S1 S2 cos(phi).
    """
    di = abs(a.i - b.i)
    phi = abs(a.h - b.h)
    if phi > math.pi:
        phi = TWO_PI - phi
    dc2 = a.s * a.s + b.s * b.s - 2.0 * a.s * b.s * math.cos(phi)
    if dc2 < 0.0:  # rounding guard
        dc2 = 0.0
    return math.sqrt(di * di + dc2)


def color_distance_arrays(h1, s1, i1, h2, s2, i2):
    """Vectorized color_distance over broadcastable components."""
    di = np.abs(np.asarray(i1, dtype=np.float64) - i2)
    phi = hue_difference(h1, h2)
    s1 = np.asarray(s1, dtype=np.float64)
    s2 = np.asarray(s2, dtype=np.float64)
    dc2 = np.maximum(s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * np.cos(phi), 0.0)
    return np.sqrt(di * di + dc2)
