"""Mask cleanup and completion: component labeling, area and hole
filtering, seeded region growing, and conservative adjacent-region
connection.

Foreground uses 8-connectivity and background 4-connectivity (the
standard duality, avoiding topological paradoxes in the skeleton stage).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colorspace import color_distance_arrays, rgb_image_to_hsi, rgb_to_hsi
from .errors import ValidationError


def _label_mask(value_mask: np.ndarray, diagonal: bool) -> tuple[np.ndarray, int]:
    """Run-based two-pass connected component labeling of True pixels."""
    h, w = value_mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    all_runs: list[tuple[int, int, int, int]] = []
    runs_prev: list[tuple[int, int, int]] = []
    next_id = 0
    pad = 1 if diagonal else 0
    parents: list[int] = []

    def find(x: int) -> int:
        root = x
        while parents[root] != root:
            root = parents[root]
        while parents[x] != root:
            parents[x], x = root, parents[x]
        return root

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parents[rb] = ra

    for y in range(h):
        row = value_mask[y]
        if not row.any():
            runs_prev = []
            continue
        diffs = np.diff(row.astype(np.int8))
        starts = np.flatnonzero(diffs == 1) + 1
        ends = np.flatnonzero(diffs == -1)
        starts = ([0] if row[0] else []) + starts.tolist()
        ends = ends.tolist() + ([w - 1] if row[-1] else [])
        runs_cur = []
        for x0, x1 in zip(starts, ends):
            rid = next_id
            next_id += 1
            parents.append(rid)
            runs_cur.append((int(x0), int(x1), rid))
            all_runs.append((y, int(x0), int(x1), rid))
        i = j = 0
        while i < len(runs_prev) and j < len(runs_cur):
            p0, p1, pid = runs_prev[i]
            c0, c1, cid = runs_cur[j]
            if p1 + pad >= c0 and c1 + pad >= p0:
                union(pid, cid)
            if p1 < c1:
                i += 1
            else:
                j += 1
        runs_prev = runs_cur

    # Second pass: contiguous final ids in raster order of first occurrence.
    remap: dict[int, int] = {}
    n_labels = 0
    for y, x0, x1, rid in all_runs:
        root = find(rid)
        lbl = remap.get(root)
        if lbl is None:
            n_labels += 1
            lbl = n_labels
            remap[root] = lbl
        labels[y, x0 : x1 + 1] = lbl
    return labels, n_labels


@dataclass
class RegionTable:
    """Per-region statistics for one mask, both pixel classes.

    Foreground regions are 8-connected, background regions 4-connected.
    A background region is a hole when it does not touch the image border.
    Adjacency is recorded between classes (a foreground region and the
    background regions it touches, and vice versa).
    """

    fg_labels: np.ndarray
    bg_labels: np.ndarray
    fg_areas: np.ndarray  # index 0 unused
    bg_areas: np.ndarray
    bg_is_hole: np.ndarray
    fg_bboxes: dict[int, tuple[int, int, int, int]] = field(default_factory=dict)
    fg_adjacency: dict[int, set[int]] = field(default_factory=dict)
    bg_adjacency: dict[int, set[int]] = field(default_factory=dict)

    @property
    def n_foreground(self) -> int:
        return len(self.fg_areas) - 1

    @property
    def n_background(self) -> int:
        return len(self.bg_areas) - 1


def label_components(mask: np.ndarray) -> tuple[np.ndarray, RegionTable]:
    """Label connected components and collect areas, adjacency and holes.

    Returns the foreground label map (0 = background, ids contiguous from
    1 in raster order of first occurrence) plus the region table.
    """
    mask = np.asarray(mask, dtype=bool)
    fg_labels, n_fg = _label_mask(mask, diagonal=True)
    bg_labels, n_bg = _label_mask(~mask, diagonal=False)
    fg_areas = np.bincount(fg_labels.ravel(), minlength=n_fg + 1)
    bg_areas = np.bincount(bg_labels.ravel(), minlength=n_bg + 1)
    fg_areas[0] = 0
    bg_areas[0] = 0

    bg_is_hole = np.ones(n_bg + 1, dtype=bool)
    bg_is_hole[0] = False
    border = np.concatenate([bg_labels[0], bg_labels[-1], bg_labels[:, 0], bg_labels[:, -1]])
    bg_is_hole[np.unique(border[border > 0])] = False

    fg_adj: dict[int, set[int]] = {k: set() for k in range(1, n_fg + 1)}
    bg_adj: dict[int, set[int]] = {k: set() for k in range(1, n_bg + 1)}
    # 4-neighbor class boundaries give the cross-class adjacency.
    for axis, shift in ((0, 1), (1, 1)):
        a = fg_labels[1:, :] if axis == 0 else fg_labels[:, 1:]
        b = bg_labels[:-1, :] if axis == 0 else bg_labels[:, :-1]
        for f, g in zip(*_nonzero_pairs(a, b)):
            fg_adj[f].add(g)
            bg_adj[g].add(f)
        a = bg_labels[1:, :] if axis == 0 else bg_labels[:, 1:]
        b = fg_labels[:-1, :] if axis == 0 else fg_labels[:, :-1]
        for g, f in zip(*_nonzero_pairs(a, b)):
            fg_adj[f].add(g)
            bg_adj[g].add(f)

    bboxes: dict[int, tuple[int, int, int, int]] = {}
    ys, xs = np.nonzero(fg_labels)
    if ys.size:
        lbls = fg_labels[ys, xs]
        order = np.argsort(lbls, kind="stable")
        lbls, ys, xs = lbls[order], ys[order], xs[order]
        cut = np.flatnonzero(np.diff(lbls)) + 1
        for ls, yseg, xseg in zip(
            np.split(lbls, cut), np.split(ys, cut), np.split(xs, cut)
        ):
            bboxes[int(ls[0])] = (int(xseg.min()), int(yseg.min()), int(xseg.max()), int(yseg.max()))

    return fg_labels, RegionTable(
        fg_labels, bg_labels, fg_areas, bg_areas, bg_is_hole, bboxes, fg_adj, bg_adj
    )


def _nonzero_pairs(a: np.ndarray, b: np.ndarray):
    sel = (a > 0) & (b > 0)
    return np.unique(np.stack([a[sel], b[sel]]), axis=1) if sel.any() else (np.empty(0, int), np.empty(0, int))


def remove_small_regions(mask: np.ndarray, table: RegionTable, threshold: int) -> np.ndarray:
    """Drop foreground regions whose area is strictly below the threshold."""
    keep = np.ones(len(table.fg_areas), dtype=bool)
    keep[1:] = table.fg_areas[1:] >= threshold
    keep[0] = False
    return keep[table.fg_labels]


def remove_small_holes(mask: np.ndarray, table: RegionTable, threshold: int) -> np.ndarray:
    """Fill enclosed background regions whose area is strictly below the
    threshold.  Border-touching background is never a hole."""
    fill = table.bg_is_hole.copy()
    fill[1:] &= table.bg_areas[1:] < threshold
    return np.asarray(mask, dtype=bool) | fill[table.bg_labels]


def connect_adjacent(mask: np.ndarray) -> np.ndarray:
    """Activate every background pixel with two or more foreground
    4-neighbors in the input mask.

    Single simultaneous pass, no iteration to fixpoint: a deliberately
    conservative join that leaves the main reconnection work to gap
    closure.
    """
    m = np.asarray(mask, dtype=bool)
    count = np.zeros(m.shape, dtype=np.uint8)
    count[1:, :] += m[:-1, :]
    count[:-1, :] += m[1:, :]
    count[:, 1:] += m[:, :-1]
    count[:, :-1] += m[:, 1:]
    return m | (~m & (count >= 2))


def mean_region_color(image: np.ndarray, mask: np.ndarray):
    """Arithmetic RGB mean over foreground pixels."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValidationError("mean_region_color of an empty mask")
    image = np.asarray(image, dtype=np.float64)
    sel = image[mask]
    return tuple(float(v) for v in sel.mean(axis=0))


@dataclass
class GrowthParams:
    """Controls for seeded region growing."""

    d_max: float
    max_pixels: int | None = None

    def __post_init__(self):
        if self.d_max < 0:
            raise ValidationError("d_max must be >= 0")


class _Frontier:
    """Frontier pixel store for one seed component.

    Parallel arrays with swap-removal; distances to the component's
    current mean are recomputed vectorized after every admission, which
    reproduces the brute-force queue semantics exactly.
    """

    __slots__ = ("idx", "h", "s", "i", "pos", "n")

    def __init__(self):
        cap = 64
        self.idx = np.empty(cap, dtype=np.int64)
        self.h = np.empty(cap, dtype=np.float64)
        self.s = np.empty(cap, dtype=np.float64)
        self.i = np.empty(cap, dtype=np.float64)
        self.pos: dict[int, int] = {}
        self.n = 0

    def add(self, flat: int, h: float, s: float, i: float) -> None:
        if flat in self.pos:
            return
        if self.n == len(self.idx):
            for name in ("idx", "h", "s", "i"):
                arr = getattr(self, name)
                grown = np.empty(2 * len(arr), dtype=arr.dtype)
                grown[: self.n] = arr[: self.n]
                setattr(self, name, grown)
        k = self.n
        self.idx[k] = flat
        self.h[k] = h
        self.s[k] = s
        self.i[k] = i
        self.pos[flat] = k
        self.n += 1

    def remove(self, flat: int) -> None:
        k = self.pos.pop(flat, None)
        if k is None:
            return
        last = self.n - 1
        if k != last:
            for arr in (self.idx, self.h, self.s, self.i):
                arr[k] = arr[last]
            self.pos[int(self.idx[k])] = k
        self.n -= 1

    def best(self, mean_hsi) -> tuple[float, int] | None:
        """(distance, flat index) of the closest pixel, raster-order ties."""
        if self.n == 0:
            return None
        d = color_distance_arrays(
            self.h[: self.n], self.s[: self.n], self.i[: self.n],
            mean_hsi[0], mean_hsi[1], mean_hsi[2],
        )
        dmin = d.min()
        ties = self.idx[: self.n][d == dmin]
        return float(dmin), int(ties.min())


_NEIGHBORS8 = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))


def region_grow(image: np.ndarray, seed: np.ndarray, params: GrowthParams) -> np.ndarray:
    """Best-first growth from the seed mask under the color metric.

    Each seed component keeps a running RGB mean (converted to HSI per
    comparison).  At every step the frontier pixel with the smallest
    distance to its component's current mean is admitted while that
    distance is <= d_max; ties break by raster index, then component id.
    """
    seed = np.asarray(seed, dtype=bool)
    if not seed.any():
        raise ValidationError("region_grow requires a non-empty seed")
    image = np.asarray(image, dtype=np.float64)
    h, w = seed.shape
    hsi = rgb_image_to_hsi(image)
    hh = hsi[..., 0].ravel()
    ss = hsi[..., 1].ravel()
    ii = hsi[..., 2].ravel()

    comp_labels, n_comp = _label_mask(seed, diagonal=True)
    comp_flat = comp_labels.ravel()
    out = seed.copy()
    out_flat = out.ravel()
    rgb_flat = image.reshape(-1, 3)

    sums = np.zeros((n_comp + 1, 3), dtype=np.float64)
    counts = np.zeros(n_comp + 1, dtype=np.int64)
    np.add.at(sums, comp_flat, rgb_flat)
    counts[: n_comp + 1] = np.bincount(comp_flat, minlength=n_comp + 1)

    frontiers = [None] + [_Frontier() for _ in range(n_comp)]

    def push_neighbors(flat: int, comp: int) -> None:
        y, x = divmod(flat, w)
        for dx, dy in _NEIGHBORS8:
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h:
                nflat = ny * w + nx
                if not out_flat[nflat]:
                    frontiers[comp].add(nflat, hh[nflat], ss[nflat], ii[nflat])

    seed_flats = np.flatnonzero(out_flat)
    for flat in seed_flats:
        push_neighbors(int(flat), int(comp_flat[flat]))

    means_hsi = [None] * (n_comp + 1)
    for c in range(1, n_comp + 1):
        means_hsi[c] = rgb_to_hsi(tuple(sums[c] / counts[c]))

    admitted = 0
    budget = params.max_pixels
    while True:
        best = None  # (d, flat, comp)
        for c in range(1, n_comp + 1):
            got = frontiers[c].best(means_hsi[c])
            while got is not None and out_flat[got[1]]:
                frontiers[c].remove(got[1])  # admitted via another component
                got = frontiers[c].best(means_hsi[c])
            if got is None:
                continue
            cand = (got[0], got[1], c)
            if best is None or cand < best:
                best = cand
        if best is None or best[0] > params.d_max:
            break
        if budget is not None and admitted >= budget:
            break
        d, flat, comp = best
        frontiers[comp].remove(flat)
        out_flat[flat] = True
        admitted += 1
        sums[comp] += rgb_flat[flat]
        counts[comp] += 1
        means_hsi[comp] = rgb_to_hsi(tuple(sums[comp] / counts[comp]))
        push_neighbors(flat, comp)

    return out_flat.reshape(h, w)
