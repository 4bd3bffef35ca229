"""Center-line reduction: (3,4) chamfer distance transform, chamfer-based
skeletonization, and crossing-number thinning to unit width.

The skeleton stage anchors distance-map ridge pixels and erodes the rest
in increasing distance order under a topology-preserving simple-point
test; the thinning stage then guarantees unit width everywhere (the
skeleton may keep two-wide plateaus where the region width is even).
"""

from __future__ import annotations

import heapq

import numpy as np

_INF = np.int64(1) << 40

# Ring order around a pixel: N, NE, E, SE, S, SW, W, NW (offsets as x, y).
_RING = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))


def chamfer_distance(mask: np.ndarray) -> np.ndarray:
    """Two-pass (3,4) chamfer transform; background pixels are 0.

    Equals the weighted grid shortest-path distance to the nearest
    background pixel (orthogonal steps cost 3, diagonal steps 4).
    Foreground pixels of an all-foreground mask keep a large sentinel.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    d = np.where(mask, _INF, 0).astype(np.int64)
    ramp = 3 * np.arange(w, dtype=np.int64)

    def relax_row(cand: np.ndarray, reverse: bool) -> np.ndarray:
        # West (or east) propagation as a running minimum of cand - 3x.
        if reverse:
            cand = cand[::-1]
        out = np.minimum.accumulate(cand - ramp) + ramp
        return out[::-1] if reverse else out

    for y in range(h):
        cand = d[y].copy()
        if y > 0:
            up = d[y - 1]
            np.minimum(cand, up + 3, out=cand)
            np.minimum(cand[1:], up[:-1] + 4, out=cand[1:])
            np.minimum(cand[:-1], up[1:] + 4, out=cand[:-1])
        d[y] = relax_row(cand, reverse=False)
    for y in range(h - 1, -1, -1):
        cand = d[y].copy()
        if y < h - 1:
            dn = d[y + 1]
            np.minimum(cand, dn + 3, out=cand)
            np.minimum(cand[1:], dn[:-1] + 4, out=cand[1:])
            np.minimum(cand[:-1], dn[1:] + 4, out=cand[:-1])
        d[y] = relax_row(cand, reverse=True)
    return d


def _build_simple_lut() -> np.ndarray:
    """Deletability of a pixel from its 8-neighborhood bit pattern.

    A pixel is simple for (8-foreground, 4-background) connectivity iff
    its ring has exactly one 8-connected foreground component and exactly
    one 4-connected background component touching an orthogonal cell.
    Bit i of the pattern is ring position i (see _RING).
    """
    coords = list(_RING)
    adj8 = [
        [j for j in range(8) if j != i
         and abs(coords[i][0] - coords[j][0]) <= 1
         and abs(coords[i][1] - coords[j][1]) <= 1]
        for i in range(8)
    ]
    adj4 = [
        [j for j in range(8) if
         abs(coords[i][0] - coords[j][0]) + abs(coords[i][1] - coords[j][1]) == 1]
        for i in range(8)
    ]
    orthogonal = {0, 2, 4, 6}

    def components(cells: set[int], adj) -> list[set[int]]:
        comps = []
        left = set(cells)
        while left:
            stack = [left.pop()]
            comp = {stack[0]}
            while stack:
                c = stack.pop()
                for nb in adj[c]:
                    if nb in left:
                        left.remove(nb)
                        comp.add(nb)
                        stack.append(nb)
            comps.append(comp)
        return comps

    lut = np.zeros(256, dtype=bool)
    for pattern in range(256):
        fg = {i for i in range(8) if pattern >> i & 1}
        if not fg:
            continue
        if len(components(fg, adj8)) != 1:
            continue
        bg_comps = components(set(range(8)) - fg, adj4)
        touching = [c for c in bg_comps if c & orthogonal]
        if len(touching) == 1:
            lut[pattern] = True
    return lut


_SIMPLE_LUT = _build_simple_lut()


def _pad(mask: np.ndarray) -> np.ndarray:
    p = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    p[1:-1, 1:-1] = mask
    return p


def _ring_pattern(flat: np.ndarray, idx: int, w: int) -> int:
    pat = 0
    for bit, (dx, dy) in enumerate(_RING):
        if flat[idx + dy * w + dx]:
            pat |= 1 << bit
    return pat


def skeletonize(mask: np.ndarray) -> np.ndarray:
    """Reduce regions to an approximately centered connected skeleton.

    Ridge pixels of the (3,4) distance map (local maxima plus saddle
    points) are anchored; remaining border pixels are eroded in increasing
    distance order when their deletion preserves local connectivity.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return mask.copy()
    dt = chamfer_distance(mask)
    h, w = mask.shape

    # Local maxima: no neighbor reachable by one weighted step from here
    # has a distance that high (off-image counts as lower).  Value 3 acts
    # as radius 1 in the comparison, the standard correction for the
    # (3,4) transform; without it every object corner would anchor.
    eff = np.where(dt == 3, 1, dt)
    is_max = mask.copy()
    ring_higher = []
    for dx, dy in _RING:
        wstep = 3 if dx == 0 or dy == 0 else 4
        nb = np.full((h, w), -1, dtype=np.int64)
        ys0, ys1 = max(0, -dy), min(h, h - dy)
        xs0, xs1 = max(0, -dx), min(w, w - dx)
        nb[ys0:ys1, xs0:xs1] = dt[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]
        is_max &= nb < eff + wstep
        ring_higher.append(nb > dt)

    # Saddles: the strictly-higher neighbors form two or more runs around
    # the ring.
    runs = np.zeros((h, w), dtype=np.int8)
    for i in range(8):
        runs += ring_higher[i] & ~ring_higher[(i + 1) % 8]
    anchors = is_max | (mask & (runs >= 2))

    pad = _pad(mask)
    anchors_pad = _pad(anchors)
    flat = pad.ravel()
    aflat = anchors_pad.ravel()
    pw = w + 2
    dt_pad = np.zeros((h + 2, w + 2), dtype=np.int64)
    dt_pad[1:-1, 1:-1] = dt
    dflat = dt_pad.ravel()

    ys, xs = np.nonzero(pad)
    heap = [(int(dflat[y * pw + x]), int(y * pw + x)) for y, x in zip(ys, xs)]
    heapq.heapify(heap)
    orth = (-pw, -1, 1, pw)
    neigh = (-pw - 1, -pw, -pw + 1, -1, 1, pw - 1, pw, pw + 1)
    while heap:
        _, idx = heapq.heappop(heap)
        if not flat[idx] or aflat[idx]:
            continue
        if not any(not flat[idx + o] for o in orth):  # not a border pixel
            continue
        pat = _ring_pattern(flat, idx, pw)
        if not _SIMPLE_LUT[pat]:
            continue
        flat[idx] = False
        for o in neigh:
            j = idx + o
            if flat[j] and not aflat[j]:
                heapq.heappush(heap, (int(dflat[j]), j))
    return pad[1:-1, 1:-1]


def _zs_pass(m: np.ndarray, second: bool) -> np.ndarray:
    """One thinning sub-iteration; returns the deletion mask (padded)."""
    p2 = np.roll(m, 1, axis=0)
    p6 = np.roll(m, -1, axis=0)
    p4 = np.roll(m, -1, axis=1)
    p8 = np.roll(m, 1, axis=1)
    p3 = np.roll(p2, -1, axis=1)
    p9 = np.roll(p2, 1, axis=1)
    p5 = np.roll(p6, -1, axis=1)
    p7 = np.roll(p6, 1, axis=1)
    seq = (p2, p3, p4, p5, p6, p7, p8, p9)
    b = np.zeros(m.shape, dtype=np.int8)
    for q in seq:
        b += q
    # Rutovitz crossing number counts ring transitions; exactly one
    # foreground run means the pixel is not an articulation locally.
    a = np.zeros(m.shape, dtype=np.int8)
    for i in range(8):
        a += (~seq[i].astype(bool)) & seq[(i + 1) % 8].astype(bool)
    cond = m & (b >= 2) & (b <= 6) & (a == 1)
    if not second:
        cond &= ~(p2 & p4 & p6) & ~(p4 & p6 & p8)
    else:
        cond &= ~(p2 & p4 & p8) & ~(p2 & p6 & p8)
    return cond


def _topology_counts(mask: np.ndarray) -> tuple[int, int]:
    from .regions import _label_mask

    _, n_fg = _label_mask(mask, diagonal=True)
    _, n_bg = _label_mask(~mask, diagonal=False)
    return n_fg, n_bg


def _shed_mass(mask: np.ndarray) -> int:
    """Foreground pixels outside the largest component."""
    from .regions import _label_mask

    labels, n = _label_mask(mask, diagonal=True)
    if n <= 1:
        return 0
    areas = np.bincount(labels.ravel(), minlength=n + 1)[1:]
    return int(areas.sum() - areas.max())


def _clear_squares(pad: np.ndarray) -> bool:
    """Delete pixels until no 2x2 square is fully foreground.

    Locally simple non-endpoint pixels go first; squares whose four
    pixels all carry diagonal arms have no locally simple pixel, so those
    fall back to a whole-image topology check (foreground and background
    component counts must both be preserved).  Returns True if anything
    was deleted."""
    deleted = False
    pw = pad.shape[1]
    flat = pad.ravel()
    while True:
        sq = pad[:-1, :-1] & pad[1:, :-1] & pad[:-1, 1:] & pad[1:, 1:]
        if not sq.any():
            return deleted
        progressed = False
        squares = list(zip(*np.nonzero(sq)))
        for y, x in squares:
            pixels = [(y + dy) * pw + (x + dx)
                      for dy, dx in ((0, 0), (0, 1), (1, 0), (1, 1)) if flat[(y + dy) * pw + (x + dx)]]
            for idx in pixels:
                pat = _ring_pattern(flat, idx, pw)
                if _SIMPLE_LUT[pat] and bin(pat).count("1") >= 2:
                    flat[idx] = False
                    deleted = progressed = True
                    break
            if not progressed:
                before = _topology_counts(pad)
                for idx in pixels:
                    flat[idx] = False
                    if _topology_counts(pad) == before:
                        deleted = progressed = True
                        break
                    flat[idx] = True
            if not progressed:
                # Four diagonal pendant arms make the square irreducible
                # without splitting; shed the smallest mass (the orphaned
                # fragment is later pruned or reconnected downstream).
                best_idx, best_shed = None, None
                for idx in pixels:
                    flat[idx] = False
                    shed = _shed_mass(pad)
                    flat[idx] = True
                    if best_shed is None or shed < best_shed:
                        best_idx, best_shed = idx, shed
                flat[best_idx] = False
                deleted = progressed = True
            if progressed:
                break
        if not progressed:
            return deleted


def thin(mask: np.ndarray) -> np.ndarray:
    """Iterative thinning until every remaining pixel is necessary.

    Alternating sub-iterations gated by neighbor count and the crossing
    number, followed by a sequential cleanup of any residual 2x2 squares;
    the result is a unit-width chain set and thin() is idempotent on it.
    """
    pad = _pad(np.asarray(mask, dtype=bool))
    while True:
        changed = False
        while True:
            d1 = _zs_pass(pad, second=False)
            pad &= ~d1
            d2 = _zs_pass(pad, second=True)
            pad &= ~d2
            if not (d1.any() or d2.any()):
                break
            changed = True
        if not _clear_squares(pad) and not changed:
            break
    return pad[1:-1, 1:-1]
