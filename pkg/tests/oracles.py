"""Independent reference implementations the test suite checks against.

Everything here is deliberately naive (explicit recursion, exhaustive
enumeration, textbook formulas) and shares no code with the package.
"""

from __future__ import annotations

import heapq
import itertools
import math
import sys

import numpy as np

sys.setrecursionlimit(100_000)


# -- color ------------------------------------------------------------------

_HSI_MATRIX = np.array([
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [-1.0 / math.sqrt(6.0), -1.0 / math.sqrt(6.0), 2.0 / math.sqrt(6.0)],
    [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0), 0.0],
])


def matrix_hsi(rgb):
    """Direct matrix evaluation of the HSI transform."""
    i, v1, v2 = _HSI_MATRIX @ np.asarray(rgb, dtype=np.float64)
    s = math.sqrt(v1 * v1 + v2 * v2)
    if s == 0.0:
        return 0.0, 0.0, float(i)
    h = math.atan2(v2, v1) % (2.0 * math.pi)
    return float(h), float(s), float(i)


def cartesian_chord_distance(a, b):
    """Law-of-cosines check through explicit Cartesian embedding."""
    h1, s1, i1 = a
    h2, s2, i2 = b
    p = (s1 * math.cos(h1), s1 * math.sin(h1), i1)
    q = (s2 * math.cos(h2), s2 * math.sin(h2), i2)
    return math.dist(p, q)


# -- labeling ----------------------------------------------------------------

def flood_fill_labels(mask, diagonal=True):
    """Recursive flood fill, labels assigned in raster order."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if diagonal:
        offsets = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
    else:
        offsets = [(0, -1), (-1, 0), (1, 0), (0, 1)]

    def fill(y, x, lbl):
        labels[y, x] = lbl
        for dx, dy in offsets:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and labels[ny, nx] == 0:
                fill(ny, nx, lbl)

    nxt = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] and labels[y, x] == 0:
                nxt += 1
                fill(y, x, nxt)
    return labels, nxt


# -- chamfer -----------------------------------------------------------------

def dijkstra_chamfer(mask):
    """Weighted shortest path to the nearest background pixel
    (orthogonal 3, diagonal 4) over the full pixel grid."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    INF = 1 << 40
    dist = np.full((h, w), INF, dtype=np.int64)
    heap = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                dist[y, x] = 0
                heap.append((0, y, x))
    heapq.heapify(heap)
    while heap:
        d, y, x = heapq.heappop(heap)
        if d > dist[y, x]:
            continue
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                ny, nx = y + dy, x + dx
                if not (0 <= ny < h and 0 <= nx < w):
                    continue
                nd = d + (3 if dx == 0 or dy == 0 else 4)
                if nd < dist[ny, nx]:
                    dist[ny, nx] = nd
                    heapq.heappush(heap, (nd, ny, nx))
    return dist


# -- graphs ------------------------------------------------------------------

def floyd_warshall(n_nodes, edges):
    """All-pairs shortest paths; edges are (a, b, weight)."""
    d = [[math.inf] * n_nodes for _ in range(n_nodes)]
    for k in range(n_nodes):
        d[k][k] = 0.0
    for a, b, w in edges:
        d[a][b] = min(d[a][b], w)
        d[b][a] = min(d[b][a], w)
    for k in range(n_nodes):
        for i in range(n_nodes):
            for j in range(n_nodes):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def exhaustive_max_clique(vertices, edges):
    """Largest clique by subset enumeration; ties by smallest sorted
    vertex tuple."""
    vset = sorted(vertices)
    eset = {frozenset(e) for e in edges}
    best = ()
    for size in range(len(vset), 0, -1):
        found = []
        for combo in itertools.combinations(vset, size):
            if all(frozenset(p) in eset for p in itertools.combinations(combo, 2)):
                found.append(combo)
        if found:
            best = min(found)
            break
    return best


# -- polyline ----------------------------------------------------------------

def naive_endpoint_fit(points, tol):
    """Plain recursive endpoint fit returning the kept vertex list."""
    pts = [(float(x), float(y)) for x, y in points]

    def seg_dist(p, a, b):
        ax, ay = a
        bx, by = b
        dx, dy = bx - ax, by - ay
        d2 = dx * dx + dy * dy
        if d2 == 0:
            return math.dist(p, a)
        t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / d2
        t = min(1.0, max(0.0, t))
        return math.dist(p, (ax + t * dx, ay + t * dy))

    def rec(lo, hi):
        if hi - lo < 2:
            return [lo, hi]
        worst, idx = -1.0, -1
        for k in range(lo + 1, hi):
            d = seg_dist(pts[k], pts[lo], pts[hi])
            if d > worst:
                worst, idx = d, k
        if worst <= tol:
            return [lo, hi]
        left = rec(lo, idx)
        right = rec(idx, hi)
        return left[:-1] + right

    keep = rec(0, len(pts) - 1)
    return [pts[k] for k in keep]


# -- growth ------------------------------------------------------------------

def replay_region_growth(image, seed, d_max, hsi_fn, dist_fn, label_fn):
    """Brute-force queue replay of seeded growth.

    Every step rescans all frontier pixels, computing the distance to the
    current mean of the component each one touches, and admits the global
    minimum (ties: raster index, then component id) while it is <= d_max.
    Returns the admission order as a list of (y, x) and the final mask.
    """
    image = np.asarray(image, dtype=np.float64)
    seed = np.asarray(seed, dtype=bool)
    h, w = seed.shape
    comp, n = label_fn(seed)
    out = seed.copy()
    sums = np.zeros((n + 1, 3))
    counts = np.zeros(n + 1, dtype=int)
    owner = np.zeros((h, w), dtype=int)
    for y in range(h):
        for x in range(w):
            if seed[y, x]:
                c = comp[y, x]
                owner[y, x] = c
                sums[c] += image[y, x]
                counts[c] += 1

    def frontier():
        items = []
        for y in range(h):
            for x in range(w):
                if out[y, x]:
                    continue
                comps = set()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        if dx == 0 and dy == 0:
                            continue
                        ny, nx = y + dy, x + dx
                        if 0 <= ny < h and 0 <= nx < w and out[ny, nx]:
                            comps.add(int(owner[ny, nx]))
                for c in sorted(comps):
                    items.append((y, x, c))
        return items

    order = []
    while True:
        cands = frontier()
        if not cands:
            break
        best = None
        for y, x, c in cands:
            mean = tuple(sums[c] / counts[c])
            d = dist_fn(hsi_fn(image[y, x]), hsi_fn(mean))
            key = (d, y * w + x, c)
            if best is None or key < best:
                best = key
        if best[0] > d_max:
            break
        d, flat, c = best
        y, x = divmod(flat, w)
        out[y, x] = True
        owner[y, x] = c
        sums[c] += image[y, x]
        counts[c] += 1
        order.append((y, x))
    return order, out


# -- DXF ---------------------------------------------------------------------

def parse_dxf(data: bytes):
    """Minimal DXF reader: group-code/value pairs into polylines.

    Returns a dict with 'layers' (name -> color) and 'polylines'
    (list of vertex lists).
    """
    text = data.decode("ascii")
    lines = text.splitlines()
    assert len(lines) % 2 == 0, "group codes and values must alternate"
    pairs = [(int(lines[k].strip()), lines[k + 1]) for k in range(0, len(lines), 2)]
    assert pairs[-1] == (0, "EOF")

    layers = {}
    polylines = []
    current = None
    vertex = None
    layer_name = None
    section_stack = []
    for code, value in pairs:
        if code == 0 and value == "SECTION":
            section_stack.append("open")
        elif code == 0 and value == "ENDSEC":
            assert section_stack, "ENDSEC without SECTION"
            section_stack.pop()
        if code == 0:
            if vertex is not None and current is not None:
                current.append(vertex)
                vertex = None
            if value == "POLYLINE":
                current = []
            elif value == "VERTEX":
                vertex = {}
            elif value == "SEQEND" and current is not None:
                polylines.append([(v[10], v[20]) for v in current])
                current = None
            elif value == "LAYER":
                layer_name = "pending"
        elif layer_name == "pending" and code == 2:
            layer_name = value
        elif layer_name not in (None, "pending") and code == 62:
            layers[layer_name] = int(value)
            layer_name = None
        elif vertex is not None and code in (10, 20, 30):
            vertex[code] = float(value)
    assert not section_stack, "unclosed SECTION"
    return {"layers": layers, "polylines": polylines}


# -- geometry ----------------------------------------------------------------

def hausdorff(a, b):
    """Symmetric Hausdorff distance between two point sets."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)

    def directed(p, q):
        worst = 0.0
        for chunk in np.array_split(p, max(1, len(p) // 1024)):
            d2 = ((chunk[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
            worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
        return worst

    return max(directed(a, b), directed(b, a))


def sample_polyline(points, step=0.25):
    """Dense samples along a polyline."""
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        length = float(np.linalg.norm(b - a))
        n = max(1, int(math.ceil(length / step)))
        for k in range(1, n + 1):
            out.append(a + (b - a) * (k / n))
    return np.array(out)
