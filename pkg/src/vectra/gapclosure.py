"""Connectivity restoration: propose endpoint joins from gap geometry,
inhibit the ones that cross the network or close degenerate cycles,
resolve multiway joins through clique extraction, and draw the repairs
into the graph.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

from .errors import ValidationError
from .lineargraph import NetGraph, NodeKind, Point, polyline_length

_EPS = 1e-9


@dataclass
class ConnectionParams:
    """Thresholds governing the whole gap-closure stage.

    max_cost bounds the angle-modulated connection cost; min_terminal_len
    is the terminal-segment length below which an arc's end direction is
    not trusted; ang_min/ang_max gate the best and worst continuation
    angle; ratio bounds constrain gap distance over terminal length.
    """

    max_cost: float = 40.0
    min_terminal_len: float = 3.0
    ang_min: float = math.pi / 4
    ang_max: float = 2 * math.pi / 3
    ratio_lo: float = 0.0
    ratio_hi: float = 10.0
    cycle_min_len: float = 20.0
    elongation_max: float = 10.0
    isolated_cost_max: float = 15.0
    collinear_tol: float = 0.2
    angle_weight: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.ang_min <= self.ang_max <= math.pi):
            raise ValidationError("need 0 <= ang_min <= ang_max <= pi")
        for name in ("max_cost", "min_terminal_len", "cycle_min_len",
                     "elongation_max", "isolated_cost_max"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0")


@dataclass
class ConnectionCandidate:
    e1: int
    e2: int
    dist: float
    phi1: float
    phi2: float
    len1: float
    len2: float
    cost: float

    def to_json_obj(self) -> dict:
        return {
            "e1": self.e1, "e2": self.e2, "D": self.dist,
            "phi1": self.phi1, "phi2": self.phi2,
            "L1": self.len1, "L2": self.len2, "cost": self.cost,
        }


def _terminal_segment(g: NetGraph, nid: int) -> tuple[Point, Point, float]:
    """Outward unit direction and length of the final polyline segment at
    an endpoint node; returns (position, direction, length)."""
    node = g.nodes[nid]
    if node.kind is not NodeKind.ENDPOINT:
        raise ValidationError(f"node {nid} is not an endpoint")
    arcs = g.incident_arcs(nid)
    if len(arcs) != 1:
        raise ValidationError(f"endpoint {nid} has degree {len(arcs)}")
    arc = g.arcs[arcs[0]]
    poly = arc.polyline
    if not poly or len(poly) < 2:
        raise ValidationError(f"arc {arc.id} has no polyline attached")
    if arc.a == nid:
        tip, inner = poly[0], poly[1]
    else:
        tip, inner = poly[-1], poly[-2]
    dx, dy = tip[0] - inner[0], tip[1] - inner[1]
    length = math.hypot(dx, dy)
    if length < _EPS:
        return node.pos, (0.0, 0.0), 0.0
    return node.pos, (dx / length, dy / length), length


def _angle_between(u: Point, v: Point) -> float:
    dot = u[0] * v[0] + u[1] * v[1]
    nu = math.hypot(*u)
    nv = math.hypot(*v)
    if nu < _EPS or nv < _EPS:
        return 0.0
    c = max(-1.0, min(1.0, dot / (nu * nv)))
    return math.acos(c)


def endpoint_geometry(g: NetGraph, e1: int, e2: int):
    """Gap parameters for a candidate join: Euclidean distance D, the
    angles phi1/phi2 between each terminal segment's outward direction
    and the connecting segment, and the terminal lengths L1/L2."""
    p1, u1, l1 = _terminal_segment(g, e1)
    p2, u2, l2 = _terminal_segment(g, e2)
    dx, dy = p2[0] - p1[0], p2[1] - p1[1]
    dist = math.hypot(dx, dy)
    if dist < _EPS:
        return 0.0, 0.0, 0.0, l1, l2
    c1 = (dx / dist, dy / dist)
    c2 = (-c1[0], -c1[1])
    return dist, _angle_between(u1, c1), _angle_between(u2, c2), l1, l2


def connection_cost(dist: float, phi1: float, phi2: float, k: float) -> float:
    """Gap distance modulated by a linear angular penalty; aligned arcs
    (phi = 0) cost exactly their distance."""
    return dist * (1.0 + k * (phi1 + phi2) / math.pi)


def candidate_connections(g: NetGraph, p: ConnectionParams) -> list[ConnectionCandidate]:
    """All endpoint pairs satisfying the five admission criteria.

    Pairs are gathered through a uniform spatial grid of cell size
    max_cost (cost >= D, so farther pairs cannot pass), and returned
    sorted by (cost, e1, e2).
    """
    endpoints = [nid for nid in sorted(g.nodes)
                 if g.nodes[nid].kind is NodeKind.ENDPOINT and g.degree(nid) == 1]
    cell = max(p.max_cost, _EPS)
    grid: dict[tuple[int, int], list[int]] = {}
    for nid in endpoints:
        node = g.nodes[nid]
        key = (int(node.x // cell), int(node.y // cell))
        grid.setdefault(key, []).append(nid)

    out = []
    seen = set()
    for (cx, cy), members in sorted(grid.items()):
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for e1 in members:
                    for e2 in grid.get((cx + dx, cy + dy), ()):
                        if e2 <= e1 or (e1, e2) in seen:
                            continue
                        seen.add((e1, e2))
                        dist, phi1, phi2, l1, l2 = endpoint_geometry(g, e1, e2)
                        cost = connection_cost(dist, phi1, phi2, p.angle_weight)
                        if cost >= p.max_cost:
                            continue
                        if not (l1 > p.min_terminal_len and l2 > p.min_terminal_len):
                            continue
                        if min(phi1, phi2) >= p.ang_min:
                            continue
                        if max(phi1, phi2) >= p.ang_max:
                            continue
                        r1, r2 = dist / l1, dist / l2
                        if not (p.ratio_lo <= r1 <= p.ratio_hi and p.ratio_lo <= r2 <= p.ratio_hi):
                            continue
                        out.append(ConnectionCandidate(e1, e2, dist, phi1, phi2, l1, l2, cost))
    out.sort(key=lambda c: (c.cost, c.e1, c.e2))
    return out


def shortest_path_length(g: NetGraph, a: int, b: int) -> float | None:
    """Dijkstra over the graph with polyline geometric arc weights;
    None when unreachable."""
    if a not in g.nodes or b not in g.nodes:
        raise ValidationError("unknown node id")
    if a == b:
        return 0.0
    dist = {a: 0.0}
    heap = [(0.0, a)]
    while heap:
        d, cur = heapq.heappop(heap)
        if cur == b:
            return d
        if d > dist.get(cur, math.inf):
            continue
        for aid in g.incident_arcs(cur):
            arc = g.arcs[aid]
            w = polyline_length(arc.polyline if arc.polyline else arc.chain)
            nxt = g.other_end(arc, cur)
            nd = d + w
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return None


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> tuple[float, float] | None:
    """Intersection parameters (t along ab, s along cd) when the closed
    segments intersect; None otherwise.  Collinear overlap reports the
    smallest overlapping t."""
    rx, ry = b[0] - a[0], b[1] - a[1]
    sx, sy = d[0] - c[0], d[1] - c[1]
    denom = rx * sy - ry * sx
    qpx, qpy = c[0] - a[0], c[1] - a[1]
    if abs(denom) < _EPS:
        if abs(qpx * ry - qpy * rx) > 1e-6:
            return None  # parallel, not collinear
        r2 = rx * rx + ry * ry
        if r2 < _EPS:
            return None
        t0 = (qpx * rx + qpy * ry) / r2
        t1 = t0 + (sx * rx + sy * ry) / r2
        lo, hi = min(t0, t1), max(t0, t1)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if lo > hi:
            return None
        return lo, 0.0
    t = (qpx * sy - qpy * sx) / denom
    s = (qpx * ry - qpy * rx) / denom
    if -1e-9 <= t <= 1 + 1e-9 and -1e-9 <= s <= 1 + 1e-9:
        return t, s
    return None


def segment_hits_network(g: NetGraph, a: Point, b: Point,
                         end_tol: float = 1e-6) -> bool:
    """True when segment ab intersects any arc polyline anywhere except
    within end_tol of its own endpoints a and b."""
    ab = math.hypot(b[0] - a[0], b[1] - a[1])
    if ab < _EPS:
        return False
    for aid in sorted(g.arcs):
        poly = g.arcs[aid].polyline or g.arcs[aid].chain
        for k in range(len(poly) - 1):
            hit = _segments_cross(a, b, poly[k], poly[k + 1])
            if hit is None:
                continue
            t = hit[0]
            if t * ab <= end_tol or (1.0 - t) * ab <= end_tol:
                continue  # touching its own ends is not a crossing
            return True
    return False


def inhibit(g: NetGraph, candidates: list[ConnectionCandidate],
            p: ConnectionParams) -> list[ConnectionCandidate]:
    """Drop candidates whose segment crosses the network, or whose
    closing cycle is shorter than cycle_min_len or over-elongated
    (in-graph path length over gap distance above elongation_max)."""
    survivors = []
    for cand in candidates:
        a = g.nodes[cand.e1].pos
        b = g.nodes[cand.e2].pos
        if segment_hits_network(g, a, b):
            continue
        path = shortest_path_length(g, cand.e1, cand.e2)
        if path is not None:
            if path < p.cycle_min_len:
                continue
            if cand.dist < _EPS or path / cand.dist > p.elongation_max:
                continue
        survivors.append(cand)
    return survivors


# -- multiway groups ---------------------------------------------------------


def _bron_kerbosch(r: set, pset: set, x: set, adj: dict, out: list) -> None:
    if not pset and not x:
        out.append(frozenset(r))
        return
    for v in sorted(pset):
        _bron_kerbosch(r | {v}, pset & adj[v], x & adj[v], adj, out)
        pset = pset - {v}
        x = x | {v}


def find_multiway_groups(candidates: list[ConnectionCandidate]):
    """Split the endpoint connectivity graph into multiway groups and
    residual pairs.

    Components (breadth-first search) are processed independently; the
    largest clique (ties by smallest sorted vertex list) is extracted
    repeatedly.  Cliques of three or more endpoints join simultaneously;
    two-cliques stay pair connections; single leftovers wait for the
    isolated-endpoint phase.
    """
    adj: dict[int, set[int]] = {}
    for c in candidates:
        adj.setdefault(c.e1, set()).add(c.e2)
        adj.setdefault(c.e2, set()).add(c.e1)

    seen: set[int] = set()
    groups: list[list[int]] = []
    pairs: list[tuple[int, int]] = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for nb in sorted(adj[v]):
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        remaining = set(comp)
        while remaining:
            sub_adj = {v: adj[v] & remaining for v in remaining}
            cliques: list[frozenset] = []
            _bron_kerbosch(set(), set(remaining), set(), sub_adj, cliques)
            best = max(cliques, key=lambda c: (len(c), [-v for v in sorted(c)]))
            members = sorted(best)
            if len(members) >= 3:
                groups.append(members)
            elif len(members) == 2:
                pairs.append((members[0], members[1]))
            remaining -= best
    return groups, pairs


# -- drawing -----------------------------------------------------------------


def _ray_intersection(p1: Point, u1: Point, p2: Point, u2: Point):
    """Forward intersection of two rays, or None."""
    denom = u1[0] * u2[1] - u1[1] * u2[0]
    if abs(denom) < _EPS:
        return None
    dx, dy = p2[0] - p1[0], p2[1] - p1[1]
    t = (dx * u2[1] - dy * u2[0]) / denom
    s = (dx * u1[1] - dy * u1[0]) / denom
    if t <= _EPS or s <= _EPS:
        return None
    return (p1[0] + t * u1[0], p1[1] + t * u1[1])


def draw_pair(g: NetGraph, e1: int, e2: int, collinear_tol: float) -> NetGraph:
    """Physically join two endpoints.

    Nearly collinear terminal segments get the direct segment; otherwise
    the join passes through the forward intersection of the two terminal
    rays, falling back to the direct segment when the rays miss.  The
    joined endpoints become degree two and are dissolved.  Mutates g.
    """
    p1, u1, _ = _terminal_segment(g, e1)
    p2, u2, _ = _terminal_segment(g, e2)
    dist, phi1, phi2, _, _ = endpoint_geometry(g, e1, e2)
    if phi1 <= collinear_tol and phi2 <= collinear_tol:
        join = [p1, p2]
    else:
        x = _ray_intersection(p1, u1, p2, u2)
        join = [p1, x, p2] if x is not None else [p1, p2]
    join = [q for k, q in enumerate(join) if k == 0 or q != join[k - 1]]
    if len(join) < 2:
        join = [p1, p2]
    g.add_arc(e1, e2, join, list(join))
    for nid in (e1, e2):
        if g.degree(nid) == 2:
            g.dissolve_if_degree2(nid)
    return g


def draw_multiway(g: NetGraph, group: list[int]) -> NetGraph:
    """Join three or more endpoints at the barycenter of the pairwise
    forward ray intersections (endpoint positions when every pair is
    parallel or backward).  Mutates g."""
    if len(group) < 3:
        raise ValidationError("multiway group needs at least 3 endpoints")
    tips = {}
    for nid in group:
        p, u, _ = _terminal_segment(g, nid)
        tips[nid] = (p, u)
    points = []
    members = sorted(group)
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            x = _ray_intersection(tips[a][0], tips[a][1], tips[b][0], tips[b][1])
            if x is not None:
                points.append(x)
    if not points:
        points = [tips[nid][0] for nid in members]
    bx = sum(q[0] for q in points) / len(points)
    by = sum(q[1] for q in points) / len(points)
    junction = g.add_node(bx, by, NodeKind.JUNCTION)
    for nid in members:
        p = tips[nid][0]
        seg = [p, (bx, by)] if p != (bx, by) else [p, (bx + _EPS, by)]
        g.add_arc(nid, junction, seg, list(seg))
    for nid in members:
        if g.degree(nid) == 2:
            g.dissolve_if_degree2(nid)
    return g


def connect_isolated(g: NetGraph, p: ConnectionParams) -> NetGraph:
    """Attach leftover endpoints whose terminal-ray extension meets the
    network within isolated_cost_max, splitting the hit arc.  Mutates g."""
    while True:
        endpoints = [nid for nid in sorted(g.nodes)
                     if g.nodes[nid].kind is NodeKind.ENDPOINT and g.degree(nid) == 1]
        connected_any = False
        for nid in endpoints:
            if nid not in g.nodes:
                continue
            try:
                pos, u, _ = _terminal_segment(g, nid)
            except ValidationError:
                continue
            if u == (0.0, 0.0):
                continue
            best = None  # (t, arc id, segment index, point)
            own = g.incident_arcs(nid)[0]
            for aid in sorted(g.arcs):
                poly = g.arcs[aid].polyline or g.arcs[aid].chain
                for k in range(len(poly) - 1):
                    hit = _ray_segment(pos, u, poly[k], poly[k + 1])
                    if hit is None:
                        continue
                    t, point = hit
                    if t <= 1e-6:
                        continue
                    key = (t, aid, k)
                    if best is None or key < best[:3]:
                        best = (t, aid, k, point)
            if best is None or best[0] >= p.isolated_cost_max:
                continue
            _, aid, seg_idx, point = best
            target = _split_arc_at(g, aid, seg_idx, point)
            g.add_arc(nid, target, [pos, point], [pos, point])
            if g.degree(nid) == 2:
                g.dissolve_if_degree2(nid)
            if g.degree(target) == 2:
                g.dissolve_if_degree2(target)
            connected_any = True
        if not connected_any:
            return g


def _ray_segment(origin: Point, u: Point, c: Point, d: Point):
    """(t, point) where origin + t*u first meets closed segment cd."""
    sx, sy = d[0] - c[0], d[1] - c[1]
    denom = u[0] * sy - u[1] * sx
    dx, dy = c[0] - origin[0], c[1] - origin[1]
    if abs(denom) < _EPS:
        return None
    t = (dx * sy - dy * sx) / denom
    s = (dx * u[1] - dy * u[0]) / denom
    if t <= _EPS or s < -1e-9 or s > 1 + 1e-9:
        return None
    return t, (origin[0] + t * u[0], origin[1] + t * u[1])


def _dedup(points: list[Point]) -> list[Point]:
    out = [points[0]]
    for p in points[1:]:
        if math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > _EPS:
            out.append(p)
    if len(out) == 1:
        out.append(points[-1])
    return out


def _split_arc_at(g: NetGraph, aid: int, seg_idx: int, point: Point) -> int:
    """Split an arc at a point on its polyline segment seg_idx, returning
    the node id to connect to (an existing end when the point lands on
    one, else a new junction)."""
    arc = g.arcs[aid]
    poly = list(arc.polyline or arc.chain)
    snap = 1e-6
    if math.hypot(point[0] - poly[0][0], point[1] - poly[0][1]) <= snap:
        return arc.a
    if math.hypot(point[0] - poly[-1][0], point[1] - poly[-1][1]) <= snap:
        return arc.b
    junction = g.add_node(point[0], point[1], NodeKind.JUNCTION)
    first = _dedup(poly[: seg_idx + 1] + [point])
    second = _dedup([point] + poly[seg_idx + 1 :])
    a, b = arc.a, arc.b
    g.remove_arc(aid)
    # Geometric edits detach chains from raster pixels; both halves carry
    # their polyline as the chain.
    g.add_arc(a, junction, list(first), list(first))
    g.add_arc(junction, b, list(second), list(second))
    for nid in (a, b):
        g.refresh_kind(nid)
    return junction


def close_gaps(g: NetGraph, p: ConnectionParams):
    """Full gap-closure pass; returns (graph, report).

    The report carries the proposed, inhibited, and drawn connections for
    visualization.  Mutates g.
    """
    proposed = candidate_connections(g, p)
    surviving = inhibit(g, proposed, p)
    groups, pairs = find_multiway_groups(surviving)
    for group in groups:
        draw_multiway(g, group)
    for e1, e2 in pairs:
        if e1 in g.nodes and e2 in g.nodes:
            draw_pair(g, e1, e2, p.collinear_tol)
    g = connect_isolated(g, p)
    report = {
        "proposed": [c.to_json_obj() for c in proposed],
        "inhibited": [c.to_json_obj() for c in proposed if c not in surviving],
        "groups": groups,
        "pairs": [list(pr) for pr in pairs],
    }
    return g, report
