"""Graph representation of a unit-width raster network.

Nodes are the singular pixels (endpoints, junctions, isolated points);
arcs are the pixel chains between them.  Operations keep the structure
normalized: path pixels stay interior to arcs, and a node whose degree
drops to two is dissolved by merging its incident arcs.  Loop arcs
(a == b) anchor closed curves; their anchor node is the one tolerated
degree-2 node.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidationError

Point = tuple[float, float]

_RING = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))


class NodeKind(Enum):
    ENDPOINT = "endpoint"
    JUNCTION = "junction"
    ISOLATED = "isolated"


@dataclass
class Node:
    id: int
    kind: NodeKind
    x: float
    y: float

    @property
    def pos(self) -> Point:
        return (self.x, self.y)


@dataclass
class Arc:
    id: int
    a: int  # node id
    b: int  # node id (== a for loops)
    chain: list[Point]
    polyline: list[Point] | None = None


def _seg_len(p: Point, q: Point) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def polyline_length(pts: list[Point]) -> float:
    return sum(_seg_len(pts[k], pts[k + 1]) for k in range(len(pts) - 1))


def chain_length(chain: list[Point]) -> float:
    """Geometric step length (orthogonal steps 1, diagonal sqrt(2))."""
    return polyline_length(chain)


class NetGraph:
    """Mutable node/arc network with double-sided adjacency."""

    def __init__(self, width: int = 0, height: int = 0):
        self.width = width
        self.height = height
        self.nodes: dict[int, Node] = {}
        self.arcs: dict[int, Arc] = {}
        self._incident: dict[int, list[int]] = {}
        self._next_node = 0
        self._next_arc = 0

    # -- construction ---------------------------------------------------

    def add_node(self, x: float, y: float, kind: NodeKind) -> int:
        nid = self._next_node
        self._next_node += 1
        self.nodes[nid] = Node(nid, kind, float(x), float(y))
        self._incident[nid] = []
        return nid

    def add_arc(self, a: int, b: int, chain: list[Point],
                polyline: list[Point] | None = None) -> int:
        chain = [(float(x), float(y)) for x, y in chain]
        if polyline is not None:
            polyline = [(float(x), float(y)) for x, y in polyline]
        # Canonical orientation: lexicographically smaller end first.
        if a != b and self.nodes[b].pos < self.nodes[a].pos:
            a, b = b, a
            chain.reverse()
            if polyline is not None:
                polyline.reverse()
        aid = self._next_arc
        self._next_arc += 1
        self.arcs[aid] = Arc(aid, a, b, chain, polyline)
        self._incident[a].append(aid)
        if b != a:
            self._incident[b].append(aid)
        else:
            self._incident[a].append(aid)  # loops contribute two ends
        return aid

    def remove_arc(self, aid: int) -> None:
        arc = self.arcs.pop(aid)
        for end in {arc.a, arc.b}:
            self._incident[end] = [k for k in self._incident[end] if k != aid]

    def remove_node(self, nid: int) -> None:
        if self._incident[nid]:
            raise ValidationError("cannot remove a node with incident arcs")
        del self._incident[nid]
        del self.nodes[nid]

    # -- queries ---------------------------------------------------------

    def degree(self, nid: int) -> int:
        return len(self._incident[nid])

    def incident_arcs(self, nid: int) -> list[int]:
        return sorted(set(self._incident[nid]))

    def other_end(self, arc: Arc, nid: int) -> int:
        return arc.b if arc.a == nid else arc.a

    def components(self) -> list[set[int]]:
        """Connected components as node-id sets, deterministic order."""
        seen: set[int] = set()
        comps = []
        for nid in sorted(self.nodes):
            if nid in seen:
                continue
            comp = {nid}
            stack = [nid]
            seen.add(nid)
            while stack:
                cur = stack.pop()
                for aid in self._incident[cur]:
                    arc = self.arcs[aid]
                    nxt = self.other_end(arc, cur)
                    if nxt not in seen:
                        seen.add(nxt)
                        comp.add(nxt)
                        stack.append(nxt)
            comps.append(comp)
        return comps

    def refresh_kind(self, nid: int) -> None:
        deg = self.degree(nid)
        node = self.nodes[nid]
        if deg == 0:
            node.kind = NodeKind.ISOLATED
        elif deg == 1:
            node.kind = NodeKind.ENDPOINT
        elif deg >= 3:
            node.kind = NodeKind.JUNCTION
        # degree 2 keeps its kind until dissolved (loop anchors stay)

    def dissolve_if_degree2(self, nid: int) -> bool:
        """Merge the two arcs at a degree-2 node into one continuous arc.

        Loop anchors (both ends belong to the same arc) are kept.
        Returns True when the node was dissolved.
        """
        ends = self._incident[nid]
        if len(ends) != 2 or ends[0] == ends[1]:
            return False
        a1, a2 = sorted(set(ends))
        if a1 == a2:
            return False
        arc1, arc2 = self.arcs[a1], self.arcs[a2]
        c1 = list(arc1.chain)
        p1 = list(arc1.polyline) if arc1.polyline else None
        if arc1.a == nid:  # orient arc1 to end at the dissolving node
            c1.reverse()
            u = arc1.b
            if p1:
                p1.reverse()
        else:
            u = arc1.a
        c2 = list(arc2.chain)
        p2 = list(arc2.polyline) if arc2.polyline else None
        if arc2.b == nid:
            c2.reverse()
            v = arc2.a
            if p2:
                p2.reverse()
        else:
            v = arc2.b
        chain = c1 + c2[1:]
        poly = None
        if p1 is not None and p2 is not None:
            poly = p1 + (p2[1:] if p2 and p1 and p2[0] == p1[-1] else p2)
        self.remove_arc(a1)
        self.remove_arc(a2)
        self.remove_node(nid)
        self.add_arc(u, v, chain, poly)
        return True

    # -- serialization ----------------------------------------------------

    def to_json_obj(self) -> dict:
        nodes = [
            {"id": n.id, "kind": n.kind.value, "x": n.x, "y": n.y}
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
        ]
        arcs = [
            {
                "id": a.id,
                "a": a.a,
                "b": a.b,
                "chain": [[x, y] for x, y in a.chain],
                "polyline": [[x, y] for x, y in a.polyline] if a.polyline else None,
            }
            for a in sorted(self.arcs.values(), key=lambda a: a.id)
        ]
        return {"nodes": nodes, "arcs": arcs}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, doc: dict, width: int = 0, height: int = 0) -> "NetGraph":
        g = cls(width, height)
        for nd in doc["nodes"]:
            g.nodes[nd["id"]] = Node(nd["id"], NodeKind(nd["kind"]), nd["x"], nd["y"])
            g._incident[nd["id"]] = []
            g._next_node = max(g._next_node, nd["id"] + 1)
        for ad in doc["arcs"]:
            chain = [(float(x), float(y)) for x, y in ad["chain"]]
            poly = ad.get("polyline")
            if poly is not None:
                poly = [(float(x), float(y)) for x, y in poly]
            arc = Arc(ad["id"], ad["a"], ad["b"], chain, poly)
            g.arcs[arc.id] = arc
            g._incident[arc.a].append(arc.id)
            if arc.b != arc.a:
                g._incident[arc.b].append(arc.id)
            else:
                g._incident[arc.a].append(arc.id)
            g._next_arc = max(g._next_arc, arc.id + 1)
        return g

    @classmethod
    def from_json(cls, text: str | bytes) -> "NetGraph":
        return cls.from_json_obj(json.loads(text))

    def copy(self) -> "NetGraph":
        return NetGraph.from_json_obj(self.to_json_obj(), self.width, self.height)


def graph_pixels(g: NetGraph) -> set[tuple[int, int]]:
    """Every raster pixel covered by the graph (chains plus lone nodes)."""
    pixels: set[tuple[int, int]] = set()
    for arc in g.arcs.values():
        for x, y in arc.chain:
            pixels.add((int(round(x)), int(round(y))))
    for node in g.nodes.values():
        pixels.add((int(round(node.x)), int(round(node.y))))
    return pixels


# -- raster to graph ------------------------------------------------------


def _classify(flat: np.ndarray, idx: int, pw: int) -> tuple[int, int]:
    """(neighbor count, ring run count) of a padded flat index."""
    bits = [bool(flat[idx + dy * pw + dx]) for dx, dy in _RING]
    b = sum(bits)
    a = sum(1 for i in range(8) if not bits[i] and bits[(i + 1) % 8])
    return b, a


def raster_to_graph(skeleton: np.ndarray) -> NetGraph:
    """Convert a unit-width raster network into a NetGraph.

    Every foreground pixel is classified by its 8-neighborhood: count 0
    makes an isolated node, count 1 an endpoint, and three or more ring
    runs a junction.  Degree-2 runs between singular pixels become arcs;
    closed runs with no singular pixel get an artificial anchor node.
    """
    mask = np.asarray(skeleton, dtype=bool)
    sq = mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]
    if sq.any():
        y, x = np.argwhere(sq)[0]
        raise ValidationError(
            f"input is not unit-width: 2x2 foreground square at ({x}, {y})"
        )
    h, w = mask.shape
    pw = w + 2
    pad = np.zeros((h + 2, w + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    flat = pad.ravel()

    g = NetGraph(w, h)
    node_at: dict[int, int] = {}  # padded flat index -> node id
    ys, xs = np.nonzero(pad)
    order = sorted(int(y) * pw + int(x) for y, x in zip(ys, xs))
    path_pixels: list[int] = []
    for idx in order:
        b, a = _classify(flat, idx, pw)
        y, x = divmod(idx, pw)
        if b == 0:
            node_at[idx] = g.add_node(x - 1, y - 1, NodeKind.ISOLATED)
        elif b == 1:
            node_at[idx] = g.add_node(x - 1, y - 1, NodeKind.ENDPOINT)
        elif a >= 3:
            node_at[idx] = g.add_node(x - 1, y - 1, NodeKind.JUNCTION)
        else:
            path_pixels.append(idx)

    consumed = set()  # path pixels assigned to an arc
    direct_done = set()  # node-node adjacencies already emitted

    def to_xy(idx: int) -> Point:
        y, x = divmod(idx, pw)
        return (float(x - 1), float(y - 1))

    def ring_neighbors(idx: int) -> list[int]:
        return [idx + dy * pw + dx for dx, dy in _RING if flat[idx + dy * pw + dx]]

    def pick(cands: list[int], ref: int) -> int:
        """Prefer orthogonal contact, then raster order."""
        def key(c):
            dy, dx = divmod(c - ref + pw + 1, pw)
            diag = 1 if (abs(dx - 1) + abs(dy - 1)) == 2 else 0
            return (diag, c)
        return min(cands, key=key)

    def walk(origin_idx: int, first: int) -> tuple[list[Point], int | None]:
        """Trace a chain from a node through its first arm pixel.

        Returns the chain (starting at the origin node) and the flat index
        of the terminating node, or None when the chain dead-ends.
        """
        chain = [to_xy(origin_idx), to_xy(first)]
        consumed.add(first)
        prev, cur = origin_idx, first
        while True:
            nbs = [n for n in ring_neighbors(cur) if n != prev]
            node_cands = [n for n in nbs if n in node_at]
            open_cands = [n for n in nbs if n not in node_at and n not in consumed]
            # A node adjacent to both prev and cur is the contact we just
            # left; keep walking along the open chain when one exists.
            far_nodes = [n for n in node_cands if not _adjacent(n, prev, pw)]
            if far_nodes:
                end = pick(far_nodes, cur)
                chain.append(to_xy(end))
                return chain, end
            if open_cands:
                nxt = pick(open_cands, cur)
                consumed.add(nxt)
                chain.append(to_xy(nxt))
                prev, cur = cur, nxt
                continue
            if node_cands:
                end = pick(node_cands, cur)
                chain.append(to_xy(end))
                return chain, end
            return chain, None

    for idx in order:
        if idx not in node_at:
            continue
        nid = node_at[idx]
        for off_x, off_y in _RING:
            nb = idx + off_y * pw + off_x
            if not flat[nb]:
                continue
            if nb in node_at:
                key = (min(idx, nb), max(idx, nb))
                if key not in direct_done:
                    direct_done.add(key)
                    g.add_arc(nid, node_at[nb], [to_xy(idx), to_xy(nb)])
                continue
            if nb in consumed:
                continue
            chain, end_idx = walk(idx, nb)
            if end_idx is None:
                end_nid = g.add_node(chain[-1][0], chain[-1][1], NodeKind.ENDPOINT)
                node_at[int(chain[-1][1] + 1) * pw + int(chain[-1][0] + 1)] = end_nid
                g.add_arc(nid, end_nid, chain)
            else:
                g.add_arc(nid, node_at[end_idx], chain)

    # Closed runs with no singular pixel: anchor at the smallest raster
    # index and trace the loop.
    for idx in order:
        if idx in node_at or idx in consumed:
            continue
        b, _ = _classify(flat, idx, pw)
        if b != 2:
            continue
        anchor = g.add_node(*to_xy(idx), NodeKind.JUNCTION)
        node_at[idx] = anchor
        first = ring_neighbors(idx)[0]
        if first in consumed or first in node_at:
            continue
        chain, end_idx = walk(idx, first)
        if end_idx == idx:
            g.add_arc(anchor, anchor, chain)
        elif end_idx is None:
            end_nid = g.add_node(chain[-1][0], chain[-1][1], NodeKind.ENDPOINT)
            g.add_arc(anchor, end_nid, chain)

    # Robustness sweep: anything left unconsumed becomes an isolated node
    # so the pixel-set round trip holds for degenerate inputs.
    for idx in order:
        if idx not in node_at and idx not in consumed:
            node_at[idx] = g.add_node(*to_xy(idx), NodeKind.ISOLATED)

    return g


def _adjacent(a: int, b: int, pw: int) -> bool:
    ay, ax = divmod(a, pw)
    by, bx = divmod(b, pw)
    return max(abs(ax - bx), abs(ay - by)) <= 1


# -- pruning and trimming --------------------------------------------------


def prune(g: NetGraph, chain_min: float, branch_min: float) -> NetGraph:
    """Remove short components, then iteratively remove short open
    branches, dissolving junctions that drop to degree two.

    Components whose total chain length is under chain_min go first;
    open branches (arcs with at least one endpoint node) under branch_min
    are then deleted until stable.  Branch removal can shrink a component
    below chain_min, so the component check runs once more at the end;
    this keeps prune idempotent.
    """
    g = g.copy()

    def drop_short_components():
        for comp in g.components():
            total = 0.0
            arc_ids = set()
            for nid in comp:
                arc_ids.update(g._incident[nid])
            for aid in arc_ids:
                total += chain_length(g.arcs[aid].chain)
            if total < chain_min:
                for aid in sorted(arc_ids):
                    g.remove_arc(aid)
                for nid in sorted(comp):
                    g.remove_node(nid)

    drop_short_components()

    # Iterative branch removal.
    changed = True
    while changed:
        changed = False
        for aid in sorted(g.arcs):
            arc = g.arcs.get(aid)
            if arc is None:
                continue
            ka = g.nodes[arc.a].kind
            kb = g.nodes[arc.b].kind
            if ka is not NodeKind.ENDPOINT and kb is not NodeKind.ENDPOINT:
                continue
            if chain_length(arc.chain) >= branch_min:
                continue
            a, b = arc.a, arc.b
            g.remove_arc(aid)
            changed = True
            for nid in {a, b}:
                deg = g.degree(nid)
                if deg == 0:
                    g.remove_node(nid)
                else:
                    g.refresh_kind(nid)
                    if deg == 2:
                        g.dissolve_if_degree2(nid)

    drop_short_components()
    return g


def trim_endpoints(g: NetGraph, n: int) -> NetGraph:
    """Drop the n terminal chain pixels at every open arc end.

    The endpoint node follows the chain inward; a chain never shrinks
    below 2 positions.
    """
    if n < 0:
        raise ValidationError("trim count must be >= 0")
    if n == 0:
        return g.copy()
    g = g.copy()
    for aid in sorted(g.arcs):
        arc = g.arcs[aid]
        if arc.a == arc.b:
            continue
        chain = list(arc.chain)
        if g.nodes[arc.a].kind is NodeKind.ENDPOINT:
            k = min(n, len(chain) - 2)
            if k > 0:
                chain = chain[k:]
                node = g.nodes[arc.a]
                node.x, node.y = chain[0]
        if g.nodes[arc.b].kind is NodeKind.ENDPOINT:
            k = min(n, len(chain) - 2)
            if k > 0:
                chain = chain[: len(chain) - k]
                node = g.nodes[arc.b]
                node.x, node.y = chain[-1]
        arc.chain = chain
    return g


# -- polygonal approximation ------------------------------------------------


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / d2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def approximate_polygonal(chain: list[Point], tol: float) -> list[Point]:
    """Iterative endpoint fit: keep the end-to-end segment if every chain
    point is within tol of it, otherwise split at the farthest point and
    recurse.  The first farthest point wins ties, so output is stable."""
    if tol <= 0:
        raise ValidationError("tolerance must be > 0")
    if len(chain) < 2:
        raise ValidationError("chain needs at least 2 points")
    pts = [(float(x), float(y)) for x, y in chain]

    keep = [0, len(pts) - 1]
    stack = [(0, len(pts) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        a, b = pts[lo], pts[hi]
        worst, worst_idx = -1.0, -1
        for k in range(lo + 1, hi):
            dist = _point_segment_distance(pts[k], a, b)
            if dist > worst:
                worst, worst_idx = dist, k
        if worst > tol:
            keep.append(worst_idx)
            stack.append((lo, worst_idx))
            stack.append((worst_idx, hi))
    keep = sorted(set(keep))
    out = [pts[k] for k in keep]
    # collapse accidental duplicates while keeping >= 2 vertices
    dedup = [out[0]]
    for p in out[1:]:
        if p != dedup[-1]:
            dedup.append(p)
    if len(dedup) == 1:
        dedup.append(out[-1])
    return dedup


def attach_polylines(g: NetGraph, tol: float) -> NetGraph:
    """Fit a polygonal approximation to every arc chain."""
    if tol <= 0:
        raise ValidationError("tolerance must be > 0")
    g = g.copy()
    for arc in g.arcs.values():
        if len(arc.chain) >= 2:
            arc.polyline = approximate_polygonal(arc.chain, tol)
        else:
            arc.polyline = [arc.chain[0], arc.chain[0]] if arc.chain else []
    return g


def max_polyline_deviation(g: NetGraph) -> float:
    """Largest distance from any chain point to its arc's polyline."""
    worst = 0.0
    for arc in g.arcs.values():
        poly = arc.polyline
        if not poly or len(poly) < 2:
            continue
        for p in arc.chain:
            best = min(
                _point_segment_distance(p, poly[k], poly[k + 1])
                for k in range(len(poly) - 1)
            )
            worst = max(worst, best)
    return worst
