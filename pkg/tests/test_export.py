import json
import math

import numpy as np
import pytest

from vectra.errors import ValidationError
from vectra.export import nearest_aci, read_json, write_dxf, write_json
from vectra.lineargraph import NetGraph, NodeKind, attach_polylines, raster_to_graph

from oracles import parse_dxf


def _graph(*polylines, size=64):
    g = NetGraph(size, size)
    for poly in polylines:
        a = g.add_node(*poly[0], NodeKind.ENDPOINT)
        b = g.add_node(*poly[-1], NodeKind.ENDPOINT)
        g.add_arc(a, b, list(poly), list(poly))
    return g


def test_empty_graph_minimal_valid_dxf():
    data = write_dxf(NetGraph(10, 10))
    doc = parse_dxf(data)  # oracle asserts section structure + EOF
    assert doc["polylines"] == []
    assert "NETWORK" in doc["layers"]


def test_single_arc_one_polyline_two_vertices():
    g = _graph([(1.0, 2.0), (5.0, 2.0)])
    doc = parse_dxf(write_dxf(g))
    assert len(doc["polylines"]) == 1
    assert len(doc["polylines"][0]) == 2


def test_y_axis_flip():
    g = _graph([(1.0, 2.0), (5.0, 2.0)], size=64)
    doc = parse_dxf(write_dxf(g))
    (x0, y0), (x1, y1) = doc["polylines"][0]
    assert (x0, y0) == (1.0, 61.0)  # 64 - 1 - 2
    assert (x1, y1) == (5.0, 61.0)


def test_round_trip_ten_arc_fixture():
    rng = np.random.default_rng(151)
    polys = []
    for _ in range(10):
        n = rng.integers(2, 7)
        polys.append([tuple(np.round(rng.uniform(0, 60, 2), 3)) for _ in range(n)])
    g = _graph(*polys)
    doc = parse_dxf(write_dxf(g))
    assert len(doc["polylines"]) == len(polys)
    for arc, got in zip(sorted(g.arcs.values(), key=lambda a: a.id), doc["polylines"]):
        assert len(got) == len(arc.polyline)
        for (px, py), (qx, qy) in zip(arc.polyline, got):
            assert qx == pytest.approx(px, abs=1e-9)
            assert qy == pytest.approx(64 - 1 - py, abs=1e-9)


def test_dxf_deterministic():
    g = _graph([(0.0, 0.0), (3.3333333, 7.1)], [(9.0, 9.0), (1.0, 4.0)])
    assert write_dxf(g) == write_dxf(g)


def test_missing_polyline_rejected():
    g = _graph([(0.0, 0.0), (5.0, 5.0)])
    next(iter(g.arcs.values())).polyline = None
    with pytest.raises(ValidationError):
        write_dxf(g)


def test_layer_and_color_written():
    g = _graph([(0.0, 0.0), (5.0, 5.0)])
    doc = parse_dxf(write_dxf(g, layer="RIVERS", color=(0.0, 0.0, 1.0)))
    assert doc["layers"]["RIVERS"] == 5  # pure blue is ACI 5


def test_nearest_aci_primaries():
    assert nearest_aci((1, 0, 0)) == 1
    assert nearest_aci((1, 1, 0)) == 2
    assert nearest_aci((0, 1, 0)) == 3
    assert nearest_aci((0, 1, 1)) == 4
    assert nearest_aci((0, 0, 1)) == 5
    assert nearest_aci((1, 0, 1)) == 6
    assert nearest_aci((1, 1, 1)) == 7


def test_json_empty_graph_literal():
    assert write_json(NetGraph()) == b'{"nodes":[],"arcs":[]}'


def test_json_round_trip_identity():
    mask = np.zeros((9, 9), dtype=bool)
    mask[4, 1:8] = True
    mask[1:8, 4] = True
    g = attach_polylines(raster_to_graph(mask), 1.0)
    data = write_json(g)
    back = read_json(data)
    assert back.to_json_obj() == g.to_json_obj()
    doc = json.loads(data)
    assert len(doc["nodes"]) == len(g.nodes)
    assert len(doc["arcs"]) == len(g.arcs)
