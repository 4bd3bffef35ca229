"""End-to-end orchestration of the extraction and refinement run.

The stage order is fixed: preliminary extraction, small-region removal,
seeded growth, adjacent connection, second area pass plus hole filling,
skeletonization, thinning, graph conversion, pruning, endpoint trimming,
polygonal approximation, gap closure, a second laxer prune, and export.
Every intermediate is recorded so the UI can show the per-stage strip.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

from . import export as export_mod
from .colorspace import ProjectionMode
from .errors import ValidationError
from .gapclosure import ConnectionParams, close_gaps
from .histogram import ColorSelection, extract_mask
from .lineargraph import NetGraph, attach_polylines, prune, raster_to_graph, trim_endpoints
from .regions import (
    GrowthParams,
    connect_adjacent,
    label_components,
    mean_region_color,
    region_grow,
    remove_small_regions,
    remove_small_holes,
)
from .skeleton import skeletonize, thin

MASK_STAGES = (
    "preliminary", "cleaned", "grown", "connected", "refined",
    "skeleton", "thinned",
)


class PipelineStageError(ValidationError):
    """A stage precondition failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    """All tunables of a run.  None of the defaults come from published
    values; they are engineering choices (see the README config table)."""

    mode: ProjectionMode = ProjectionMode.SATURATION_HUE
    bins: tuple[int, int] = (256, 256)
    t1: int = 8  # pre-growth minimum region area
    t2: int = 30  # post-growth minimum region area
    t3: int = 50  # maximum hole area to fill
    d_max: float = 0.08  # growth color-distance threshold
    max_grow_pixels: int | None = None
    do_skeletonize: bool = True
    do_thin: bool = True
    l1: float = 20.0  # minimum component chain length
    l2: float = 8.0  # minimum open branch length
    trim_n: int = 1  # endpoint pixels dropped per open arc end
    poly_tol: float = 2.0  # polygonal approximation deviation
    connection: ConnectionParams = field(default_factory=ConnectionParams)
    l1_second: float = 10.0
    l2_second: float = 4.0
    layer: str = "NETWORK"
    layer_color: tuple[float, float, float] | None = None  # default: region mean

    def __post_init__(self):
        for name in ("t1", "t2", "t3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.d_max < 0 or self.poly_tol <= 0 or self.trim_n < 0:
            raise ValidationError("bad growth/approximation settings")
        if self.l1_second > self.l1 or self.l2_second > self.l2:
            raise ValidationError("second prune thresholds must not exceed the first")

    # -- config plumbing --------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "mode": self.mode.value,
            "bins": list(self.bins),
            "t1": self.t1, "t2": self.t2, "t3": self.t3,
            "d_max": self.d_max,
            "max_grow_pixels": self.max_grow_pixels,
            "do_skeletonize": self.do_skeletonize,
            "do_thin": self.do_thin,
            "l1": self.l1, "l2": self.l2,
            "trim_n": self.trim_n,
            "poly_tol": self.poly_tol,
            "l1_second": self.l1_second, "l2_second": self.l2_second,
            "layer": self.layer,
            "layer_color": list(self.layer_color) if self.layer_color else None,
        }
        for f in dc_fields(ConnectionParams):
            doc[f"conn_{f.name}"] = getattr(self.connection, f.name)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        base = cls()
        kwargs: dict = {}
        conn_kwargs: dict = {}
        conn_names = {f.name for f in dc_fields(ConnectionParams)}
        for key, value in doc.items():
            if key.startswith("conn_") and key[5:] in conn_names:
                conn_kwargs[key[5:]] = value
            elif key == "mode":
                kwargs["mode"] = ProjectionMode(value)
            elif key == "bins":
                kwargs["bins"] = tuple(int(v) for v in value)
            elif key == "layer_color":
                kwargs["layer_color"] = tuple(float(v) for v in value) if value else None
            elif key in {f.name for f in dc_fields(cls)}:
                kwargs[key] = value
            else:
                raise ValidationError(f"unknown config key: {key}")
        kwargs["connection"] = ConnectionParams(**conn_kwargs) if conn_kwargs else base.connection
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Flat key = value text file; '#' starts a comment."""
        doc: dict = {}
        with open(path, "r", encoding="utf-8") as f:
            for raw in f:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError(f"bad config line: {raw.strip()!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                doc[key] = _parse_value(value)
        return cls.from_dict(doc)


def _parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", ""):
        return None
    if "," in text:
        return [_parse_value(part.strip()) for part in text.split(",")]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class RunArtifacts:
    """Everything a run produced, stage by stage."""

    masks: dict[str, np.ndarray]
    graphs: dict[str, NetGraph]
    gap_report: dict
    dxf: bytes
    graph_json: bytes
    mean_color: tuple[float, float, float]
    timings: dict[str, float]

    @property
    def final_graph(self) -> NetGraph:
        return self.graphs["final"]


def run_pipeline(image: np.ndarray, selection: ColorSelection,
                 cfg: PipelineConfig) -> RunArtifacts:
    """Execute the full refinement sequence over one image and selection.

    Pure function of its inputs: identical inputs produce byte-identical
    DXF output.  Raises PipelineStageError with the failing stage's name.
    """
    image = np.asarray(image, dtype=np.float64)
    masks: dict[str, np.ndarray] = {}
    graphs: dict[str, NetGraph] = {}
    timings: dict[str, float] = {}

    def stage(name: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except ValidationError as exc:
            raise PipelineStageError(name, str(exc)) from exc
        timings[name] = time.perf_counter() - t0
        return result

    masks["preliminary"] = stage("extract", extract_mask, image, selection, cfg.bins)

    _, table = stage("label", label_components, masks["preliminary"])
    masks["cleaned"] = stage("clean", remove_small_regions, masks["preliminary"], table, cfg.t1)

    if masks["cleaned"].any():
        masks["grown"] = stage(
            "grow", region_grow, image, masks["cleaned"],
            GrowthParams(cfg.d_max, cfg.max_grow_pixels),
        )
    else:
        masks["grown"] = masks["cleaned"].copy()
        timings["grow"] = 0.0
    assert not (masks["cleaned"] & ~masks["grown"]).any()  # growth is a superset

    masks["connected"] = stage("connect", connect_adjacent, masks["grown"])
    assert not (masks["grown"] & ~masks["connected"]).any()

    _, table2 = stage("label2", label_components, masks["connected"])
    refined = stage("area2", remove_small_regions, masks["connected"], table2, cfg.t2)
    _, table3 = stage("label3", label_components, refined)
    masks["refined"] = stage("holes", remove_small_holes, refined, table3, cfg.t3)

    masks["skeleton"] = (
        stage("skeletonize", skeletonize, masks["refined"])
        if cfg.do_skeletonize else masks["refined"].copy()
    )
    assert not (masks["skeleton"] & ~masks["refined"]).any()  # skeleton is a subset
    masks["thinned"] = (
        stage("thin", thin, masks["skeleton"]) if cfg.do_thin else masks["skeleton"].copy()
    )
    assert not (masks["thinned"] & ~masks["skeleton"]).any()

    graphs["traced"] = stage("graph", raster_to_graph, masks["thinned"])
    graphs["pruned"] = stage("prune", prune, graphs["traced"], cfg.l1, cfg.l2)
    graphs["trimmed"] = stage("trim", trim_endpoints, graphs["pruned"], cfg.trim_n)
    graphs["approximated"] = stage("approximate", attach_polylines, graphs["trimmed"], cfg.poly_tol)

    work = graphs["approximated"].copy()
    t0 = time.perf_counter()
    try:
        work, gap_report = close_gaps(work, cfg.connection)
    except ValidationError as exc:
        raise PipelineStageError("gapclosure", str(exc)) from exc
    timings["gapclosure"] = time.perf_counter() - t0
    graphs["closed"] = work.copy()

    graphs["final"] = stage("prune2", prune, graphs["closed"], cfg.l1_second, cfg.l2_second)

    if cfg.layer_color is not None:
        color = cfg.layer_color
    elif masks["refined"].any():
        color = mean_region_color(image, masks["refined"])
    else:
        color = (1.0, 1.0, 1.0)
    dxf = stage("export", export_mod.write_dxf, graphs["final"], cfg.layer, color)
    graph_json = export_mod.write_json(graphs["final"])

    return RunArtifacts(masks, graphs, gap_report, dxf, graph_json, color, timings)
