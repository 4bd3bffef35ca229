"""vectra: semi-automatic vectorization of linear networks in color maps.

An operator outlines a color cluster on a 2D histogram of the scanned
map; the toolkit extracts the matching pixels, cleans and completes the
mask, reduces it to unit-width center lines, converts those to a graph,
fits polygonal approximations, restores lost connectivity, and writes
the network as DXF.
"""

from .colorspace import (
    HsiPixel,
    ProjectionMode,
    RgbPixel,
    S_MAX,
    color_distance,
    project,
    rgb_to_hsi,
)
from .errors import ValidationError
from .gapclosure import ConnectionCandidate, ConnectionParams, close_gaps
from .histogram import (
    ColorSelection,
    Histogram2D,
    build_histogram,
    extract_mask,
    render_histogram,
)
from .lineargraph import (
    NetGraph,
    NodeKind,
    approximate_polygonal,
    attach_polylines,
    prune,
    raster_to_graph,
    trim_endpoints,
)
from .pipeline import PipelineConfig, RunArtifacts, run_pipeline
from .regions import (
    GrowthParams,
    connect_adjacent,
    label_components,
    mean_region_color,
    region_grow,
    remove_small_holes,
    remove_small_regions,
)
from .skeleton import chamfer_distance, skeletonize, thin
from .export import nearest_aci, read_json, write_dxf, write_json

__version__ = "0.1.0"

__all__ = [
    "ColorSelection", "ConnectionCandidate", "ConnectionParams", "GrowthParams",
    "Histogram2D", "HsiPixel", "NetGraph", "NodeKind", "PipelineConfig",
    "ProjectionMode", "RgbPixel", "RunArtifacts", "S_MAX", "ValidationError",
    "approximate_polygonal", "attach_polylines", "build_histogram",
    "chamfer_distance", "close_gaps", "color_distance", "connect_adjacent",
    "extract_mask", "label_components", "mean_region_color", "nearest_aci",
    "project", "prune", "raster_to_graph", "read_json", "region_grow",
    "remove_small_holes", "remove_small_regions", "render_histogram",
    "rgb_to_hsi", "run_pipeline", "skeletonize", "thin", "trim_endpoints",
    "write_dxf", "write_json",
]
