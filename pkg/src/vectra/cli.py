"""Command line interface.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .colorspace import ProjectionMode
from .errors import ValidationError
from .histogram import ColorSelection, build_histogram, render_histogram
from .pipeline import PipelineConfig, run_pipeline
from .raster_io import load_image_file, save_mask_file, save_png


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vectra",
                                     description="Vectorize linear networks in color maps")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline over one image")
    run.add_argument("--image", required=True, help="input PNG or PPM")
    run.add_argument("--selection", required=True, help="ColorSelection JSON file")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--out", required=True, help="output DXF path")
    run.add_argument("--dump-stages", metavar="DIR", help="write per-stage rasters here")
    run.add_argument("--json-out", help="write the final NetGraph JSON here")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config value (repeatable)")

    hist = sub.add_parser("histogram", help="render the 2D color histogram")
    hist.add_argument("--image", required=True)
    hist.add_argument("--mode", choices=["sh", "si"], default="sh")
    hist.add_argument("--out", required=True, help="output PNG path")
    hist.add_argument("--bins", type=int, default=256)

    srv = sub.add_parser("serve", help="start the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--config", help="default pipeline config file")
    srv.add_argument("--ui-dir", help="static directory with the browser UI")

    return parser


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = getattr(args, "set", [])
    if overrides:
        doc = cfg.to_dict()
        from .pipeline import _parse_value

        for item in overrides:
            if "=" not in item:
                raise ValidationError(f"--set needs KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            doc[key.strip()] = _parse_value(value.strip())
        cfg = PipelineConfig.from_dict(doc)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    image = load_image_file(args.image)
    selection = ColorSelection.from_json(Path(args.selection).read_text())
    artifacts = run_pipeline(image, selection, cfg)
    Path(args.out).write_bytes(artifacts.dxf)
    if args.json_out:
        Path(args.json_out).write_bytes(artifacts.graph_json)
    if args.dump_stages:
        outdir = Path(args.dump_stages)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, mask in artifacts.masks.items():
            save_mask_file(mask, outdir / f"{name}.pbm")
            save_png(mask, outdir / f"{name}.png")
    n_nodes = len(artifacts.final_graph.nodes)
    n_arcs = len(artifacts.final_graph.arcs)
    print(f"wrote {args.out}: {n_arcs} arcs, {n_nodes} nodes")
    return 0


def _cmd_histogram(args) -> int:
    image = load_image_file(args.image)
    hist = build_histogram(image, ProjectionMode(args.mode), (args.bins, args.bins))
    save_png(render_histogram(hist), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    cfg = PipelineConfig.from_file(args.config) if args.config else None
    serve(args.host, args.port, cfg, args.ui_dir)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "histogram": _cmd_histogram, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
