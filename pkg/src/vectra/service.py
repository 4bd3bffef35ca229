"""HTTP service hosting the interactive selection loop.

Sessions are independent and held in a size-bounded in-memory store;
each keeps the uploaded image, the current selection, and completed run
artifacts until evicted.
"""

from __future__ import annotations

import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response

from .colorspace import ProjectionMode
from .errors import ValidationError
from .histogram import ColorSelection, build_histogram, extract_mask, render_histogram
from .pipeline import MASK_STAGES, PipelineConfig, RunArtifacts, run_pipeline
from .raster_io import encode_png, load_image

MAX_UPLOAD_DEFAULT = 32 * 1024 * 1024
MAX_SESSIONS_DEFAULT = 16


@dataclass
class Session:
    image: np.ndarray | None = None
    selection: ColorSelection | None = None
    runs: dict[str, RunArtifacts] = field(default_factory=dict)
    run_counter: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """LRU-bounded session map; oldest sessions expire first."""

    def __init__(self, max_sessions: int = MAX_SESSIONS_DEFAULT):
        self._sessions: OrderedDict[str, Session] = OrderedDict()
        self._max = max_sessions
        self._lock = threading.Lock()

    def create(self) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._sessions[sid] = Session()
            while len(self._sessions) > self._max:
                self._sessions.popitem(last=False)
        return sid

    def get(self, sid: str) -> Session:
        with self._lock:
            if sid not in self._sessions:
                raise HTTPException(404, f"unknown session {sid}")
            self._sessions.move_to_end(sid)
            return self._sessions[sid]


def create_app(defaults: PipelineConfig | None = None,
               max_upload: int = MAX_UPLOAD_DEFAULT,
               max_sessions: int = MAX_SESSIONS_DEFAULT,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="vectra")
    store = SessionStore(max_sessions)
    base_cfg = defaults or PipelineConfig()

    def _png(data: np.ndarray) -> Response:
        return Response(content=encode_png(data), media_type="image/png")

    @app.post("/api/session")
    def new_session():
        return {"session_id": store.create()}

    @app.post("/api/session/{sid}/image", status_code=204)
    async def upload_image(sid: str, request: Request):
        sess = store.get(sid)
        data = await request.body()
        if len(data) > max_upload:
            raise HTTPException(413, f"upload exceeds the {max_upload} byte cap")
        try:
            image = load_image(data)
        except ValidationError as exc:
            raise HTTPException(400, str(exc))
        with sess.lock:
            sess.image = image
            sess.selection = None
            sess.runs.clear()
        return Response(status_code=204)

    @app.get("/api/session/{sid}/histogram")
    def histogram_png(sid: str, mode: str = "sh"):
        sess = store.get(sid)
        if sess.image is None:
            raise HTTPException(409, "no image uploaded")
        try:
            pmode = ProjectionMode(mode)
        except ValueError:
            raise HTTPException(400, f"unknown mode {mode!r}")
        hist = build_histogram(sess.image, pmode, base_cfg.bins)
        return _png(render_histogram(hist))

    @app.post("/api/session/{sid}/selection", status_code=204)
    async def post_selection(sid: str, request: Request):
        sess = store.get(sid)
        if sess.image is None:
            raise HTTPException(409, "no image uploaded")
        try:
            sel = ColorSelection.from_json(await request.body())
            sel.validate(base_cfg.bins)
        except ValidationError as exc:
            raise HTTPException(400, str(exc))
        with sess.lock:
            sess.selection = sel
        return Response(status_code=204)

    @app.get("/api/session/{sid}/preview")
    def preview(sid: str):
        sess = store.get(sid)
        if sess.image is None or sess.selection is None:
            raise HTTPException(409, "image and selection required")
        mask = extract_mask(sess.image, sess.selection, base_cfg.bins)
        dimmed = sess.image * 0.35
        dimmed[mask] = sess.image[mask]
        return _png(dimmed)

    @app.post("/api/session/{sid}/run")
    async def run(sid: str, request: Request):
        sess = store.get(sid)
        if sess.image is None or sess.selection is None:
            raise HTTPException(409, "image and selection required")
        body = await request.body()
        try:
            overrides = PipelineConfig.from_dict(
                {**base_cfg.to_dict(), **(_json_or_empty(body))}
            )
        except ValidationError as exc:
            raise HTTPException(400, str(exc))
        with sess.lock:
            try:
                artifacts = run_pipeline(sess.image, sess.selection, overrides)
            except ValidationError as exc:
                raise HTTPException(400, str(exc))
            sess.run_counter += 1
            run_id = f"r{sess.run_counter}"
            sess.runs[run_id] = artifacts
        return {"run_id": run_id, "timings": artifacts.timings}

    def _get_run(sid: str, run_id: str) -> RunArtifacts:
        sess = store.get(sid)
        if run_id not in sess.runs:
            raise HTTPException(404, f"unknown run {run_id}")
        return sess.runs[run_id]

    @app.get("/api/session/{sid}/run/{run_id}/graph")
    def run_graph(sid: str, run_id: str):
        artifacts = _get_run(sid, run_id)
        return Response(content=artifacts.graph_json, media_type="application/json")

    @app.get("/api/session/{sid}/run/{run_id}/result.dxf")
    def run_dxf(sid: str, run_id: str):
        artifacts = _get_run(sid, run_id)
        return Response(content=artifacts.dxf, media_type="application/dxf")

    @app.get("/api/session/{sid}/run/{run_id}/stage/{name}.png")
    def run_stage(sid: str, run_id: str, name: str):
        artifacts = _get_run(sid, run_id)
        if name not in MASK_STAGES:
            raise HTTPException(404, f"no raster stage named {name!r}")
        return _png(artifacts.masks[name])

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _json_or_empty(body: bytes) -> dict:
    import json

    if not body:
        return {}
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON body: {exc}")
    if not isinstance(doc, dict):
        raise ValidationError("config body must be a JSON object")
    return doc


def serve(host: str = "127.0.0.1", port: int = 8765,
          defaults: PipelineConfig | None = None,
          ui_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(defaults, ui_dir=ui_dir), host=host, port=port)
