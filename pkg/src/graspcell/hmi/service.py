"""HTTP + event-stream backend bridging the operator panel to the cell.

Endpoints:
    GET  /api/state                current cell snapshot
    GET  /api/catalog              object classes and thumbnail links
    POST /api/request              {label: count, ...} -> 202 | 400 | 409
    POST /api/estop                always 200, idempotent
    POST /api/reset                maintenance reset
    GET  /api/metrics              metrics summary
    GET  /api/events               newline-delimited JSON event stream
    GET  /api/overlay/latest.png   annotated depth overlay
    GET  /api/thumbnail/{label}.png
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from fastapi import FastAPI, Response  # noqa: E402
from fastapi.responses import JSONResponse, StreamingResponse  # noqa: E402
from fastapi.staticfiles import StaticFiles  # noqa: E402

from ..scene.catalog import build_template  # noqa: E402
from .live import LiveCell  # noqa: E402

HEARTBEAT_INTERVAL_S = 1.0


def create_app(cell: LiveCell, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="grasp cell operator backend")
    app.state.cell = cell

    @app.get("/api/state")
    def get_state() -> JSONResponse:
        return JSONResponse(cell.snapshot())

    @app.get("/api/catalog")
    def get_catalog() -> JSONResponse:
        labels = cell.catalog()
        return JSONResponse({"labels": labels,
                             "thumbnails": {l: f"/api/thumbnail/{l}.png" for l in labels}})

    @app.post("/api/request")
    def post_request(body: dict) -> JSONResponse:
        if not isinstance(body, dict) or not body:
            return JSONResponse({"error": "request must map labels to counts"},
                                status_code=400)
        labels = set(cell.catalog())
        counts: dict[str, int] = {}
        for label, n in body.items():
            if label not in labels:
                return JSONResponse({"error": f"unknown label {label!r}"}, status_code=400)
            if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
                return JSONResponse({"error": f"count for {label!r} must be a positive "
                                              "integer"}, status_code=400)
            counts[label] = n
        if not cell.submit_request(counts):
            return JSONResponse({"error": "cell busy"}, status_code=409)
        return JSONResponse({"accepted": counts}, status_code=202)

    @app.post("/api/estop")
    def post_estop() -> JSONResponse:
        cell.submit_estop()
        return JSONResponse({"halted": True})

    @app.post("/api/reset")
    def post_reset() -> JSONResponse:
        cell.submit_reset()
        return JSONResponse({"reset": True})

    @app.get("/api/metrics")
    def get_metrics() -> JSONResponse:
        return JSONResponse(cell.snapshot()["metrics"])

    @app.get("/api/events")
    def get_events() -> StreamingResponse:
        def stream():
            sub = cell.subscribe()
            try:
                # late subscribers reconstruct state from a snapshot first
                yield json.dumps({"type": "snapshot", **cell.snapshot()},
                                 sort_keys=True) + "\n"
                while True:
                    record = sub.pop(timeout=HEARTBEAT_INTERVAL_S)
                    if record is None:
                        yield json.dumps({"type": "heartbeat", **cell.snapshot()},
                                         sort_keys=True) + "\n"
                        continue
                    yield json.dumps(record, sort_keys=True) + "\n"
            finally:
                cell.unsubscribe(sub)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/api/overlay/latest.png")
    def get_overlay() -> Response:
        png = cell.overlay_png()
        if png is None:
            png = _placeholder_png("no frame yet")
        return Response(content=png, media_type="image/png")

    @app.get("/api/thumbnail/{label}.png")
    def get_thumbnail(label: str) -> Response:
        if label not in cell.catalog():
            return Response(content=_placeholder_png("?"), media_type="image/png",
                            status_code=404)
        return Response(content=_thumbnail_png(label), media_type="image/png")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="panel")

    return app


def _placeholder_png(text: str) -> bytes:
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.text(0.5, 0.5, text, ha="center", va="center")
    ax.set_axis_off()
    buf = io.BytesIO()
    fig.savefig(buf, format="png")
    plt.close(fig)
    return buf.getvalue()


_THUMBNAIL_CACHE: dict[str, bytes] = {}


def _thumbnail_png(label: str) -> bytes:
    if label in _THUMBNAIL_CACHE:
        return _THUMBNAIL_CACHE[label]
    template = build_template(label)
    fig, ax = plt.subplots(figsize=(1.2, 1.2), dpi=64)
    grid = np.where(template.footprint > 0, template.footprint, np.nan)
    ax.imshow(grid, cmap="viridis")
    ax.set_axis_off()
    fig.subplots_adjust(left=0, right=1, top=1, bottom=0)
    buf = io.BytesIO()
    fig.savefig(buf, format="png", transparent=True)
    plt.close(fig)
    _THUMBNAIL_CACHE[label] = buf.getvalue()
    return buf.getvalue()
