"""Protocol endpoints: POST /v1/detect, POST /v1/segment.

Requests and responses follow the same JSON schema as the synthetic stub, so
clients can switch between the two by changing a URL. Responses carry raw
model output; clipping to the prompting box is the client's contract.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from PIL import Image

from .config import ModelConfig
from .models import ModelPair, ModelsUnavailable, load_models


def _decode_image(b64: str) -> np.ndarray:
    raw = base64.b64decode(b64, validate=True)
    with Image.open(io.BytesIO(raw)) as im:
        return np.asarray(im.convert("RGB"))


def _mask_to_rle(mask: np.ndarray) -> dict:
    flat = np.asarray(mask, dtype=bool).reshape(-1)
    counts: list[int] = []
    if flat.size:
        change = np.nonzero(flat[1:] != flat[:-1])[0] + 1
        edges = np.concatenate(([0], change, [flat.size]))
        runs = np.diff(edges)
        if flat[0]:
            counts.append(0)
        counts.extend(int(r) for r in runs)
    h, w = mask.shape
    return {"size": [h, w], "counts": counts}


def create_app(config: ModelConfig | None = None,
               models: ModelPair | None = None,
               load_on_startup: bool = True) -> FastAPI:
    app = FastAPI(title="zenesis-model-server", docs_url=None, redoc_url=None)
    app.state.models = models
    app.state.config = config or ModelConfig()
    app.state.load_error = None

    def bad_request(detail: str) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": detail})

    def not_loaded() -> JSONResponse:
        detail = app.state.load_error or "models not loaded"
        return JSONResponse(status_code=503, content={"error": detail})

    @app.on_event("startup")
    def startup():
        if app.state.models is None and load_on_startup:
            try:
                app.state.models = load_models(app.state.config)
            except ModelsUnavailable as exc:
                app.state.load_error = str(exc)

    @app.post("/v1/detect")
    async def detect(request: Request):
        if app.state.models is None:
            return not_loaded()
        try:
            body = await request.json()
        except Exception:
            return bad_request("body is not valid JSON")
        try:
            image = _decode_image(body["image_png_b64"])
            prompt = str(body["prompt"])
            if not prompt.strip():
                return bad_request("prompt must be non-empty")
            box_threshold = float(body.get("box_threshold", 0.35))
            text_threshold = float(body.get("text_threshold", 0.25))
        except (KeyError, TypeError, ValueError) as exc:
            return bad_request(f"malformed detect request: {exc}")
        detections = app.state.models.detect(image, prompt, box_threshold,
                                             text_threshold)
        return {"detections": detections}

    @app.post("/v1/segment")
    async def segment(request: Request):
        if app.state.models is None:
            return not_loaded()
        try:
            body = await request.json()
        except Exception:
            return bad_request("body is not valid JSON")
        try:
            image = _decode_image(body["image_png_b64"])
            b = body["box"]
            box = (int(b["x0"]), int(b["y0"]), int(b["x1"]), int(b["y1"]))
        except (KeyError, TypeError, ValueError) as exc:
            return bad_request(f"malformed segment request: {exc}")
        h, w = image.shape[:2]
        x0, y0 = max(box[0], 0), max(box[1], 0)
        x1, y1 = min(box[2], w), min(box[3], h)
        if x1 <= x0 or y1 <= y0:
            return bad_request(f"degenerate box {box} for {w}x{h} image")
        mask = app.state.models.segment(image, (x0, y0, x1, y1))
        if mask.shape != (h, w):
            return JSONResponse(status_code=500,
                                content={"error": "model returned wrong mask shape"})
        return {"mask_rle": _mask_to_rle(mask)}

    @app.get("/healthz")
    async def healthz():
        return {"ok": app.state.models is not None,
                "error": app.state.load_error}

    return app
