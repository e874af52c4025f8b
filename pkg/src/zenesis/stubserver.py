"""Wire-protocol server with synthetic semantics.

Stands in for a real model server: same endpoints, same JSON, fully
deterministic. Useful for offline development, protocol tests, and driving
the remote client without GPUs.
"""

from __future__ import annotations

import threading
import time

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .backend.synthetic import synthetic_detections, synthetic_mask
from .backend.base import Thresholds
from .backend.wire import detections_to_payload, mask_to_payload, png_b64_to_image
from .errors import ZenesisError
from .geometry import BBox


def create_stub_app(synthetic_threshold: int | None = None) -> FastAPI:
    app = FastAPI(title="zenesis-stub", docs_url=None, redoc_url=None)

    def bad_request(detail: str) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": detail})

    @app.post("/v1/detect")
    async def detect(request: Request):
        try:
            body = await request.json()
        except Exception:
            return bad_request("body is not valid JSON")
        try:
            image = png_b64_to_image(body["image_png_b64"])
            prompt = str(body["prompt"])
            thresholds = Thresholds(
                box_threshold=float(body.get("box_threshold", 0.35)),
                text_threshold=float(body.get("text_threshold", 0.25)),
            )
            found = synthetic_detections(image, prompt, thresholds, synthetic_threshold)
        except (KeyError, TypeError, ValueError, ZenesisError) as exc:
            return bad_request(f"malformed detect request: {exc}")
        return detections_to_payload(found)

    @app.post("/v1/segment")
    async def segment(request: Request):
        try:
            body = await request.json()
        except Exception:
            return bad_request("body is not valid JSON")
        try:
            image = png_b64_to_image(body["image_png_b64"])
            box = BBox.from_dict(body["box"])
            box = box.clip(image.width, image.height)
            mask = synthetic_mask(image, box, synthetic_threshold)
        except (KeyError, TypeError, ValueError, ZenesisError) as exc:
            return bad_request(f"malformed segment request: {exc}")
        return mask_to_payload(mask)

    @app.get("/healthz")
    async def healthz():
        return {"ok": True}

    return app


class StubServer:
    """Run the stub on a local port in a background thread."""

    def __init__(self, port: int = 0, synthetic_threshold: int | None = None):
        self.app = create_stub_app(synthetic_threshold)
        config = uvicorn.Config(self.app, host="127.0.0.1", port=port,
                                log_level="error")
        self._server = uvicorn.Server(config)
        self._thread: threading.Thread | None = None

    def start(self, timeout: float = 10.0) -> str:
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self._thread.start()
        deadline = time.monotonic() + timeout
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("stub server failed to start")
            time.sleep(0.01)
        return self.url

    @property
    def url(self) -> str:
        servers = self._server.servers
        sock = servers[0].sockets[0]
        host, port = sock.getsockname()[:2]
        return f"http://{host}:{port}"

    def stop(self) -> None:
        self._server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout=10)

    def __enter__(self) -> "StubServer":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
