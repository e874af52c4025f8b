"""HTTP client for model servers speaking the wire protocol.

Network failures, timeouts, and non-200 responses all surface as
BackendUnavailable. In-flight requests are bounded by a semaphore and each
request carries a timeout. Masks returned by the server are clipped to the
prompting box before they reach the caller, enforcing the grounding contract
regardless of what the server produced.
"""

from __future__ import annotations

import threading

import httpx

from ..adapt import Image8
from ..errors import BackendUnavailable, DegenerateBox
from ..geometry import BBox
from ..mask import Mask
from .base import Detection, SegmentationBackend, Thresholds, check_prompt, sort_detections
from .wire import detect_request, payload_to_mask, segment_request

DEFAULT_TIMEOUT_S = 120.0
DEFAULT_MAX_INFLIGHT = 4


class RemoteBackend(SegmentationBackend):
    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT_S,
                 max_inflight: int = DEFAULT_MAX_INFLIGHT,
                 transport: httpx.BaseTransport | None = None):
        self.url = url.rstrip("/")
        self._client = httpx.Client(
            base_url=self.url, timeout=timeout, transport=transport
        )
        self._slots = threading.BoundedSemaphore(max_inflight)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, body: dict) -> dict:
        with self._slots:
            try:
                resp = self._client.post(path, json=body)
            except httpx.HTTPError as exc:
                raise BackendUnavailable(f"{self.url}{path}: {exc}") from exc
        if resp.status_code != 200:
            detail = ""
            try:
                detail = resp.json().get("error", "")
            except ValueError:
                detail = resp.text[:200]
            raise BackendUnavailable(f"{self.url}{path}: HTTP {resp.status_code} {detail}")
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendUnavailable(f"{self.url}{path}: invalid JSON response") from exc

    def detect(self, image: Image8, prompt: str, thresholds: Thresholds) -> list[Detection]:
        check_prompt(prompt)
        payload = self._post(
            "/v1/detect",
            detect_request(image, prompt, thresholds.box_threshold, thresholds.text_threshold),
        )
        detections = []
        try:
            for d in payload["detections"]:
                box = BBox(int(d["x0"]), int(d["y0"]), int(d["x1"]), int(d["y1"]))
                box = box.clip(image.width, image.height)
                detections.append(Detection(box=box, score=float(d["score"]),
                                            phrase=str(d.get("phrase", ""))))
        except (KeyError, TypeError, ValueError, DegenerateBox) as exc:
            raise BackendUnavailable(f"malformed detect response: {exc}") from exc
        return sort_detections(detections)

    def segment(self, image: Image8, box: BBox) -> Mask:
        if box.area() <= 0:
            raise DegenerateBox(f"zero-area box {box.as_tuple()}")
        clipped = box.clip(image.width, image.height)
        payload = self._post("/v1/segment", segment_request(image, clipped))
        try:
            mask = payload_to_mask(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendUnavailable(f"malformed segment response: {exc}") from exc
        if (mask.width, mask.height) != (image.width, image.height):
            raise BackendUnavailable(
                f"server mask {mask.width}x{mask.height} does not match image "
                f"{image.width}x{image.height}"
            )
        return mask.clipped_to(clipped)
