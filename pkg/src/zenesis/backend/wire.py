"""Wire-protocol codec shared by the remote client and the protocol servers.

HTTP POST, JSON bodies:
  /v1/detect  {"image_png_b64", "prompt", "box_threshold", "text_threshold"}
              -> {"detections": [{"x0","y0","x1","y1","score","phrase"}, ...]}
  /v1/segment {"image_png_b64", "box": {"x0","y0","x1","y1"}}
              -> {"mask_rle": {"size": [h, w], "counts": [...]}}
Errors are 4xx with {"error": text}.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image as PILImage

from ..adapt import Image8
from ..geometry import BBox
from ..mask import Mask, decode_rle, encode_rle


def image_to_png_b64(image: Image8 | np.ndarray) -> str:
    pixels = image.pixels if isinstance(image, Image8) else np.asarray(image)
    buf = io.BytesIO()
    PILImage.fromarray(pixels, "RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def png_b64_to_image(data: str) -> Image8:
    raw = base64.b64decode(data, validate=True)
    with PILImage.open(io.BytesIO(raw)) as im:
        arr = np.asarray(im.convert("RGB"))
    h, w, _ = arr.shape
    return Image8(w, h, np.ascontiguousarray(arr))


def detect_request(image: Image8, prompt: str, box_threshold: float,
                   text_threshold: float) -> dict:
    return {
        "image_png_b64": image_to_png_b64(image),
        "prompt": prompt,
        "box_threshold": box_threshold,
        "text_threshold": text_threshold,
    }


def segment_request(image: Image8, box: BBox) -> dict:
    return {"image_png_b64": image_to_png_b64(image), "box": box.to_dict()}


def detections_to_payload(detections) -> dict:
    return {
        "detections": [
            {
                "x0": d.box.x0,
                "y0": d.box.y0,
                "x1": d.box.x1,
                "y1": d.box.y1,
                "score": d.score,
                "phrase": d.phrase,
            }
            for d in detections
        ]
    }


def mask_to_payload(mask: Mask) -> dict:
    return {"mask_rle": encode_rle(mask)}


def payload_to_mask(payload: dict) -> Mask:
    return decode_rle(payload["mask_rle"])
