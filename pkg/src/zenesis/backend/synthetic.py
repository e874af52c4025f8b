"""Deterministic intensity-based backend for tests and offline use.

Detection binarizes the grayscale projection at a threshold, takes
4-connected foreground components of at least 9 pixels, and reports each
component's bounding box scored by mean intensity / 255. Segmentation sets
exactly the thresholded pixels inside the prompting box. With no explicit
threshold, each image uses one above its Otsu threshold, i.e. foreground is
Otsu's upper class.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..adapt import Image8
from ..baselines import Histogram256, otsu_threshold
from ..errors import DegenerateBox
from ..geometry import BBox
from ..mask import Mask
from .base import Detection, SegmentationBackend, Thresholds, check_prompt, sort_detections

MIN_COMPONENT_PIXELS = 9  # suppresses single-pixel noise components

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


def resolve_threshold(image: Image8, threshold: int | None) -> int:
    if threshold is not None:
        return threshold
    return otsu_threshold(Histogram256.from_image(image)) + 1


def synthetic_detections(image: Image8, prompt: str, thresholds: Thresholds,
                         threshold: int | None) -> list[Detection]:
    check_prompt(prompt)
    gray = image.grayscale()
    fore = gray >= resolve_threshold(image, threshold)
    labels, count = ndimage.label(fore, structure=_FOUR_CONNECTED)
    detections: list[Detection] = []
    if count:
        slices = ndimage.find_objects(labels)
        for idx, span in enumerate(slices, start=1):
            region = labels[span] == idx
            size = int(region.sum())
            if size < MIN_COMPONENT_PIXELS:
                continue
            score = float(gray[span][region].mean() / 255.0)
            if score < thresholds.box_threshold:
                continue
            ysl, xsl = span
            box = BBox(xsl.start, ysl.start, xsl.stop, ysl.stop)
            detections.append(Detection(box=box, score=score, phrase=prompt))
    return sort_detections(detections)


def synthetic_mask(image: Image8, box: BBox, threshold: int | None) -> Mask:
    clipped = box.clip(image.width, image.height)
    gray = image.grayscale()
    bits = np.zeros(gray.shape, dtype=bool)
    window = gray[clipped.y0:clipped.y1, clipped.x0:clipped.x1]
    bits[clipped.y0:clipped.y1, clipped.x0:clipped.x1] = (
        window >= resolve_threshold(image, threshold)
    )
    return Mask(image.width, image.height, bits)


class SyntheticBackend(SegmentationBackend):
    """Pure function of (image, prompt, thresholds, threshold): identical
    inputs give byte-identical outputs."""

    def __init__(self, threshold: int | None = None):
        self.threshold = threshold

    def detect(self, image: Image8, prompt: str, thresholds: Thresholds) -> list[Detection]:
        return synthetic_detections(image, prompt, thresholds, self.threshold)

    def segment(self, image: Image8, box: BBox) -> Mask:
        if box.area() <= 0:
            raise DegenerateBox(f"zero-area box {box.as_tuple()}")
        return synthetic_mask(image, box, self.threshold)
