"""Classical comparison methods: Otsu thresholding and ungrounded (whole
image prompt) segmentation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .adapt import Image8
from .errors import EmptyHistogram
from .geometry import BBox
from .mask import Mask
from .records import SegmentationRecord

if TYPE_CHECKING:
    from .backend.base import SegmentationBackend


@dataclass
class Histogram256:
    counts: np.ndarray  # shape (256,), non-negative ints

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        assert self.counts.shape == (256,)

    @classmethod
    def from_image(cls, image: Image8) -> "Histogram256":
        gray = image.grayscale()
        return cls(np.bincount(gray.reshape(-1), minlength=256))

    def total(self) -> int:
        return int(self.counts.sum())


def otsu_threshold(hist: Histogram256) -> int:
    """Threshold maximizing between-class variance, exact integer arithmetic.

    Class 0 is bins <= t, class 1 is bins > t. sigma_b^2(t) is proportional
    to (S0*W1 - S1*W0)^2 / (W0*W1); comparisons cross-multiply so ties are
    exact and resolve to the smallest t. Zero-weight classes score 0.
    """
    counts = [int(c) for c in hist.counts]
    total = sum(counts)
    if total == 0:
        raise EmptyHistogram("histogram has zero total count")
    sum_total = sum(i * c for i, c in enumerate(counts))
    w0 = 0
    s0 = 0
    best_t = 0
    best_num = -1
    best_den = 1
    for t in range(256):
        w0 += counts[t]
        s0 += t * counts[t]
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            num, den = 0, 1
        else:
            s1 = sum_total - s0
            a = s0 * w1 - s1 * w0
            num, den = a * a, w0 * w1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def otsu_segment(image: Image8) -> Mask:
    """Foreground = pixels whose grayscale projection exceeds the Otsu
    threshold (strictly). A single-valued image has no separating threshold
    and segments nothing."""
    hist = Histogram256.from_image(image)
    if int(np.count_nonzero(hist.counts)) <= 1:
        return Mask.empty(image.width, image.height)
    t = otsu_threshold(hist)
    return Mask.from_array(image.grayscale() > t)


def ungrounded_segment(image: Image8, backend: "SegmentationBackend") -> SegmentationRecord:
    """Segment with the full-image box, i.e. no text grounding at all."""
    box = BBox(0, 0, image.width, image.height)
    mask = backend.segment(image, box)
    return SegmentationRecord(
        slice_index=0,
        prompt="",
        box=box,
        mask=mask,
        provenance="auto",
    )
