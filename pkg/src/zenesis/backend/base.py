"""Contract shared by every detector/segmenter backend.

A backend turns (image, text prompt) into scored boxes and (image, box) into
a pixel mask. Implementations must be stateless per call so callers can fan
out across slices.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from ..adapt import Image8
from ..errors import EmptyPrompt
from ..geometry import BBox
from ..mask import Mask
from ..records import SegmentationRecord

DEFAULT_BOX_THRESHOLD = 0.35
DEFAULT_TEXT_THRESHOLD = 0.25


@dataclass(frozen=True)
class Thresholds:
    box_threshold: float = DEFAULT_BOX_THRESHOLD
    text_threshold: float = DEFAULT_TEXT_THRESHOLD

    def __post_init__(self):
        for name in ("box_threshold", "text_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")

    def to_dict(self) -> dict:
        return {"box_threshold": self.box_threshold, "text_threshold": self.text_threshold}

    @classmethod
    def from_dict(cls, d: dict) -> "Thresholds":
        return cls(
            box_threshold=float(d.get("box_threshold", DEFAULT_BOX_THRESHOLD)),
            text_threshold=float(d.get("text_threshold", DEFAULT_TEXT_THRESHOLD)),
        )


@dataclass(frozen=True)
class Detection:
    box: BBox
    score: float
    phrase: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")


def sort_detections(detections: list[Detection]) -> list[Detection]:
    """Score-descending, ties broken by (y0, x0) ascending."""
    return sorted(detections, key=lambda d: (-d.score, d.box.y0, d.box.x0))


@dataclass(frozen=True)
class BackendDescriptor:
    kind: str = "synthetic"  # "synthetic" | "remote"
    remote_url: str | None = None
    synthetic_threshold: int | None = None  # None: one above per-image Otsu

    def __post_init__(self):
        if self.kind not in ("synthetic", "remote"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.remote_url:
            raise ValueError("remote backend requires remote_url")
        if self.synthetic_threshold is not None and not 0 <= self.synthetic_threshold <= 255:
            raise ValueError("synthetic_threshold must be in [0,255]")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "remote_url": self.remote_url,
            "synthetic_threshold": self.synthetic_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BackendDescriptor":
        st = d.get("synthetic_threshold")
        return cls(
            kind=d.get("kind", "synthetic"),
            remote_url=d.get("remote_url"),
            synthetic_threshold=int(st) if st is not None else None,
        )


class SegmentationBackend(ABC):
    @abstractmethod
    def detect(self, image: Image8, prompt: str, thresholds: Thresholds) -> list[Detection]:
        """Prompt-grounded boxes, score-descending; every score is at least
        thresholds.box_threshold."""

    @abstractmethod
    def segment(self, image: Image8, box: BBox) -> Mask:
        """Full-image-sized mask whose set bits lie inside the box."""

    def detect_and_segment(self, image: Image8, prompt: str,
                           thresholds: Thresholds) -> SegmentationRecord:
        """Detect, keep the top-scoring box, segment it. Empty detections
        yield an auto-empty record."""
        detections = self.detect(image, prompt, thresholds)
        slice_index = image.provenance.slice_index if image.provenance else 0
        if not detections:
            return SegmentationRecord(
                slice_index=slice_index,
                prompt=prompt,
                box=None,
                mask=Mask.empty(image.width, image.height),
                provenance="auto-empty",
                extra={"thresholds": thresholds.to_dict()},
            )
        top = detections[0]
        mask = self.segment(image, top.box)
        return SegmentationRecord(
            slice_index=slice_index,
            prompt=prompt,
            box=top.box,
            mask=mask,
            provenance="auto",
            extra={
                "score": top.score,
                "phrase": top.phrase,
                "thresholds": thresholds.to_dict(),
            },
        )


def check_prompt(prompt: str) -> str:
    if not prompt or not prompt.strip():
        raise EmptyPrompt("detection requires a non-empty prompt")
    return prompt


def make_backend(descriptor: BackendDescriptor) -> SegmentationBackend:
    if descriptor.kind == "synthetic":
        from .synthetic import SyntheticBackend

        return SyntheticBackend(threshold=descriptor.synthetic_threshold)
    from .remote import RemoteBackend

    return RemoteBackend(descriptor.remote_url)
