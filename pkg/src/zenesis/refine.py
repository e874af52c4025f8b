"""Sliding-window outlier correction for per-slice detections in a volume.

A box whose width or height strictly exceeds size_factor times the windowed
mean is replaced by the average box of the trailing window: size
(round(mean_w), round(mean_h)) centered at (round(mean_cx), round(mean_cy)).
Missing detections are replaced the same way once enough history exists.
Accepted boxes, including replacements, enter the history so the running
average stays stable across bursts of detector failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .backend.base import Detection
from .errors import EmptyHistory
from .geometry import BBox


@dataclass(frozen=True)
class RefineConfig:
    window: int = 5
    size_factor: float = 1.5
    min_history: int = 3

    def __post_init__(self):
        if not self.window >= self.min_history >= 1:
            raise ValueError(
                f"need window >= min_history >= 1, got ({self.window}, {self.min_history})"
            )
        if not self.size_factor > 1.0:
            raise ValueError(f"size_factor must exceed 1, got {self.size_factor}")

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "size_factor": self.size_factor,
            "min_history": self.min_history,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RefineConfig":
        return cls(
            window=int(d.get("window", 5)),
            size_factor=float(d.get("size_factor", 1.5)),
            min_history=int(d.get("min_history", 3)),
        )


@dataclass(frozen=True)
class BoxStats:
    mean_w: float
    mean_h: float
    mean_cx: float
    mean_cy: float


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def window_stats(history: Sequence[BBox], cfg: RefineConfig) -> BoxStats:
    """Means of width/height/center over the most recent min(window, n)
    accepted boxes."""
    if not history:
        raise EmptyHistory("no accepted boxes to average")
    recent = history[-cfg.window:]
    n = len(recent)
    return BoxStats(
        mean_w=sum(b.width() for b in recent) / n,
        mean_h=sum(b.height() for b in recent) / n,
        mean_cx=sum((b.x0 + b.x1) / 2.0 for b in recent) / n,
        mean_cy=sum((b.y0 + b.y1) / 2.0 for b in recent) / n,
    )


def average_box(stats: BoxStats, image_dims: tuple[int, int]) -> BBox:
    """The window's mean box, shifted inside the image if rounding pushed an
    edge out."""
    img_w, img_h = image_dims
    w = min(max(1, _round_half_up(stats.mean_w)), img_w)
    h = min(max(1, _round_half_up(stats.mean_h)), img_h)
    x0 = _round_half_up(stats.mean_cx) - w // 2
    y0 = _round_half_up(stats.mean_cy) - h // 2
    x0 = min(max(x0, 0), img_w - w)
    y0 = min(max(y0, 0), img_h - h)
    return BBox(x0, y0, x0 + w, y0 + h)


def refine_box(current: Optional[Detection], stats: BoxStats, cfg: RefineConfig,
               image_dims: tuple[int, int]) -> tuple[BBox, bool]:
    """Accept the current box unless absent or strictly oversize; otherwise
    return the average box. Equality with the factor bound is accepted."""
    if current is not None:
        box = current.box
        if (box.width() <= cfg.size_factor * stats.mean_w
                and box.height() <= cfg.size_factor * stats.mean_h):
            return box, False
    return average_box(stats, image_dims), True


def refine_sequence(detections: Sequence[Optional[Detection]], cfg: RefineConfig,
                    image_dims: tuple[int, int]) -> list[Optional[tuple[BBox, bool]]]:
    """One ordered pass over the slices.

    Before min_history boxes have been accepted, present detections are
    accepted unconditionally and absent ones produce no output box. After
    that, refine_box applies and every slice yields a box.
    """
    history: list[BBox] = []
    out: list[Optional[tuple[BBox, bool]]] = []
    for det in detections:
        if len(history) < cfg.min_history:
            if det is None:
                out.append(None)
            else:
                out.append((det.box, False))
                history.append(det.box)
            continue
        stats = window_stats(history, cfg)
        box, replaced = refine_box(det, stats, cfg, image_dims)
        out.append((box, replaced))
        history.append(box)
    return out
