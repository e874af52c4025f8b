"""Axis-aligned boxes in pixel coordinates.

Boxes are half-open: a box covers the pixel grid [x0, x1) x [y0, y1), so a
single pixel at (x, y) is the box (x, y, x+1, y+1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateBox


@dataclass(frozen=True, order=True)
class BBox:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x0 < 0 or self.y0 < 0 or self.x1 <= self.x0 or self.y1 <= self.y0:
            raise DegenerateBox(f"invalid box ({self.x0},{self.y0},{self.x1},{self.y1})")

    def width(self) -> int:
        return self.x1 - self.x0

    def height(self) -> int:
        return self.y1 - self.y0

    def area(self) -> int:
        return self.width() * self.height()

    def center(self) -> tuple[float, float]:
        return (self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0

    def in_bounds(self, width: int, height: int) -> bool:
        return self.x1 <= width and self.y1 <= height

    def clip(self, width: int, height: int) -> "BBox":
        """Clip to an image of the given size; raises DegenerateBox if nothing
        remains."""
        x0, y0 = max(self.x0, 0), max(self.y0, 0)
        x1, y1 = min(self.x1, width), min(self.y1, height)
        if x1 <= x0 or y1 <= y0:
            raise DegenerateBox(f"box {self.as_tuple()} outside {width}x{height} image")
        return BBox(x0, y0, x1, y1)

    def intersection_area(self, other: "BBox") -> int:
        iw = min(self.x1, other.x1) - max(self.x0, other.x0)
        ih = min(self.y1, other.y1) - max(self.y0, other.y0)
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih

    def iou(self, other: "BBox") -> float:
        inter = self.intersection_area(other)
        union = self.area() + other.area() - inter
        return inter / union if union else 0.0

    def translate(self, dx: int, dy: int) -> "BBox":
        return BBox(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    def to_dict(self) -> dict:
        return {"x0": self.x0, "y0": self.y0, "x1": self.x1, "y1": self.y1}

    @classmethod
    def from_dict(cls, d: dict) -> "BBox":
        return cls(int(d["x0"]), int(d["y0"]), int(d["x1"]), int(d["y1"]))
