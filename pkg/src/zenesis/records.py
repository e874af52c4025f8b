"""Segmentation records: one slice's outcome plus its provenance chain."""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import BBox
from .mask import Mask, decode_rle, encode_rle

PROVENANCES = ("auto", "auto-empty", "refined", "rectified", "further")


@dataclass
class SegmentationRecord:
    slice_index: int
    prompt: str
    box: BBox | None
    mask: Mask
    provenance: str
    record_id: int | None = None  # assigned when the session persists it
    parent_id: int | None = None
    crop_origin: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "further" and (
            self.parent_id is None or self.crop_origin is None
        ):
            raise ValueError("hierarchical records need parent_id and crop_origin")

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "slice_index": self.slice_index,
            "prompt": self.prompt,
            "box": self.box.to_dict() if self.box else None,
            "mask_rle": encode_rle(self.mask),
            "provenance": self.provenance,
            "parent_id": self.parent_id,
            "crop_origin": list(self.crop_origin) if self.crop_origin else None,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentationRecord":
        origin = d.get("crop_origin")
        return cls(
            slice_index=int(d["slice_index"]),
            prompt=d.get("prompt", ""),
            box=BBox.from_dict(d["box"]) if d.get("box") else None,
            mask=decode_rle(d["mask_rle"]),
            provenance=d["provenance"],
            record_id=d.get("record_id"),
            parent_id=d.get("parent_id"),
            crop_origin=(int(origin[0]), int(origin[1])) if origin else None,
            extra=d.get("extra", {}),
        )
