"""Binary per-pixel masks and the run-length encoding used on the wire.

RLE format: {"size": [height, width], "counts": [...]} where counts are
alternating run lengths of 0s and 1s over the row-major flattened mask,
always starting with a 0-run (possibly of length 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .geometry import BBox


@dataclass
class Mask:
    width: int
    height: int
    bits: np.ndarray = field(repr=False)  # bool, shape (height, width)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.shape != (self.height, self.width):
            raise DimensionMismatch(
                f"mask bits {self.bits.shape} != ({self.height}, {self.width})"
            )

    @classmethod
    def empty(cls, width: int, height: int) -> "Mask":
        return cls(width, height, np.zeros((height, width), dtype=bool))

    @classmethod
    def from_array(cls, bits: np.ndarray) -> "Mask":
        bits = np.asarray(bits, dtype=bool)
        h, w = bits.shape
        return cls(w, h, bits)

    def area(self) -> int:
        return int(self.bits.sum())

    def bounding_box(self) -> BBox | None:
        """Tight box around the set pixels, or None for an empty mask."""
        ys, xs = np.nonzero(self.bits)
        if ys.size == 0:
            return None
        return BBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)

    def clipped_to(self, box: BBox) -> "Mask":
        """Zero out every bit outside the box."""
        out = np.zeros_like(self.bits)
        b = box.clip(self.width, self.height)
        out[b.y0:b.y1, b.x0:b.x1] = self.bits[b.y0:b.y1, b.x0:b.x1]
        return Mask(self.width, self.height, out)

    def crop(self, box: BBox) -> "Mask":
        b = box.clip(self.width, self.height)
        return Mask.from_array(self.bits[b.y0:b.y1, b.x0:b.x1].copy())

    def to_bytes(self) -> bytes:
        """Canonical byte form (packed bits, row-major); used for identity
        checks and event-log hashing."""
        return np.packbits(self.bits, axis=None).tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and bool(np.array_equal(self.bits, other.bits))
        )


def encode_rle(mask: Mask) -> dict:
    flat = mask.bits.reshape(-1)
    counts: list[int] = []
    if flat.size == 0:
        return {"size": [mask.height, mask.width], "counts": counts}
    # run boundaries where the value changes
    change = np.nonzero(flat[1:] != flat[:-1])[0] + 1
    edges = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(edges)
    if flat[0]:
        counts.append(0)  # encoding always starts with a 0-run
    counts.extend(int(r) for r in runs)
    return {"size": [mask.height, mask.width], "counts": counts}


def decode_rle(rle: dict) -> Mask:
    h, w = (int(v) for v in rle["size"])
    counts = [int(c) for c in rle["counts"]]
    total = sum(counts)
    if total != h * w:
        raise DimensionMismatch(f"RLE runs cover {total} pixels, size says {h * w}")
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if value:
            flat[pos:pos + run] = True
        pos += run
        value = not value
    return Mask(w, h, flat.reshape(h, w))
