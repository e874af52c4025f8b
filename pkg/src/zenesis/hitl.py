"""Human-in-the-loop correction: random candidate boxes with nearest-segment
selection, and hierarchical re-segmentation of subregions.

Candidate boxes are drawn from one seeded generator consumed in a fixed
order, per box:
  1. orientation = rng.randrange(3): 0 full-width band, 1 full-height band,
     2 free box.
  2. band orientations draw the band extent with rng.randint(min_side, dim)
     then its offset with rng.randint(0, dim - extent), where min_side =
     ceil(0.05 * dim).
  3. free boxes draw width then height the same way (each at least 5% of its
     dimension), then x offset, then y offset.
Identical (dims, count, seed) always reproduce the same boxes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from .backend.base import Thresholds
from .errors import DegenerateBox, EmptySegments, NoParentBox, NotAChild
from .geometry import BBox
from .mask import Mask
from .records import SegmentationRecord

if TYPE_CHECKING:
    from .session import Session

DEFAULT_CANDIDATE_COUNT = 8


@dataclass(frozen=True)
class CandidateSet:
    boxes: tuple[BBox, ...]
    seed: int
    count: int


def propose_random_boxes(image_dims: tuple[int, int], count: int = DEFAULT_CANDIDATE_COUNT,
                         seed: int = 0) -> CandidateSet:
    width, height = image_dims
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    min_w = math.ceil(0.05 * width)
    min_h = math.ceil(0.05 * height)
    boxes = []
    for _ in range(count):
        orientation = rng.randrange(3)
        if orientation == 0:  # full width, random horizontal band
            band = rng.randint(min_h, height)
            y0 = rng.randint(0, height - band)
            boxes.append(BBox(0, y0, width, y0 + band))
        elif orientation == 1:  # full height, random vertical band
            band = rng.randint(min_w, width)
            x0 = rng.randint(0, width - band)
            boxes.append(BBox(x0, 0, x0 + band, height))
        else:  # free box, both sides at least 5% of their dimension
            w = rng.randint(min_w, width)
            h = rng.randint(min_h, height)
            x0 = rng.randint(0, width - w)
            y0 = rng.randint(0, height - h)
            boxes.append(BBox(x0, y0, x0 + w, y0 + h))
    return CandidateSet(boxes=tuple(boxes), seed=seed, count=count)


def select_nearest_segment(candidate: BBox, segments: list[tuple[int, Mask]]) -> int:
    """Segment whose bounding box has the highest IoU with the candidate;
    ties go to the smaller segment area, then the smaller id. Invariant under
    permutation of the list."""
    if not segments:
        raise EmptySegments("no segments to select from")
    best_key = None
    best_id = None
    for seg_id, mask in segments:
        bb = mask.bounding_box()
        score = candidate.iou(bb) if bb is not None else 0.0
        key = (-score, mask.area(), seg_id)
        if best_key is None or key < best_key:
            best_key = key
            best_id = seg_id
    return best_id


def rectify(session: "Session", record_id: int, chosen_box: BBox) -> SegmentationRecord:
    """Re-segment the record's frame with a user-chosen box; stores a new
    record superseding the old one (history is append-only)."""
    old = session.get_record(record_id)
    image = session.image_for_record(old)
    if not chosen_box.in_bounds(image.width, image.height):
        # validated before any mutation
        raise DegenerateBox(
            f"box {chosen_box.as_tuple()} outside {image.width}x{image.height} frame"
        )
    mask = session.backend.segment(image, chosen_box)
    record = SegmentationRecord(
        slice_index=old.slice_index,
        prompt=old.prompt,
        box=chosen_box,
        mask=mask,
        provenance="rectified",
        parent_id=old.parent_id,
        crop_origin=old.crop_origin,
        extra={"supersedes": record_id},
    )
    return session.add_record(record)


def further_segment(session: "Session", record_id: int, sub_prompt: str,
                    thresholds: Thresholds) -> SegmentationRecord:
    """Re-run detect-and-segment on the crop under the parent's box; the
    child's coordinates live in the crop frame."""
    parent = session.get_record(record_id)
    if parent.box is None or parent.box.area() <= 0:
        raise NoParentBox(f"record {record_id} has no box to drill into")
    image = session.image_for_record(parent)
    box = parent.box.clip(image.width, image.height)
    crop = image.crop(box.x0, box.y0, box.x1, box.y1)
    child = session.backend.detect_and_segment(crop, sub_prompt, thresholds)
    child.slice_index = parent.slice_index
    child.provenance = "further"
    child.parent_id = parent.record_id
    child.crop_origin = (box.x0, box.y0)
    return session.add_record(child)


def _chain_offset(record: SegmentationRecord,
                  get_record: Callable[[int], SegmentationRecord]) -> tuple[int, int]:
    if record.crop_origin is None:
        raise NotAChild(f"record {record.record_id} has no crop origin")
    dx, dy = 0, 0
    current = record
    while current.crop_origin is not None:
        dx += current.crop_origin[0]
        dy += current.crop_origin[1]
        if current.parent_id is None:
            break
        current = get_record(current.parent_id)
    return dx, dy


def to_slice_frame(record: SegmentationRecord,
                   get_record: Callable[[int], SegmentationRecord],
                   shape: BBox | tuple[int, int]):
    """Translate a point or box from the record's crop frame to the full
    slice frame, summing crop origins along the parent chain."""
    dx, dy = _chain_offset(record, get_record)
    if isinstance(shape, BBox):
        return shape.translate(dx, dy)
    x, y = shape
    return (x + dx, y + dy)


def to_child_frame(record: SegmentationRecord,
                   get_record: Callable[[int], SegmentationRecord],
                   shape: BBox | tuple[int, int]):
    """Inverse of to_slice_frame; round-trips exactly."""
    dx, dy = _chain_offset(record, get_record)
    if isinstance(shape, BBox):
        return shape.translate(-dx, -dy)
    x, y = shape
    return (x - dx, y - dy)
