"""Zenesis: text-prompted segmentation for raw scientific images.

Raw 8/16/32-bit grayscale or RGB images and volumes are adapted into
model-ready 8-bit form, segmented through a pluggable detect-then-segment
backend, corrected by volumetric box refinement and human-in-the-loop tools,
and scored against ground truth with accuracy/IoU/Dice.
"""

from .adapt import AdaptConfig, Image8, adapt_slice, compute_clip_bounds
from .backend import (
    BackendDescriptor,
    Detection,
    RemoteBackend,
    SegmentationBackend,
    SyntheticBackend,
    Thresholds,
    make_backend,
)
from .baselines import Histogram256, otsu_segment, otsu_threshold, ungrounded_segment
from .geometry import BBox
from .hitl import propose_random_boxes, rectify, further_segment, select_nearest_segment, to_slice_frame
from .mask import Mask, decode_rle, encode_rle
from .metrics import (
    Confusion,
    MetricsReport,
    accuracy,
    aggregate,
    confusion,
    dice,
    evaluate_pair_set,
    iou,
)
from .records import SegmentationRecord
from .refine import BoxStats, RefineConfig, refine_box, refine_sequence, window_stats
from .session import Session, SessionStore
from .volume import (
    RawSlice,
    Volume,
    VolumeMeta,
    load_volume,
    slice_at,
    volume_info,
    write_volume,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptConfig",
    "BBox",
    "BackendDescriptor",
    "BoxStats",
    "Confusion",
    "Detection",
    "Histogram256",
    "Image8",
    "Mask",
    "MetricsReport",
    "RawSlice",
    "RefineConfig",
    "RemoteBackend",
    "SegmentationBackend",
    "SegmentationRecord",
    "Session",
    "SessionStore",
    "SyntheticBackend",
    "Thresholds",
    "Volume",
    "VolumeMeta",
    "accuracy",
    "adapt_slice",
    "aggregate",
    "compute_clip_bounds",
    "confusion",
    "decode_rle",
    "dice",
    "encode_rle",
    "evaluate_pair_set",
    "further_segment",
    "iou",
    "load_volume",
    "make_backend",
    "otsu_segment",
    "otsu_threshold",
    "propose_random_boxes",
    "rectify",
    "refine_box",
    "refine_sequence",
    "select_nearest_segment",
    "slice_at",
    "to_slice_frame",
    "ungrounded_segment",
    "volume_info",
    "window_stats",
    "write_volume",
]
