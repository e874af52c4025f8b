from .base import (
    BackendDescriptor,
    Detection,
    SegmentationBackend,
    Thresholds,
    make_backend,
    sort_detections,
)
from .remote import RemoteBackend
from .synthetic import SyntheticBackend

__all__ = [
    "BackendDescriptor",
    "Detection",
    "RemoteBackend",
    "SegmentationBackend",
    "SyntheticBackend",
    "Thresholds",
    "make_backend",
    "sort_detections",
]
