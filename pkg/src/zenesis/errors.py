"""Exception hierarchy shared across the package.

Every error a caller is expected to handle derives from ZenesisError so the
service layer can map them to HTTP codes in one place.
"""


class ZenesisError(Exception):
    """Base class for all package errors."""


class UnreadableFile(ZenesisError):
    """File is missing, truncated, or not a parseable image container."""


class UnsupportedLayout(ZenesisError):
    """Pixel layout we refuse to coerce (mixed page sizes, odd channel
    counts, exotic sample formats, NaN samples)."""


class IndexOutOfRange(ZenesisError):
    """Slice index outside [0, depth)."""


class EmptyInput(ZenesisError):
    """An operation that needs at least one element got none."""


class EmptyHistogram(EmptyInput):
    """Histogram with zero total count."""


class EmptyHistory(EmptyInput):
    """Refinement window statistics requested with no accepted boxes."""


class EmptySegments(EmptyInput):
    """Nearest-segment selection over an empty segment list."""


class EmptyPrompt(ZenesisError):
    """Detection requires a non-empty text prompt."""


class BackendUnavailable(ZenesisError):
    """Remote backend connection, timeout, or protocol failure."""


class DegenerateBox(ZenesisError):
    """Box has zero area (possibly after clipping to the image)."""


class UnknownRecord(ZenesisError):
    """Record id not present in the session."""


class UnknownSession(ZenesisError):
    """Session id with no directory or event log."""


class NoParentBox(ZenesisError):
    """Hierarchical segmentation requires a parent record with a box."""


class NotAChild(ZenesisError):
    """Coordinate translation requested for a record without a crop origin."""


class DimensionMismatch(ZenesisError):
    """Two masks or slices that must share dimensions do not."""


class CountMismatch(ZenesisError):
    """Prediction and ground-truth sources have different slice counts."""
