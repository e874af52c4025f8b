"""Loading raw scientific images and volumes without touching pixel values.

Supported containers: single- or multi-page TIFF (2D and volumetric) and PNG
(2D only). Samples may be 8/16-bit unsigned or 32-bit float, with 1 or 3
interleaved channels. A 2D image is represented as a depth-1 volume so every
downstream operation can treat inputs uniformly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import tifffile
from PIL import Image, UnidentifiedImageError

from .errors import IndexOutOfRange, UnreadableFile, UnsupportedLayout

_ALLOWED_DTYPES = {
    np.dtype(np.uint8): (8, "unsigned-int"),
    np.dtype(np.uint16): (16, "unsigned-int"),
    np.dtype(np.float32): (32, "float"),
}


@dataclass
class Volume:
    """A stack of slices in slice-major, row-major, channel-interleaved order.

    pixels has shape (depth, height, width, channels) and is never modified
    after load; share freely across threads.
    """

    width: int
    height: int
    depth: int
    channels: int
    bit_depth: int
    sample_kind: str  # "unsigned-int" | "float"
    pixels: np.ndarray = field(repr=False)
    source_path: str = ""

    def __post_init__(self):
        expected = (self.depth, self.height, self.width, self.channels)
        if self.pixels.shape != expected:
            raise UnsupportedLayout(f"pixel buffer {self.pixels.shape} != {expected}")


@dataclass
class RawSlice:
    width: int
    height: int
    channels: int
    bit_depth: int
    sample_kind: str
    index: int
    pixels: np.ndarray = field(repr=False)  # (height, width, channels)
    source_path: str = ""


@dataclass(frozen=True)
class VolumeMeta:
    width: int
    height: int
    depth: int
    channels: int
    bit_depth: int
    sample_kind: str
    value_min: float
    value_max: float
    source_path: str = ""

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "depth": self.depth,
            "channels": self.channels,
            "bit_depth": self.bit_depth,
            "sample_kind": self.sample_kind,
            "value_min": self.value_min,
            "value_max": self.value_max,
            "source_path": self.source_path,
        }


def _volume_from_array(arr: np.ndarray, path: str) -> Volume:
    depth, height, width, channels = arr.shape
    if channels not in (1, 3):
        raise UnsupportedLayout(f"{channels} channels; only 1 or 3 supported")
    try:
        bit_depth, sample_kind = _ALLOWED_DTYPES[arr.dtype]
    except KeyError:
        raise UnsupportedLayout(f"unsupported sample format {arr.dtype}") from None
    if sample_kind == "float" and not np.isfinite(arr).all():
        raise UnsupportedLayout("float volume contains NaN or infinite samples")
    return Volume(
        width=width,
        height=height,
        depth=depth,
        channels=channels,
        bit_depth=bit_depth,
        sample_kind=sample_kind,
        pixels=np.ascontiguousarray(arr),
        source_path=path,
    )


def _load_tiff(path: str) -> Volume:
    try:
        with tifffile.TiffFile(path) as tf:
            shapes = {p.shape for p in tf.pages}
            if len(shapes) > 1:
                raise UnsupportedLayout(f"TIFF pages differ in size: {sorted(shapes)}")
            series = tf.series[0]
            axes = series.axes
            arr = series.asarray()
    except UnsupportedLayout:
        raise
    except (tifffile.TiffFileError, ValueError, IndexError, OSError) as exc:
        raise UnreadableFile(f"cannot read TIFF {path}: {exc}") from exc
    if "C" in axes and arr.shape[axes.index("C")] > 1:
        raise UnsupportedLayout("planar-channel TIFF not supported")
    # leading axes (Z/T/I/Q/...) collapse into slice order as stored in file
    if axes.endswith("YXS"):
        channels = arr.shape[-1]
        lead = arr.shape[:-3]
        body = arr.shape[-3:-1]
    elif axes.endswith("YX"):
        channels = 1
        lead = arr.shape[:-2]
        body = arr.shape[-2:]
    else:
        raise UnsupportedLayout(f"unsupported TIFF axis order {axes}")
    depth = math.prod(lead) if lead else 1
    arr = arr.reshape(depth, body[0], body[1], channels)
    return _volume_from_array(arr, path)


def _load_png(path: str) -> Volume:
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I", "I;16", "I;16B"):
                arr = np.asarray(im)
                if arr.dtype != np.uint16:
                    if arr.min() < 0 or arr.max() > 0xFFFF:
                        raise UnsupportedLayout("integer PNG exceeds 16-bit range")
                    arr = arr.astype(np.uint16)
            elif im.mode in ("L", "RGB"):
                arr = np.asarray(im)
            else:
                raise UnsupportedLayout(f"PNG mode {im.mode!r} not supported")
    except UnidentifiedImageError as exc:
        raise UnreadableFile(f"cannot read PNG {path}: {exc}") from exc
    except UnsupportedLayout:
        raise
    except OSError as exc:
        raise UnreadableFile(f"cannot read PNG {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[np.newaxis, :, :, np.newaxis]
    else:
        arr = arr[np.newaxis, :, :, :]
    return _volume_from_array(arr, path)


def load_volume(path: str | os.PathLike) -> Volume:
    """Load a TIFF or PNG file bit-exactly. Multi-page TIFF pages become
    slices in file order; PNG always yields depth 1."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise UnreadableFile(f"no such file: {path}")
    lower = path.lower()
    if lower.endswith((".tif", ".tiff")):
        return _load_tiff(path)
    if lower.endswith(".png"):
        return _load_png(path)
    # fall back on content sniffing for extensionless uploads
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic[:4] in (b"II*\x00", b"MM\x00*"):
        return _load_tiff(path)
    if magic[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise UnreadableFile(f"{path}: not a TIFF or PNG file")


def slice_at(volume: Volume, index: int) -> RawSlice:
    """View of one slice's samples; no copy, no reordering."""
    if not 0 <= index < volume.depth:
        raise IndexOutOfRange(f"slice {index} outside [0, {volume.depth})")
    return RawSlice(
        width=volume.width,
        height=volume.height,
        channels=volume.channels,
        bit_depth=volume.bit_depth,
        sample_kind=volume.sample_kind,
        index=index,
        pixels=volume.pixels[index],
        source_path=volume.source_path,
    )


def volume_info(volume: Volume) -> VolumeMeta:
    """Dims plus global min/max over all samples (UI preview header)."""
    vmin = volume.pixels.min()
    vmax = volume.pixels.max()
    if volume.sample_kind == "float":
        vmin, vmax = float(vmin), float(vmax)
    else:
        vmin, vmax = int(vmin), int(vmax)
    return VolumeMeta(
        width=volume.width,
        height=volume.height,
        depth=volume.depth,
        channels=volume.channels,
        bit_depth=volume.bit_depth,
        sample_kind=volume.sample_kind,
        value_min=vmin,
        value_max=vmax,
        source_path=volume.source_path,
    )


def write_volume(volume: Volume, path: str | os.PathLike, compression: str | None = None) -> None:
    """Write a volume back to TIFF (uncompressed or "zlib"), bit-exact on
    reload."""
    arr = volume.pixels
    if volume.channels == 1:
        arr = arr[:, :, :, 0]
        photometric = "minisblack"
    else:
        photometric = "rgb"
    tifffile.imwrite(os.fspath(path), arr, photometric=photometric, compression=compression)


def write_mask_stack(masks: list[np.ndarray], path: str | os.PathLike) -> None:
    """Write binary masks as a multi-page 1-bit TIFF."""
    stack = np.stack([np.asarray(m, dtype=bool) for m in masks])
    tifffile.imwrite(os.fspath(path), stack, photometric="minisblack")


def load_mask_stack(path: str | os.PathLike) -> list[np.ndarray]:
    arr = tifffile.imread(os.fspath(path))
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    return [arr[i].astype(bool) for i in range(arr.shape[0])]
