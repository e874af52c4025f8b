"""Intensity adaptation: native-depth samples to backend-ready 8-bit RGB.

The mapping is a percentile clip followed by linear scaling, fixed to
round-half-up so outputs are bit-reproducible: v maps to
round(255 * clamp((v - low) / (high - low), 0, 1)). Constant inputs
(low == high) map to 0. Grayscale is replicated to three channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput
from .volume import RawSlice, Volume

PER_SLICE = "per-slice"
PER_VOLUME = "per-volume"


@dataclass(frozen=True)
class AdaptConfig:
    clip_lo_percentile: float = 0.005
    clip_hi_percentile: float = 0.995
    scope: str = PER_VOLUME

    def __post_init__(self):
        if not 0.0 <= self.clip_lo_percentile < self.clip_hi_percentile <= 1.0:
            raise ValueError(
                f"need 0 <= lo < hi <= 1, got ({self.clip_lo_percentile}, "
                f"{self.clip_hi_percentile})"
            )
        if self.scope not in (PER_SLICE, PER_VOLUME):
            raise ValueError(f"unknown scope {self.scope!r}")

    def to_dict(self) -> dict:
        return {
            "clip_lo_percentile": self.clip_lo_percentile,
            "clip_hi_percentile": self.clip_hi_percentile,
            "scope": self.scope,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdaptConfig":
        return cls(
            clip_lo_percentile=float(d.get("clip_lo_percentile", 0.005)),
            clip_hi_percentile=float(d.get("clip_hi_percentile", 0.995)),
            scope=str(d.get("scope", PER_VOLUME)),
        )


@dataclass(frozen=True)
class Provenance:
    source_path: str
    slice_index: int
    config: AdaptConfig | None
    bounds: tuple[float, float]


@dataclass
class Image8:
    """8-bit, 3-channel image as consumed by segmentation backends."""

    width: int
    height: int
    pixels: np.ndarray = field(repr=False)  # uint8, (height, width, 3)
    provenance: Provenance | None = None

    def __post_init__(self):
        assert self.pixels.shape == (self.height, self.width, 3)
        assert self.pixels.dtype == np.uint8

    def grayscale(self) -> np.ndarray:
        """Arithmetic mean of the three channels, round-half-up, uint8."""
        mean = self.pixels.astype(np.uint32).sum(axis=2) / 3.0
        return np.floor(mean + 0.5).astype(np.uint8)

    def crop(self, x0: int, y0: int, x1: int, y1: int) -> "Image8":
        sub = np.ascontiguousarray(self.pixels[y0:y1, x0:x1])
        return Image8(x1 - x0, y1 - y0, sub, provenance=self.provenance)


def compute_clip_bounds(samples, cfg: AdaptConfig) -> tuple[float, float]:
    """Clip bounds from sorted sample ranks: low at floor(lo * (n-1)), high
    at ceil(hi * (n-1))."""
    arr = np.asarray(samples).reshape(-1)
    n = arr.size
    if n == 0:
        raise EmptyInput("no samples to compute clip bounds from")
    ordered = np.sort(arr, kind="stable")
    lo_rank = math.floor(cfg.clip_lo_percentile * (n - 1))
    hi_rank = math.ceil(cfg.clip_hi_percentile * (n - 1))
    low, high = ordered[lo_rank], ordered[hi_rank]
    if arr.dtype.kind == "f":
        return float(low), float(high)
    return int(low), int(high)


def volume_clip_bounds(volume: Volume, cfg: AdaptConfig) -> tuple[float, float]:
    return compute_clip_bounds(volume.pixels, cfg)


def adapt_slice(raw: RawSlice, bounds: tuple[float, float]) -> Image8:
    """Map one raw slice into Image8 under the fixed linear-clip formula."""
    low, high = bounds
    samples = raw.pixels.astype(np.float64)
    if high == low:
        out = np.zeros(samples.shape, dtype=np.uint8)
    else:
        scaled = np.clip((samples - low) / (high - low), 0.0, 1.0)
        out = np.floor(255.0 * scaled + 0.5).astype(np.uint8)
    if raw.channels == 1:
        out = np.repeat(out, 3, axis=2)
    prov = Provenance(
        source_path=raw.source_path,
        slice_index=raw.index,
        config=None,  # filled in by adapt_with_config
        bounds=(float(low), float(high)),
    )
    return Image8(raw.width, raw.height, np.ascontiguousarray(out), provenance=prov)


def adapt_with_config(raw: RawSlice, cfg: AdaptConfig,
                      volume_bounds: tuple[float, float] | None = None) -> Image8:
    """Adapt a slice under cfg, using per-volume bounds when supplied and the
    scope asks for them."""
    if cfg.scope == PER_VOLUME and volume_bounds is not None:
        bounds = volume_bounds
    else:
        bounds = compute_clip_bounds(raw.pixels, cfg)
    img = adapt_slice(raw, bounds)
    img.provenance = Provenance(
        source_path=raw.source_path,
        slice_index=raw.index,
        config=cfg,
        bounds=(float(bounds[0]), float(bounds[1])),
    )
    return img
