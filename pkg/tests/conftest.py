import numpy as np
import pytest

from zenesis.adapt import Image8
from zenesis.backend import BackendDescriptor
from zenesis.session import SessionStore


def make_image8(gray: np.ndarray) -> Image8:
    """Build an Image8 by replicating a 2D uint8 array across channels."""
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    return Image8(w, h, np.ascontiguousarray(np.repeat(gray[:, :, None], 3, axis=2)))


def square_image(size: int = 64, at: tuple[int, int] = (20, 20), side: int = 10,
                 fg: int = 255, bg: int = 0) -> Image8:
    gray = np.full((size, size), bg, dtype=np.uint8)
    x, y = at
    gray[y:y + side, x:x + side] = fg
    return make_image8(gray)


def disk_mask(width: int, height: int, cx: float, cy: float, radius: float) -> np.ndarray:
    yy, xx = np.mgrid[0:height, 0:width]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2


def drifting_disk_volume(depth: int = 32, size: int = 128, radius: int = 12,
                         start: tuple[int, int] = (40, 40), seed: int = 7,
                         bg_mean: float = 9000.0, bg_sigma: float = 1200.0,
                         fg_value: int = 50000, zero_slice: int | None = None):
    """16-bit noisy volume with one bright disk moving +1 px/slice in x, and
    its analytic ground-truth masks."""
    rng = np.random.default_rng(seed)
    pixels = np.empty((depth, size, size, 1), dtype=np.uint16)
    gt = []
    for i in range(depth):
        noise = rng.normal(bg_mean, bg_sigma, size=(size, size))
        slice_px = np.clip(noise, 0, 20000).astype(np.uint16)
        mask = disk_mask(size, size, start[0] + i, start[1], radius)
        slice_px[mask] = fg_value
        if zero_slice is not None and i == zero_slice:
            slice_px[:] = 0
        pixels[i, :, :, 0] = slice_px
        gt.append(mask)
    return pixels, gt


@pytest.fixture
def store(tmp_path):
    return SessionStore(str(tmp_path / "data"))


@pytest.fixture
def synthetic_descriptor():
    return BackendDescriptor(kind="synthetic", synthetic_threshold=128)
