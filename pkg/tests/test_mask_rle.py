import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from zenesis.errors import DimensionMismatch
from zenesis.geometry import BBox
from zenesis.mask import Mask, decode_rle, encode_rle


GOLDEN = [
    # (bits row-major, h, w, counts)
    ([0, 0, 0, 0], 2, 2, [4]),
    ([1, 1, 1, 1], 2, 2, [0, 4]),
    ([0, 1, 1, 0], 1, 4, [1, 2, 1]),
    ([1, 0, 0, 1], 2, 2, [0, 1, 2, 1]),
    ([0, 1, 0, 1, 0, 1], 2, 3, [1, 1, 1, 1, 1, 1]),
]


@pytest.mark.parametrize("bits,h,w,counts", GOLDEN)
def test_golden_encodings(bits, h, w, counts):
    mask = Mask(w, h, np.array(bits, dtype=bool).reshape(h, w))
    rle = encode_rle(mask)
    assert rle == {"size": [h, w], "counts": counts}
    assert decode_rle(rle) == mask


@given(arrays(bool, st.tuples(st.integers(1, 16), st.integers(1, 16))))
@settings(max_examples=200, deadline=None)
def test_round_trip(bits):
    mask = Mask.from_array(bits)
    assert decode_rle(encode_rle(mask)) == mask


def test_decode_length_mismatch():
    with pytest.raises(DimensionMismatch):
        decode_rle({"size": [2, 2], "counts": [3]})


def test_area_and_bbox():
    bits = np.zeros((8, 8), dtype=bool)
    bits[2:5, 3:7] = True
    mask = Mask.from_array(bits)
    assert mask.area() == 12
    assert mask.bounding_box() == BBox(3, 2, 7, 5)
    assert Mask.empty(4, 4).bounding_box() is None


def test_clip_and_crop():
    bits = np.ones((6, 6), dtype=bool)
    mask = Mask.from_array(bits)
    clipped = mask.clipped_to(BBox(1, 1, 3, 3))
    assert clipped.area() == 4
    assert clipped.bits[0, 0] == False  # noqa: E712
    crop = mask.crop(BBox(1, 1, 3, 3))
    assert (crop.width, crop.height) == (2, 2)
    assert crop.area() == 4


def test_to_bytes_identity():
    rng = np.random.default_rng(0)
    bits = rng.random((9, 7)) > 0.5
    a = Mask.from_array(bits)
    b = decode_rle(encode_rle(a))
    assert a.to_bytes() == b.to_bytes()
