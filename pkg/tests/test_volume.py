import numpy as np
import pytest
import tifffile
from PIL import Image

from zenesis.errors import IndexOutOfRange, UnreadableFile, UnsupportedLayout
from zenesis.volume import (
    Volume,
    load_mask_stack,
    load_volume,
    slice_at,
    volume_info,
    write_mask_stack,
    write_volume,
)


def write_ref_tiff(path, arr, photometric="minisblack"):
    # reference writer for fixtures; loads must be bit-exact against this
    tifffile.imwrite(str(path), arr, photometric=photometric)


def test_multipage_16bit_gray(tmp_path):
    arr = np.random.default_rng(0).integers(0, 65536, size=(10, 512, 512), dtype=np.uint16)
    path = tmp_path / "v.tif"
    write_ref_tiff(path, arr)
    vol = load_volume(path)
    assert (vol.width, vol.height, vol.depth, vol.channels, vol.bit_depth) == (512, 512, 10, 1, 16)
    assert vol.sample_kind == "unsigned-int"
    np.testing.assert_array_equal(vol.pixels[:, :, :, 0], arr)


def test_single_page_rgb_png(tmp_path):
    arr = np.random.default_rng(1).integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
    path = tmp_path / "img.png"
    Image.fromarray(arr, "RGB").save(path)
    vol = load_volume(path)
    assert (vol.width, vol.height, vol.depth, vol.channels, vol.bit_depth) == (64, 64, 1, 3, 8)
    np.testing.assert_array_equal(vol.pixels[0], arr)


def test_16bit_gray_png(tmp_path):
    arr = (np.arange(64, dtype=np.uint16) * 1000).reshape(8, 8)
    path = tmp_path / "img16.png"
    Image.fromarray(arr).save(path)
    vol = load_volume(path)
    assert vol.bit_depth == 16 and vol.channels == 1
    np.testing.assert_array_equal(vol.pixels[0, :, :, 0], arr)


def test_float32_volume(tmp_path):
    arr = np.random.default_rng(2).random((4, 16, 16)).astype(np.float32)
    path = tmp_path / "f.tif"
    write_ref_tiff(path, arr)
    vol = load_volume(path)
    assert vol.bit_depth == 32 and vol.sample_kind == "float"
    np.testing.assert_array_equal(vol.pixels[:, :, :, 0], arr)


def test_mixed_page_sizes_rejected(tmp_path):
    path = tmp_path / "mixed.tif"
    with tifffile.TiffWriter(str(path)) as tw:
        tw.write(np.zeros((8, 8), dtype=np.uint8))
        tw.write(np.zeros((9, 9), dtype=np.uint8))
    with pytest.raises(UnsupportedLayout):
        load_volume(path)


def test_nan_float_rejected(tmp_path):
    arr = np.ones((4, 4), dtype=np.float32)
    arr[1, 2] = np.nan
    path = tmp_path / "nan.tif"
    write_ref_tiff(path, arr)
    with pytest.raises(UnsupportedLayout):
        load_volume(path)


def test_two_channel_rejected(tmp_path):
    arr = np.zeros((8, 8, 2), dtype=np.uint8)
    path = tmp_path / "two.tif"
    tifffile.imwrite(str(path), arr, photometric="minisblack", planarconfig="contig")
    with pytest.raises(UnsupportedLayout):
        load_volume(path)


def test_missing_and_corrupt_files(tmp_path):
    with pytest.raises(UnreadableFile):
        load_volume(tmp_path / "nope.tif")
    junk = tmp_path / "junk.tif"
    junk.write_bytes(b"not a tiff at all")
    with pytest.raises(UnreadableFile):
        load_volume(junk)


def test_extension_sniffing(tmp_path):
    arr = np.arange(64, dtype=np.uint8).reshape(8, 8)
    path = tmp_path / "no_extension"
    write_ref_tiff(path, arr)
    vol = load_volume(path)
    np.testing.assert_array_equal(vol.pixels[0, :, :, 0], arr)


def test_slice_at_views_and_errors(tmp_path):
    arr = np.random.default_rng(3).integers(0, 256, size=(10, 6, 5), dtype=np.uint8)
    path = tmp_path / "s.tif"
    write_ref_tiff(path, arr)
    vol = load_volume(path)
    first = slice_at(vol, 0)
    np.testing.assert_array_equal(first.pixels[:, :, 0], arr[0])
    last = slice_at(vol, 9)
    assert last.index == 9
    np.testing.assert_array_equal(last.pixels[:, :, 0], arr[9])
    with pytest.raises(IndexOutOfRange):
        slice_at(vol, 10)
    with pytest.raises(IndexOutOfRange):
        slice_at(vol, -1)


def test_slices_concatenate_to_buffer(tmp_path):
    arr = np.random.default_rng(4).integers(0, 65536, size=(7, 9, 5), dtype=np.uint16)
    path = tmp_path / "c.tif"
    write_ref_tiff(path, arr)
    vol = load_volume(path)
    rebuilt = np.stack([slice_at(vol, i).pixels for i in range(vol.depth)])
    np.testing.assert_array_equal(rebuilt, vol.pixels)


def test_volume_info_min_max():
    const = Volume(4, 4, 1, 1, 8, "unsigned-int",
                   np.full((1, 4, 4, 1), 7, dtype=np.uint8))
    meta = volume_info(const)
    assert (meta.value_min, meta.value_max) == (7, 7)

    ramp = Volume(256, 256, 1, 1, 16, "unsigned-int",
                  np.arange(65536, dtype=np.uint16).reshape(1, 256, 256, 1))
    meta = volume_info(ramp)
    assert (meta.value_min, meta.value_max) == (0, 65535)

    two = Volume(1, 1, 2, 1, 8, "unsigned-int",
                 np.array([3, 9], dtype=np.uint8).reshape(2, 1, 1, 1))
    meta = volume_info(two)
    # exhaustive-scan oracle
    assert meta.value_min == int(two.pixels.reshape(-1).min())
    assert meta.value_max == int(two.pixels.reshape(-1).max())
    assert (meta.value_min, meta.value_max) == (3, 9)


@pytest.mark.parametrize("dtype,channels", [
    (np.uint8, 1), (np.uint8, 3), (np.uint16, 1), (np.uint16, 3), (np.float32, 1),
])
def test_write_reload_round_trip(tmp_path, dtype, channels):
    rng = np.random.default_rng(5)
    if dtype is np.float32:
        arr = rng.random((3, 10, 11, channels)).astype(np.float32)
    else:
        arr = rng.integers(0, np.iinfo(dtype).max + 1, size=(3, 10, 11, channels), dtype=dtype)
    vol = Volume(11, 10, 3, channels, {np.uint8: 8, np.uint16: 16, np.float32: 32}[dtype],
                 "float" if dtype is np.float32 else "unsigned-int", arr)
    path = tmp_path / "rt.tif"
    write_volume(vol, path)
    back = load_volume(path)
    np.testing.assert_array_equal(back.pixels, vol.pixels)


def test_write_deflate_round_trip(tmp_path):
    arr = np.random.default_rng(6).integers(0, 65536, size=(2, 8, 8, 1), dtype=np.uint16)
    vol = Volume(8, 8, 2, 1, 16, "unsigned-int", arr)
    path = tmp_path / "z.tif"
    write_volume(vol, path, compression="zlib")
    back = load_volume(path)
    np.testing.assert_array_equal(back.pixels, vol.pixels)


def test_mask_stack_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    masks = [rng.random((12, 9)) > 0.5 for _ in range(4)]
    path = tmp_path / "m.tif"
    write_mask_stack(masks, path)
    with tifffile.TiffFile(str(path)) as tf:
        assert tf.pages[0].bitspersample == 1
    back = load_mask_stack(path)
    assert len(back) == 4
    for a, b in zip(masks, back):
        np.testing.assert_array_equal(a, b)
