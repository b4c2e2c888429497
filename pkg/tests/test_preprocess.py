import numpy as np
import pytest

from scenegan.data.labels import NUM_CLASSES
from scenegan.data.layout import SemanticLayout
from scenegan.data.preprocess import (
    PreprocessError,
    preprocess_image,
    preprocess_layout,
    to_uint8,
)


def test_landscape_resize_then_center_crop():
    raw = np.zeros((256, 512, 3), dtype=np.uint8)
    out = preprocess_image(raw, 128)
    assert out.shape == (128, 128, 3)
    assert out.dtype == np.float32


def test_all_zero_bytes_map_to_minus_one():
    out = preprocess_image(np.zeros((128, 128, 3), dtype=np.uint8), 128)
    assert np.all(out == -1.0)


def test_all_255_bytes_map_to_plus_one():
    out = preprocess_image(np.full((200, 300, 3), 255, dtype=np.uint8), 128)
    assert np.all(out == 1.0)


def test_portrait_input_resizes_by_width():
    raw = np.full((512, 256, 3), 128, dtype=np.uint8)
    out = preprocess_image(raw, 128)
    assert out.shape == (128, 128, 3)


def test_already_sized_input_is_idempotent_up_to_quantization():
    rng = np.random.Generator(np.random.PCG64(5))
    raw = rng.integers(0, 256, size=(64, 64, 3)).astype(np.uint8)
    once = preprocess_image(raw, 64)
    again = preprocess_image(to_uint8(once), 64)
    assert np.array_equal(once, again)


def test_center_crop_takes_the_middle_columns():
    # left half black, right half white; the crop must straddle the boundary
    raw = np.zeros((64, 128, 3), dtype=np.uint8)
    raw[:, 64:] = 255
    out = preprocess_image(raw, 64)
    assert np.all(out[:, :32] == -1.0)
    assert np.all(out[:, 32:] == 1.0)


def test_degenerate_input_rejected():
    with pytest.raises(PreprocessError):
        preprocess_image(np.zeros((0, 10, 3), dtype=np.uint8), 32)


def test_uint8_round_trip_is_exact():
    levels = np.arange(256, dtype=np.uint8).reshape(16, 16)
    raw = np.stack([levels] * 3, axis=2)
    assert np.array_equal(to_uint8(preprocess_image(raw, 16)), raw)


def test_layout_preprocess_uses_nearest_neighbor():
    idx = np.zeros((64, 64), dtype=np.uint8)
    idx[32:, :] = 7
    small = preprocess_layout(SemanticLayout(idx), 16)
    assert small.index_map.shape == (16, 16)
    # nearest-neighbor keeps exact class ids; no blended values appear
    assert set(np.unique(small.index_map)) <= {0, 7}
    assert np.all(small.index_map < NUM_CLASSES)


def test_layout_preprocess_keeps_same_geometry_as_images():
    # a layout feature at known position must land where the image crop lands
    raw_img = np.zeros((64, 128, 3), dtype=np.uint8)
    raw_img[:, 64:] = 255
    idx = np.zeros((64, 128), dtype=np.uint8)
    idx[:, 64:] = 3
    img = preprocess_image(raw_img, 32)
    lay = preprocess_layout(SemanticLayout(idx), 32)
    img_white = img[:, :, 0] > 0
    lay_three = lay.index_map == 3
    assert np.array_equal(img_white, lay_three)
