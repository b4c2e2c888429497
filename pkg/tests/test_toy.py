import numpy as np
import pytest

from scenegan.data.labels import NUM_ATTRIBUTES
from scenegan.data.layout import SemanticLayout
from scenegan.data.toy import (
    ToySceneSpec,
    ToySpecError,
    default_toy_spec,
    generate_toy_dataset,
    render_toy,
    sample_toy_layout,
    segment_color_error,
)


def _flat_spec(noise=0.0):
    base = np.array([[0.2, 0.0, -0.2], [-0.4, 0.1, 0.3]], dtype=np.float32)
    effects = np.array(
        [[[0.1, 0.0, 0.0], [0.0, -0.1, 0.0]], [[0.0, 0.2, 0.0], [0.0, 0.0, 0.2]]],
        dtype=np.float32,
    )
    return ToySceneSpec(class_count=2, attribute_count=2, base_colors=base,
                        attribute_effects=effects, noise_sigma=noise, resolution=8)


def _attrs(*values):
    arr = np.zeros(NUM_ATTRIBUTES, dtype=np.float32)
    arr[: len(values)] = values
    return arr


def test_zero_attributes_reproduce_base_colors_exactly():
    spec = _flat_spec()
    idx = np.zeros((8, 8), dtype=np.uint8)
    idx[4:] = 1
    img = render_toy(SemanticLayout(idx), _attrs(), spec)
    assert np.array_equal(img[0, 0], spec.base_colors[0])
    assert np.array_equal(img[7, 7], spec.base_colors[1])


def test_single_attribute_shifts_segment_pixelwise():
    # attribute 0 at full strength on class 0: color = clamp(base + effect)
    spec = _flat_spec()
    idx = np.zeros((8, 8), dtype=np.uint8)
    img = render_toy(SemanticLayout(idx), _attrs(1.0), spec)
    expected = np.clip(spec.base_colors[0] + spec.attribute_effects[0, 0], -1, 1)
    assert np.allclose(img, expected[None, None, :], atol=1e-7)


def test_render_is_linear_where_unclamped():
    spec = _flat_spec()
    idx = np.zeros((8, 8), dtype=np.uint8)
    idx[4:] = 1
    layout = SemanticLayout(idx)
    a1 = _attrs(0.3, 0.0)
    a2 = _attrs(0.0, 0.4)
    lhs = render_toy(layout, a1, spec) + render_toy(layout, a2, spec) - render_toy(layout, _attrs(), spec)
    rhs = render_toy(layout, a1 + a2, spec)
    assert np.allclose(lhs, rhs, atol=1e-6)


def test_render_clamps_to_unit_range():
    spec = default_toy_spec()
    idx = np.zeros((spec.resolution, spec.resolution), dtype=np.uint8)
    img = render_toy(SemanticLayout(idx), _attrs(1.0, 1.0, 1.0, 1.0), spec)
    assert img.min() >= -1.0 and img.max() <= 1.0


def test_render_rejects_class_outside_spec():
    spec = _flat_spec()
    idx = np.full((8, 8), 2, dtype=np.uint8)  # class 2 does not exist
    with pytest.raises(ToySpecError):
        render_toy(SemanticLayout(idx), _attrs(), spec)


def test_dataset_is_bit_deterministic_in_seed():
    spec = default_toy_spec()
    a = generate_toy_dataset(spec, 5, seed=99)
    b = generate_toy_dataset(spec, 5, seed=99)
    for s, t in zip(a, b):
        assert np.array_equal(s.image, t.image)
        assert np.array_equal(s.layout.index_map, t.layout.index_map)
        assert np.array_equal(s.attributes, t.attributes)


def test_different_seeds_differ():
    spec = default_toy_spec()
    a = generate_toy_dataset(spec, 3, seed=1)
    b = generate_toy_dataset(spec, 3, seed=2)
    assert any(not np.array_equal(s.image, t.image) for s, t in zip(a, b))


def test_nonpositive_count_rejected():
    with pytest.raises(ToySpecError):
        generate_toy_dataset(default_toy_spec(), 0, seed=1)


def test_noiseless_zero_attribute_samples_equal_base_fill():
    from dataclasses import replace

    spec = replace(_flat_spec(), noise_sigma=0.0)
    samples = generate_toy_dataset(spec, 4, seed=5)
    for s in samples:
        ref = render_toy(s.layout, s.attributes, spec)
        assert np.array_equal(s.image, ref)


def test_sampled_layouts_keep_sky_on_top():
    spec = default_toy_spec()
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(10):
        layout = sample_toy_layout(spec, rng)
        assert np.all(layout.index_map[0] == 0)  # top row is the sky analogue
        assert layout.index_map.max() < spec.class_count


def test_night_analogue_darkens_sky_monotonically():
    # slot 0 is the night analogue: sky color must fall strictly with strength
    spec = default_toy_spec()
    idx = np.zeros((spec.resolution, spec.resolution), dtype=np.uint8)
    layout = SemanticLayout(idx)
    lums = []
    for s in (0.0, 0.25, 0.5, 0.75, 1.0):
        img = render_toy(layout, _attrs(s), spec)
        lums.append(float(img.mean()))
    assert all(b < a for a, b in zip(lums, lums[1:]))


def test_segment_color_error_zero_on_identical_images():
    spec = default_toy_spec()
    samples = generate_toy_dataset(spec, 2, seed=8)
    s = samples[0]
    assert segment_color_error(s.image, s.layout, s.image) == 0.0


def test_segment_color_error_matches_hand_computation():
    idx = np.zeros((4, 4), dtype=np.uint8)
    idx[2:] = 1
    layout = SemanticLayout(idx)
    ref = np.zeros((4, 4, 3), dtype=np.float32)
    gen = ref.copy()
    gen[:2] += 0.3  # class 0 segment off by 0.3 on all channels
    # mean over classes of per-class mean abs diff: (0.3 + 0.0) / 2
    assert segment_color_error(gen, layout, ref) == pytest.approx(0.15)


def test_spec_json_round_trip(tmp_path):
    spec = default_toy_spec()
    path = tmp_path / "spec.json"
    spec.save(path)
    loaded = ToySceneSpec.load(path)
    assert loaded.class_count == spec.class_count
    assert np.allclose(loaded.base_colors, spec.base_colors)
    assert np.allclose(loaded.attribute_effects, spec.attribute_effects)
    assert loaded.noise_sigma == spec.noise_sigma
    assert loaded.resolution == spec.resolution
