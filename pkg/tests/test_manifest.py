import json

import numpy as np
import pytest
from PIL import Image

from scenegan.data.labels import NUM_ATTRIBUTES, UNLABELED_INDEX
from scenegan.data.layout import SemanticLayout, save_layout_png
from scenegan.data.manifest import (
    ManifestError,
    load_manifest,
    materialize_samples,
    propagate_webcam_layout,
    write_manifest,
)

RES = 16


def _write_image(path, value=100, size=RES):
    Image.fromarray(np.full((size, size, 3), value, dtype=np.uint8)).save(path)


def _write_layout(path, class_index=0, unlabeled_rows=0, size=RES):
    idx = np.full((size, size), class_index, dtype=np.uint8)
    if unlabeled_rows:
        idx[:unlabeled_rows] = UNLABELED_INDEX
    save_layout_png(SemanticLayout(idx), path)


def _record(image, layout=None, group="cam-a", attrs=None):
    rec = {
        "image": image,
        "attributes": attrs if attrs is not None else [0.5] * NUM_ATTRIBUTES,
        "group_id": group,
    }
    if layout is not None:
        rec["layout"] = layout
    return rec


def _write(tmp_path, records):
    path = tmp_path / "manifest.jsonl"
    write_manifest(records, path)
    return path


def test_three_valid_records_load(tmp_path):
    for i in range(3):
        _write_image(tmp_path / f"{i}.png")
        _write_layout(tmp_path / f"{i}_layout.png")
    records = [_record(f"{i}.png", f"{i}_layout.png", group=f"g{i}") for i in range(3)]
    manifest = load_manifest(_write(tmp_path, records), RES)
    assert len(manifest.samples) == 3
    assert manifest.resolution == RES


def test_dataset_directory_stands_in_for_its_manifest(tmp_path):
    _write_image(tmp_path / "a.png")
    _write_layout(tmp_path / "a_layout.png")
    _write(tmp_path, [_record("a.png", "a_layout.png")])
    manifest = load_manifest(tmp_path, RES)
    assert len(manifest.samples) == 1


def test_low_coverage_record_is_excluded(tmp_path):
    _write_image(tmp_path / "a.png")
    _write_layout(tmp_path / "a_layout.png", unlabeled_rows=0)
    _write_image(tmp_path / "b.png")
    # 10 of 16 rows unlabeled: 37.5% coverage, below the 70% default
    _write_layout(tmp_path / "b_layout.png", unlabeled_rows=10)
    records = [_record("a.png", "a_layout.png"), _record("b.png", "b_layout.png", group="cam-b")]
    manifest = load_manifest(_write(tmp_path, records), RES)
    assert len(manifest.samples) == 1
    assert manifest.samples[0].image_path.name == "a.png"


def test_retention_boundary_is_at_the_threshold(tmp_path):
    # exactly 70% labeled must be retained (filter is strict-less-than)
    size = 20
    _write_image(tmp_path / "a.png", size=size)
    _write_layout(tmp_path / "a_layout.png", unlabeled_rows=6, size=size)  # 70% labeled
    manifest = load_manifest(_write(tmp_path, [_record("a.png", "a_layout.png")]), size)
    assert len(manifest.samples) == 1


def test_missing_image_names_the_record(tmp_path):
    path = _write(tmp_path, [_record("gone.png")])
    with pytest.raises(ManifestError, match=r"manifest\.jsonl:1"):
        load_manifest(path, RES)


def test_malformed_json_names_the_line(tmp_path):
    _write_image(tmp_path / "a.png")
    _write_layout(tmp_path / "a_layout.png")
    path = tmp_path / "manifest.jsonl"
    good = json.dumps(_record("a.png", "a_layout.png"))
    path.write_text(good + "\n{broken\n")
    with pytest.raises(ManifestError, match=r"manifest\.jsonl:2"):
        load_manifest(path, RES)


def test_attribute_bounds_name_the_slot(tmp_path):
    _write_image(tmp_path / "a.png")
    attrs = [0.0] * NUM_ATTRIBUTES
    attrs[17] = 1.5
    path = _write(tmp_path, [_record("a.png", attrs=attrs)])
    with pytest.raises(ManifestError, match=r"attributes\[17\]"):
        load_manifest(path, RES)


def test_group_layout_propagates_to_unannotated_members(tmp_path):
    _write_image(tmp_path / "a.png")
    _write_layout(tmp_path / "a_layout.png", class_index=5)
    for name in ("b.png", "c.png", "d.png", "e.png"):
        _write_image(tmp_path / name)
    records = [_record("a.png", "a_layout.png")] + [_record(n) for n in ("b.png", "c.png", "d.png", "e.png")]
    manifest = propagate_webcam_layout(load_manifest(_write(tmp_path, records), RES))
    assert len(manifest.samples) == 5
    for sample in manifest.samples:
        assert sample.layout is not None
        assert np.all(sample.layout.index_map == 5)


def test_no_cross_group_sharing(tmp_path):
    _write_image(tmp_path / "a.png")
    _write_layout(tmp_path / "a_layout.png", class_index=1)
    _write_image(tmp_path / "a2.png")
    _write_image(tmp_path / "b.png")
    _write_layout(tmp_path / "b_layout.png", class_index=2)
    _write_image(tmp_path / "b2.png")
    records = [
        _record("a.png", "a_layout.png", group="cam-a"),
        _record("a2.png", group="cam-a"),
        _record("b.png", "b_layout.png", group="cam-b"),
        _record("b2.png", group="cam-b"),
    ]
    manifest = propagate_webcam_layout(load_manifest(_write(tmp_path, records), RES))
    by_group = {}
    for s in manifest.samples:
        by_group.setdefault(s.group_id, []).append(s)
    for group, expected in (("cam-a", 1), ("cam-b", 2)):
        for s in by_group[group]:
            assert np.all(s.layout.index_map == expected)


def test_group_without_any_layout_rejected(tmp_path):
    _write_image(tmp_path / "a.png")
    path = _write(tmp_path, [_record("a.png", group="cam-naked")])
    with pytest.raises(ManifestError, match="cam-naked"):
        propagate_webcam_layout(load_manifest(path, RES))


def test_materialized_samples_are_normalized(tmp_path):
    _write_image(tmp_path / "a.png", value=255)
    _write_layout(tmp_path / "a_layout.png")
    manifest = propagate_webcam_layout(load_manifest(_write(tmp_path, [_record("a.png", "a_layout.png")]), RES))
    samples = materialize_samples(manifest)
    assert len(samples) == 1
    s = samples[0]
    assert s.image.shape == (RES, RES, 3)
    assert np.all(s.image == 1.0)
    assert s.attributes.shape == (NUM_ATTRIBUTES,)
    assert s.layout.index_map.shape == (RES, RES)
