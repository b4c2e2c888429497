"""Dataset manifests: JSON-lines sample index, coverage filtering, webcam layout sharing."""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .labels import NUM_ATTRIBUTES
from .layout import SemanticLayout, load_layout_png
from .preprocess import preprocess_image, preprocess_layout

log = logging.getLogger(__name__)


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class SampleRecord:
    """One manifest line: file references plus per-sample annotations."""

    image_path: Path
    layout_path: Path | None
    attributes: np.ndarray
    group_id: str
    layout: SemanticLayout | None = None  # filled by load/propagation, pixels not persisted


@dataclass(frozen=True)
class DatasetManifest:
    samples: tuple
    resolution: int
    coverage_threshold: float


@dataclass(frozen=True)
class SceneSample:
    """Materialized training sample: image in [-1, 1] plus its conditioning."""

    image: np.ndarray
    layout: SemanticLayout
    attributes: np.ndarray
    group_id: str
    source_path: str

    def __post_init__(self):
        if self.image.shape[:2] != self.layout.index_map.shape:
            raise ManifestError(
                f"image {self.image.shape[:2]} and layout {self.layout.index_map.shape} sizes differ"
            )


def _parse_attributes(values, record_name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float32)
    if arr.shape != (NUM_ATTRIBUTES,):
        raise ManifestError(f"{record_name}: attributes must be {NUM_ATTRIBUTES} floats, got shape {arr.shape}")
    if np.any(arr < 0) or np.any(arr > 1):
        k = int(np.flatnonzero((arr < 0) | (arr > 1))[0])
        raise ManifestError(f"{record_name}: attributes[{k}] = {arr[k]} outside [0, 1]")
    return arr


def load_manifest(path, resolution: int, coverage_threshold: float = 0.7) -> DatasetManifest:
    """Parse a JSON-lines manifest, validate referenced files, apply the coverage filter.

    Records whose own layout has a labeled-pixel fraction below the threshold
    are dropped (the number is logged). Records without a layout reference are
    kept; they receive their group's layout via propagate_webcam_layout.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.jsonl"
    if not path.exists():
        raise ManifestError(f"manifest not found: {path}")
    base = path.parent
    records = []
    dropped = 0
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        name = f"{path.name}:{lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{name}: malformed JSON record: {e}") from e
        for key in ("image", "attributes", "group_id"):
            if key not in obj:
                raise ManifestError(f"{name}: missing field {key!r}")
        image_path = base / obj["image"]
        if not image_path.exists():
            raise ManifestError(f"{name}: referenced image missing: {image_path}")
        layout_path = None
        layout = None
        if obj.get("layout"):
            layout_path = base / obj["layout"]
            if not layout_path.exists():
                raise ManifestError(f"{name}: referenced layout missing: {layout_path}")
            layout = preprocess_layout(load_layout_png(layout_path), resolution)
            if layout.labeled_fraction() < coverage_threshold:
                dropped += 1
                continue
        records.append(
            SampleRecord(
                image_path=image_path,
                layout_path=layout_path,
                attributes=_parse_attributes(obj["attributes"], name),
                group_id=str(obj["group_id"]),
                layout=layout,
            )
        )
    if dropped:
        log.info("coverage filter dropped %d of %d records (threshold %.2f)", dropped, dropped + len(records), coverage_threshold)
    return DatasetManifest(samples=tuple(records), resolution=resolution, coverage_threshold=coverage_threshold)


def propagate_webcam_layout(manifest: DatasetManifest) -> DatasetManifest:
    """Share each group's single annotated layout with every sample in the group.

    Groups are webcams: one image per webcam is annotated and all frames reuse
    that layout. A group with no annotated sample is an error. If several are
    annotated, the first in manifest order wins.
    """
    group_layout = {}
    for rec in manifest.samples:
        if rec.layout is not None and rec.group_id not in group_layout:
            group_layout[rec.group_id] = rec.layout
    missing = sorted({r.group_id for r in manifest.samples} - set(group_layout))
    if missing:
        raise ManifestError(f"group(s) without any annotated layout: {', '.join(missing)}")
    propagated = tuple(
        rec if rec.layout is not None else replace(rec, layout=group_layout[rec.group_id])
        for rec in manifest.samples
    )
    return replace(manifest, samples=propagated)


def materialize_samples(manifest: DatasetManifest) -> list:
    """Load and preprocess every referenced image into in-memory SceneSamples."""
    samples = []
    for rec in manifest.samples:
        if rec.layout is None:
            raise ManifestError(
                f"sample {rec.image_path} has no layout; run propagate_webcam_layout first"
            )
        raw = np.asarray(Image.open(rec.image_path).convert("RGB"))
        image = preprocess_image(raw, manifest.resolution)
        samples.append(
            SceneSample(
                image=image,
                layout=rec.layout,
                attributes=rec.attributes,
                group_id=rec.group_id,
                source_path=str(rec.image_path),
            )
        )
    return samples


def write_manifest(records: list, path) -> None:
    """Write manifest lines; records are {image, layout, attributes, group_id} dicts."""
    path = Path(path)
    with path.open("w") as f:
        for obj in records:
            f.write(json.dumps(obj) + "\n")
