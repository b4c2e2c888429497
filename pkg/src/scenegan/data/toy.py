"""Procedural toy scenes with an exactly known layout+attributes -> image mapping.

The renderer is the oracle the trained generator is scored against: per pixel,
color = clamp(base_color[class] + sum_k a_k * effect[k][class]). Region layouts
are random axis-aligned partitions with a guaranteed sky band on top, so the
sky-darkening attribute sweep is measurable on every generated scene.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .labels import NUM_ATTRIBUTES, NUM_CLASSES
from .layout import SemanticLayout, encode_layout
from .manifest import SceneSample


class ToySpecError(ValueError):
    pass


@dataclass(frozen=True)
class ToySceneSpec:
    """Procedural scene family: base colors per class, additive RGB attribute effects."""

    class_count: int
    attribute_count: int
    base_colors: np.ndarray  # (class_count, 3) in [-1, 1]
    attribute_effects: np.ndarray  # (attribute_count, class_count, 3) additive RGB shift
    noise_sigma: float = 0.02
    resolution: int = 32

    def __post_init__(self):
        base = np.asarray(self.base_colors, dtype=np.float32)
        eff = np.asarray(self.attribute_effects, dtype=np.float32)
        if not 1 <= self.class_count <= NUM_CLASSES:
            raise ToySpecError(f"class_count {self.class_count} outside [1, {NUM_CLASSES}]")
        if not 0 <= self.attribute_count <= NUM_ATTRIBUTES:
            raise ToySpecError(f"attribute_count {self.attribute_count} outside [0, {NUM_ATTRIBUTES}]")
        if base.shape != (self.class_count, 3):
            raise ToySpecError(f"base_colors shape {base.shape} != ({self.class_count}, 3)")
        if np.any(np.abs(base) > 1):
            raise ToySpecError("base_colors must lie in [-1, 1]")
        if eff.shape != (self.attribute_count, self.class_count, 3):
            raise ToySpecError(
                f"attribute_effects shape {eff.shape} != ({self.attribute_count}, {self.class_count}, 3)"
            )
        if self.noise_sigma < 0:
            raise ToySpecError("noise_sigma must be >= 0")
        object.__setattr__(self, "base_colors", base)
        object.__setattr__(self, "attribute_effects", eff)

    def to_json(self) -> dict:
        return {
            "class_count": self.class_count,
            "attribute_count": self.attribute_count,
            "base_colors": self.base_colors.tolist(),
            "attribute_effects": self.attribute_effects.tolist(),
            "noise_sigma": self.noise_sigma,
            "resolution": self.resolution,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ToySceneSpec":
        return cls(
            class_count=int(obj["class_count"]),
            attribute_count=int(obj["attribute_count"]),
            base_colors=np.asarray(obj["base_colors"], dtype=np.float32),
            attribute_effects=np.asarray(obj["attribute_effects"], dtype=np.float32),
            noise_sigma=float(obj.get("noise_sigma", 0.02)),
            resolution=int(obj.get("resolution", 32)),
        )

    @classmethod
    def load(cls, path) -> "ToySceneSpec":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


def default_toy_spec() -> ToySceneSpec:
    """4-class / 4-attribute scene family sized so CPU training takes minutes.

    Classes are sky / ground / water / building analogues; attribute 0 is the
    night analogue with a large negative effect on every class (strongest on
    sky), attribute 1 warms like a sunset, 2 grays the sky like clouds, 3
    washes everything toward fog gray.
    """
    base = np.array(
        [
            [0.30, 0.60, 0.90],   # sky
            [0.10, 0.45, -0.10],  # ground
            [-0.20, 0.15, 0.55],  # water
            [0.35, 0.05, -0.15],  # building
        ],
        dtype=np.float32,
    )
    effects = np.array(
        [
            # night: darken all, no clamping anywhere on [0, 1] strengths
            [[-1.10, -1.30, -1.20], [-0.90, -1.00, -0.70], [-0.70, -0.90, -1.00], [-0.95, -0.85, -0.65]],
            # sunset: warm shift, blue down
            [[0.45, -0.10, -0.50], [0.25, -0.05, -0.15], [0.30, 0.00, -0.25], [0.30, 0.05, -0.20]],
            # clouds: gray the sky, mild elsewhere
            [[-0.25, -0.30, -0.38], [-0.10, -0.12, -0.08], [-0.12, -0.10, -0.15], [-0.10, -0.10, -0.10]],
            # fog: pull toward light gray
            [[0.12, 0.00, -0.12], [0.28, 0.10, 0.40], [0.45, 0.25, 0.05], [0.20, 0.35, 0.45]],
        ],
        dtype=np.float32,
    )
    return ToySceneSpec(class_count=4, attribute_count=4, base_colors=base, attribute_effects=effects)


def render_toy(layout: SemanticLayout, attributes: np.ndarray, spec: ToySceneSpec) -> np.ndarray:
    """Noiseless oracle image for a layout and attribute vector.

    Per pixel: clamp(base_color[class] + sum_k a_k * effect[k][class], -1, 1).
    """
    present = layout.classes_present()
    if present.max(initial=0) >= spec.class_count:
        raise ToySpecError(
            f"layout uses class {int(present.max())} outside the spec's {spec.class_count} classes"
        )
    attrs = np.asarray(attributes, dtype=np.float32)
    active = attrs[: spec.attribute_count]
    # (class_count, 3) color table under these attribute strengths
    table = spec.base_colors + np.tensordot(active, spec.attribute_effects, axes=1)
    table = np.clip(table, -1.0, 1.0)
    return table[layout.index_map].astype(np.float32)


def sample_toy_layout(spec: ToySceneSpec, rng: np.random.Generator) -> SemanticLayout:
    """Random axis-aligned partition: a sky band on top, 2-4 rectangles below."""
    res = spec.resolution
    idx = np.zeros((res, res), dtype=np.uint8)  # class 0 = sky analogue
    horizon = int(res * rng.uniform(0.25, 0.5))
    ground_classes = list(range(1, spec.class_count)) or [0]

    def fill(r0, r1, c0, c1, depth):
        if depth == 0 or (r1 - r0) < 6 or (c1 - c0) < 6:
            idx[r0:r1, c0:c1] = rng.choice(ground_classes)
            return
        if rng.random() < 0.5:
            cut = r0 + int((r1 - r0) * rng.uniform(0.35, 0.65))
            fill(r0, cut, c0, c1, depth - 1)
            fill(cut, r1, c0, c1, depth - 1)
        else:
            cut = c0 + int((c1 - c0) * rng.uniform(0.35, 0.65))
            fill(r0, r1, c0, cut, depth - 1)
            fill(r0, r1, cut, c1, depth - 1)

    fill(horizon, res, 0, res, depth=int(rng.integers(1, 3)))
    return SemanticLayout(idx)


def sample_toy_attributes(spec: ToySceneSpec, rng: np.random.Generator) -> np.ndarray:
    """Uniform [0, 1] strengths on the spec's active slots, zero elsewhere."""
    attrs = np.zeros(NUM_ATTRIBUTES, dtype=np.float32)
    attrs[: spec.attribute_count] = rng.uniform(0.0, 1.0, size=spec.attribute_count).astype(np.float32)
    return attrs


def generate_toy_dataset(spec: ToySceneSpec, n: int, seed: int) -> list:
    """n procedurally rendered SceneSamples; bit-deterministic in (spec, n, seed)."""
    if n <= 0:
        raise ToySpecError(f"sample count must be positive, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    samples = []
    for i in range(n):
        layout = sample_toy_layout(spec, rng)
        attrs = sample_toy_attributes(spec, rng)
        image = render_toy(layout, attrs, spec)
        if spec.noise_sigma > 0:
            image = image + rng.normal(0.0, spec.noise_sigma, size=image.shape).astype(np.float32)
        image = np.clip(image, -1.0, 1.0).astype(np.float32)
        samples.append(
            SceneSample(
                image=image,
                layout=layout,
                attributes=attrs,
                group_id=f"toy-{i}",
                source_path=f"toy://{seed}/{i}",
            )
        )
    return samples


def segment_color_error(generated: np.ndarray, layout: SemanticLayout, reference: np.ndarray) -> float:
    """Mean over present classes of |segment-mean color difference|, averaged over RGB.

    Units match the [-1, 1] image range.
    """
    errs = []
    for c in layout.classes_present():
        mask = layout.index_map == c
        gen_mean = generated[mask].mean(axis=0)
        ref_mean = reference[mask].mean(axis=0)
        errs.append(np.abs(gen_mean - ref_mean).mean())
    return float(np.mean(errs))
