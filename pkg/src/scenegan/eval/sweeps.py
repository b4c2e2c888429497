"""Generation drivers that vary one input axis at a time.

attribute_sweep holds layout and noise fixed while one attribute coordinate
walks a strength schedule; noise_grid varies the seed horizontally and the
attribute vector vertically. Both record enough provenance to be regenerated.
"""

import base64
from dataclasses import dataclass

import numpy as np

from ..data.labels import NUM_ATTRIBUTES, attribute_names
from ..data.layout import SemanticLayout, layout_from_png_bytes, layout_to_png_bytes
from ..model.config import VariantKind, variant_of
from ..model.generator import Generator
from ..model.inference import ensure_finite_weights, generate_image
from .grids import GridError, GridReport


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRequest:
    layout: SemanticLayout | None
    base_attributes: np.ndarray
    attribute_index: int
    strengths: tuple
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "strengths", tuple(float(s) for s in self.strengths))
        object.__setattr__(
            self, "base_attributes", np.asarray(self.base_attributes, dtype=np.float32)
        )
        if not self.strengths:
            raise SweepError("strengths must be non-empty")
        for s in self.strengths:
            if not 0.0 <= s <= 1.0:
                raise SweepError(f"strength {s} outside [0, 1]")
        if list(self.strengths) != sorted(self.strengths):
            raise SweepError("strengths must be sorted ascending")
        if self.base_attributes.ndim != 1:
            raise SweepError(f"base_attributes must be a vector, got shape {self.base_attributes.shape}")
        if not (0 <= self.attribute_index < self.base_attributes.shape[0]):
            raise SweepError(
                f"attribute_index {self.attribute_index} outside the "
                f"{self.base_attributes.shape[0]} attribute slots"
            )

    def attributes_at(self, strength: float) -> np.ndarray:
        attrs = self.base_attributes.copy()
        attrs[self.attribute_index] = strength
        return attrs


def _attribute_label(index: int, n_slots: int) -> str:
    if n_slots == NUM_ATTRIBUTES:
        return attribute_names()[index]
    return f"a[{index}]"


def attribute_sweep(gen: Generator, req: SweepRequest, checkpoint_hash=None) -> GridReport:
    """One row of images, one per strength; layout and noise stay fixed."""
    ensure_finite_weights(gen, "generator")
    variant = variant_of(gen.cfg)
    if variant is VariantKind.L_ONLY:
        raise SweepError("layout-only generator takes no attribute input to sweep")
    if req.base_attributes.shape[0] != gen.cfg.attribute_channels:
        raise SweepError(
            f"request carries {req.base_attributes.shape[0]} attributes, "
            f"model expects {gen.cfg.attribute_channels}"
        )
    name = _attribute_label(req.attribute_index, gen.cfg.attribute_channels)
    row = [generate_image(gen, req.layout, req.attributes_at(s), req.seed) for s in req.strengths]
    return GridReport(
        cells=[row],
        row_labels=[name],
        col_labels=[f"{s:.2f}" for s in req.strengths],
        provenance={
            "driver": "attribute_sweep",
            "seed": req.seed,
            "attribute_index": req.attribute_index,
            "strengths": list(req.strengths),
            "base_attributes": [float(v) for v in req.base_attributes],
            "layout_png": _layout_b64(req.layout),
            "checkpoint_hash": checkpoint_hash,
        },
    )


def noise_grid(gen: Generator, layout, attribute_rows, seeds, checkpoint_hash=None) -> GridReport:
    """len(attribute_rows) x len(seeds) grid: z varies along columns, attributes down rows."""
    ensure_finite_weights(gen, "generator")
    variant = variant_of(gen.cfg)
    if not seeds:
        raise SweepError("seeds must be non-empty")
    if variant is VariantKind.L_ONLY:
        attribute_rows = [None]
    elif not attribute_rows:
        raise SweepError("attribute_rows must be non-empty")
    seeds = [int(s) for s in seeds]
    cells = []
    for attrs in attribute_rows:
        cells.append([generate_image(gen, layout, attrs, seed) for seed in seeds])
    return GridReport(
        cells=cells,
        row_labels=[f"attrs {i}" for i in range(len(attribute_rows))],
        col_labels=[f"z={s}" for s in seeds],
        provenance={
            "driver": "noise_grid",
            "seeds": seeds,
            "attribute_rows": [
                None if a is None else [float(v) for v in np.asarray(a, dtype=np.float32)]
                for a in attribute_rows
            ],
            "layout_png": _layout_b64(layout),
            "checkpoint_hash": checkpoint_hash,
        },
    )


def regenerate_grid(sidecar: dict, gen: Generator) -> GridReport:
    """Re-run a grid from its sidecar recipe; deterministic mode gives identical bytes."""
    prov = sidecar.get("provenance", sidecar)
    driver = prov.get("driver")
    layout = None
    if prov.get("layout_png"):
        layout = layout_from_png_bytes(base64.b64decode(prov["layout_png"]))
    if driver == "attribute_sweep":
        req = SweepRequest(
            layout=layout,
            base_attributes=np.asarray(prov["base_attributes"], dtype=np.float32),
            attribute_index=prov["attribute_index"],
            strengths=tuple(prov["strengths"]),
            seed=prov["seed"],
        )
        return attribute_sweep(gen, req, checkpoint_hash=prov.get("checkpoint_hash"))
    if driver == "noise_grid":
        rows = [
            None if a is None else np.asarray(a, dtype=np.float32)
            for a in prov["attribute_rows"]
        ]
        return noise_grid(gen, layout, rows, prov["seeds"], checkpoint_hash=prov.get("checkpoint_hash"))
    raise GridError(f"sidecar names no regenerable driver (got {driver!r})")


def _layout_b64(layout):
    if layout is None:
        return None
    return base64.b64encode(layout_to_png_bytes(layout)).decode("ascii")
