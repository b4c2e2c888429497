"""Incremental layout editing: scripted add/remove of scene elements.

An edit paints a masked region with a class; a remove paints it with the
script's designated background class. Because layouts store a dense index
map, every intermediate stays one-hot by construction; validation therefore
concentrates on masks, class ranges, and op names.
"""

import base64
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..data.labels import NUM_CLASSES, UNLABELED_INDEX
from ..data.layout import SemanticLayout

ADD = "add"
REMOVE = "remove"


class EditError(ValueError):
    pass


@dataclass(frozen=True)
class LayoutEdit:
    mask: np.ndarray  # bool, H x W
    class_index: int
    op: str = ADD

    def __post_init__(self):
        mask = np.asarray(self.mask)
        if mask.dtype != np.bool_:
            mask = mask.astype(bool)
        if mask.ndim != 2:
            raise EditError(f"mask must be 2-d, got shape {mask.shape}")
        object.__setattr__(self, "mask", mask)
        if self.op not in (ADD, REMOVE):
            raise EditError(f"op must be '{ADD}' or '{REMOVE}', got {self.op!r}")
        if not (0 <= self.class_index < NUM_CLASSES):
            raise EditError(f"class index {self.class_index} outside [0, {NUM_CLASSES - 1}]")


@dataclass(frozen=True)
class EditScript:
    edits: tuple
    background_class: int = UNLABELED_INDEX

    def __post_init__(self):
        object.__setattr__(self, "edits", tuple(self.edits))
        for i, e in enumerate(self.edits):
            if not isinstance(e, LayoutEdit):
                raise EditError(f"edit {i} is {type(e).__name__}, expected LayoutEdit")
        if not (0 <= self.background_class < NUM_CLASSES):
            raise EditError(f"background class {self.background_class} outside [0, {NUM_CLASSES - 1}]")


def apply_edit_script(layout: SemanticLayout, script: EditScript) -> list:
    """Layouts after each successive edit; an empty script echoes the original."""
    if not script.edits:
        return [layout]
    out = []
    current = layout
    for i, edit in enumerate(script.edits):
        if edit.mask.shape != current.index_map.shape:
            raise EditError(
                f"edit {i}: mask is {edit.mask.shape[0]}x{edit.mask.shape[1]}, "
                f"layout is {current.index_map.shape[0]}x{current.index_map.shape[1]}"
            )
        target = edit.class_index if edit.op == ADD else script.background_class
        current = current.with_region(edit.mask, target)
        out.append(current)
    return out


# -- JSON transport: {"background_class": b, "edits": [{mask_png, class, op}]} --


def mask_to_png_b64(mask: np.ndarray) -> str:
    img = Image.fromarray(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def mask_from_png_b64(data: str) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(base64.b64decode(data)))
    except Exception as exc:
        raise EditError(f"mask_png does not decode as PNG: {exc}") from None
    return np.asarray(img.convert("L")) >= 128


def edit_script_to_json(script: EditScript) -> dict:
    return {
        "background_class": script.background_class,
        "edits": [
            {"mask_png": mask_to_png_b64(e.mask), "class": e.class_index, "op": e.op}
            for e in script.edits
        ],
    }


def edit_script_from_json(obj: dict) -> EditScript:
    if not isinstance(obj, dict) or "edits" not in obj:
        raise EditError("edit script JSON must be an object with an 'edits' list")
    edits = []
    for i, entry in enumerate(obj["edits"]):
        try:
            edits.append(
                LayoutEdit(
                    mask=mask_from_png_b64(entry["mask_png"]),
                    class_index=int(entry["class"]),
                    op=entry.get("op", ADD),
                )
            )
        except KeyError as exc:
            raise EditError(f"edit {i} is missing field {exc}") from None
    return EditScript(edits=tuple(edits), background_class=int(obj.get("background_class", UNLABELED_INDEX)))


def load_edit_script(path) -> EditScript:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise EditError(f"{path} is not valid JSON: {exc}") from None
    return edit_script_from_json(obj)


def save_edit_script(script: EditScript, path) -> None:
    Path(path).write_text(json.dumps(edit_script_to_json(script), indent=2))
