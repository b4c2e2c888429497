"""Image preprocessing: resize to the target side, center-crop, map to [-1, 1]."""

import numpy as np
from PIL import Image

from .layout import SemanticLayout, encode_layout


class PreprocessError(ValueError):
    pass


def _resize_crop_geometry(h0: int, w0: int, target: int):
    """Scaled size plus crop offsets for the resize-then-center-crop step.

    Landscape path scales the height to `target` and crops the width; portrait
    inputs (where that would leave the width short) scale the width instead
    and crop vertically.
    """
    if h0 <= 0 or w0 <= 0:
        raise PreprocessError(f"degenerate input size {h0}x{w0}")
    new_w = int(round(w0 * target / h0))
    if new_w >= target:
        new_h = target
    else:
        new_h = int(round(h0 * target / w0))
        new_w = target
        if new_h < target:
            raise PreprocessError(f"input {h0}x{w0} cannot cover {target}x{target} after resize")
    top = (new_h - target) // 2
    left = (new_w - target) // 2
    return new_h, new_w, top, left


def preprocess_image(raw: np.ndarray, target: int) -> np.ndarray:
    """uint8 H0 x W0 x 3 -> float32 target x target x 3 in [-1, 1].

    Bilinear resize so the shorter output side equals `target`, center crop,
    then pixel p maps to 2p/255 - 1.
    """
    arr = np.asarray(raw)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise PreprocessError(f"expected H x W x 3 image, got shape {arr.shape}")
    h0, w0 = arr.shape[:2]
    new_h, new_w, top, left = _resize_crop_geometry(h0, w0, target)
    img = Image.fromarray(arr.astype(np.uint8), mode="RGB")
    img = img.resize((new_w, new_h), Image.BILINEAR)
    out = np.asarray(img, dtype=np.float32)[top : top + target, left : left + target]
    return out * (2.0 / 255.0) - 1.0


def preprocess_layout(layout: SemanticLayout, target: int) -> SemanticLayout:
    """Apply the image geometry (nearest-neighbor resize + center crop) to a layout."""
    h0, w0 = layout.index_map.shape
    new_h, new_w, top, left = _resize_crop_geometry(h0, w0, target)
    img = Image.fromarray(layout.index_map, mode="L")
    img = img.resize((new_w, new_h), Image.NEAREST)
    cropped = np.asarray(img)[top : top + target, left : left + target]
    return encode_layout(cropped)


def to_uint8(image: np.ndarray) -> np.ndarray:
    """[-1, 1] float image back to uint8, rounding to nearest level."""
    arr = np.clip(np.asarray(image), -1.0, 1.0)
    return np.round((arr + 1.0) * (255.0 / 2.0)).astype(np.uint8)
