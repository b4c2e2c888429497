"""Semantic layouts: per-pixel class indices and their one-hot channel view.

A layout is stored as an H x W uint8 index map; the 19-channel binary volume
is derived on demand, so the one-hot invariant (exactly one hot channel per
pixel) holds by construction.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .labels import NUM_CLASSES, UNLABELED_INDEX, label_palette


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticLayout:
    """H x W class-index map over the 19-class taxonomy (channel 18 = unlabeled)."""

    index_map: np.ndarray

    def __post_init__(self):
        if self.index_map.ndim != 2:
            raise LayoutError(f"index map must be 2-D, got shape {self.index_map.shape}")
        object.__setattr__(self, "index_map", np.ascontiguousarray(self.index_map, dtype=np.uint8))

    @property
    def height(self) -> int:
        return self.index_map.shape[0]

    @property
    def width(self) -> int:
        return self.index_map.shape[1]

    def onehot(self, dtype=np.float32) -> np.ndarray:
        """H x W x 19 binary volume with exactly one hot channel per pixel."""
        h, w = self.index_map.shape
        out = np.zeros((h, w, NUM_CLASSES), dtype=dtype)
        rows, cols = np.indices((h, w))
        out[rows, cols, self.index_map] = 1
        return out

    def channels_first(self, dtype=np.float32) -> np.ndarray:
        """19 x H x W one-hot view (the network input ordering)."""
        return np.ascontiguousarray(self.onehot(dtype).transpose(2, 0, 1))

    def labeled_fraction(self) -> float:
        """Fraction of pixels carrying one of the 18 semantic classes."""
        return float(np.mean(self.index_map != UNLABELED_INDEX))

    def classes_present(self) -> np.ndarray:
        return np.unique(self.index_map)

    def with_region(self, mask: np.ndarray, class_index: int) -> "SemanticLayout":
        """New layout with the masked region reassigned to class_index."""
        if mask.shape != self.index_map.shape:
            raise LayoutError(f"mask shape {mask.shape} does not match layout {self.index_map.shape}")
        if not 0 <= class_index < NUM_CLASSES:
            raise LayoutError(f"class index {class_index} outside [0, {NUM_CLASSES - 1}]")
        new_map = self.index_map.copy()
        new_map[mask.astype(bool)] = class_index
        return SemanticLayout(new_map)

    def __eq__(self, other) -> bool:
        return isinstance(other, SemanticLayout) and np.array_equal(self.index_map, other.index_map)


def encode_layout(index_map: np.ndarray) -> SemanticLayout:
    """Validate an index map and wrap it as a SemanticLayout.

    Any index outside [0, 18] is rejected with the first offending pixel
    coordinate in the message.
    """
    arr = np.asarray(index_map)
    if arr.ndim != 2:
        raise LayoutError(f"index map must be 2-D, got shape {arr.shape}")
    bad = (arr < 0) | (arr > UNLABELED_INDEX)
    if bad.any():
        y, x = np.argwhere(bad)[0]
        raise LayoutError(
            f"class index {int(arr[y, x])} at pixel (row={int(y)}, col={int(x)}) outside [0, {UNLABELED_INDEX}]"
        )
    return SemanticLayout(arr.astype(np.uint8))


def decode_layout(layout) -> np.ndarray:
    """Inverse of encode_layout: recover the H x W index map.

    Accepts a SemanticLayout or a one-hot H x W x 19 volume.
    """
    if isinstance(layout, SemanticLayout):
        return layout.index_map.copy()
    vol = np.asarray(layout)
    if vol.ndim != 3 or vol.shape[2] != NUM_CLASSES:
        raise LayoutError(f"expected H x W x {NUM_CLASSES} volume, got shape {vol.shape}")
    sums = vol.sum(axis=2)
    if not np.all(sums == 1):
        y, x = np.argwhere(sums != 1)[0]
        raise LayoutError(f"volume is not one-hot at pixel (row={int(y)}, col={int(x)})")
    return vol.argmax(axis=2).astype(np.uint8)


def save_layout_png(layout: SemanticLayout, path) -> None:
    """Write the layout as an indexed 8-bit PNG (palette index = class index)."""
    img = Image.fromarray(layout.index_map, mode="P")
    flat = []
    for rgb in label_palette():
        flat.extend(rgb)
    img.putpalette(flat)
    img.save(path, format="PNG")


def load_layout_png(path) -> SemanticLayout:
    """Read an indexed ('P') or 8-bit grayscale ('L') PNG as a layout index map."""
    path = Path(path)
    if not path.exists():
        raise LayoutError(f"layout file not found: {path}")
    img = Image.open(path)
    if img.mode not in ("P", "L"):
        raise LayoutError(f"layout PNG must be indexed or 8-bit grayscale, got mode {img.mode!r}: {path}")
    return encode_layout(np.array(img))


def layout_from_png_bytes(data: bytes) -> SemanticLayout:
    """Decode in-memory PNG bytes (service transport) into a layout."""
    import io

    img = Image.open(io.BytesIO(data))
    if img.mode not in ("P", "L"):
        raise LayoutError(f"layout PNG must be indexed or 8-bit grayscale, got mode {img.mode!r}")
    return encode_layout(np.array(img))


def layout_to_png_bytes(layout: SemanticLayout) -> bytes:
    import io

    buf = io.BytesIO()
    save_layout_png(layout, buf)
    return buf.getvalue()
