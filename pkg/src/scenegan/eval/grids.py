"""Image-grid artifacts: a rows x cols montage PNG plus a JSON sidecar.

The sidecar records the full recipe (driver name, inputs, seeds, checkpoint
hash), so a grid can be regenerated and compared byte-for-byte.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..data.preprocess import to_uint8

CELL_MARGIN = 2
ROW_GUTTER = 72  # left strip for row labels, px
COL_GUTTER = 14  # top strip for column labels, px
BACKGROUND = (24, 24, 24)
LABEL_COLOR = (230, 230, 230)


class GridError(ValueError):
    pass


@dataclass
class GridReport:
    """cells[r][c] are H x W x 3 float images in [-1, 1], all the same shape."""

    cells: list
    row_labels: list
    col_labels: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.cells or not self.cells[0]:
            raise GridError("grid has no cells")
        ncols = len(self.cells[0])
        shape = np.asarray(self.cells[0][0]).shape
        for r, row in enumerate(self.cells):
            if len(row) != ncols:
                raise GridError(f"row {r} has {len(row)} cells, expected {ncols}")
            for c, cell in enumerate(row):
                if np.asarray(cell).shape != shape:
                    raise GridError(f"cell ({r},{c}) shape {np.asarray(cell).shape} != {shape}")
        if len(self.row_labels) != len(self.cells):
            raise GridError(f"{len(self.row_labels)} row labels for {len(self.cells)} rows")
        if len(self.col_labels) != ncols:
            raise GridError(f"{len(self.col_labels)} column labels for {ncols} columns")

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0])

    def cell_size(self):
        h, w = np.asarray(self.cells[0][0]).shape[:2]
        return h, w


def render_montage(report: GridReport) -> Image.Image:
    h, w = report.cell_size()
    width = ROW_GUTTER + report.cols * (w + CELL_MARGIN) + CELL_MARGIN
    height = COL_GUTTER + report.rows * (h + CELL_MARGIN) + CELL_MARGIN
    canvas = Image.new("RGB", (width, height), BACKGROUND)
    draw = ImageDraw.Draw(canvas)
    font = ImageFont.load_default()
    for c, label in enumerate(report.col_labels):
        x = ROW_GUTTER + CELL_MARGIN + c * (w + CELL_MARGIN)
        draw.text((x, 2), label[:24], fill=LABEL_COLOR, font=font)
    for r, row in enumerate(report.cells):
        y = COL_GUTTER + CELL_MARGIN + r * (h + CELL_MARGIN)
        draw.text((2, y), report.row_labels[r][:12], fill=LABEL_COLOR, font=font)
        for c, cell in enumerate(row):
            x = ROW_GUTTER + CELL_MARGIN + c * (w + CELL_MARGIN)
            canvas.paste(Image.fromarray(to_uint8(np.asarray(cell))), (x, y))
    return canvas


def export_grid(report: GridReport, path) -> Path:
    """Montage PNG at path, recipe sidecar at path + '.json'; returns the PNG path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    render_montage(report).save(path, format="PNG")
    sidecar = {
        "rows": report.rows,
        "cols": report.cols,
        "row_labels": list(report.row_labels),
        "col_labels": list(report.col_labels),
        "provenance": report.provenance,
    }
    sidecar_path = path.with_name(path.name + ".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    return path


def load_sidecar(path) -> dict:
    path = Path(path)
    if path.suffix != ".json":
        path = path.with_name(path.name + ".json")
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise GridError(f"no sidecar at {path}") from None
    except json.JSONDecodeError as exc:
        raise GridError(f"sidecar {path} is not valid JSON: {exc}") from None
