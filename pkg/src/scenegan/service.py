"""HTTP inference service over a single loaded checkpoint.

Request bodies are parsed by hand instead of through framework models so the
error contract stays exact: unparseable JSON is 400, a field out of shape or
bounds is 422 naming the field, and a missing checkpoint is 503. Identical
request bodies produce byte-identical responses; a bounded semaphore caps
concurrent forward passes and queues the rest.
"""

import base64
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .data.labels import CANONICAL_LABELS, attribute_names, label_palette
from .data.layout import LayoutError, SemanticLayout, layout_from_png_bytes
from .data.preprocess import to_uint8
from .eval.sweeps import SweepRequest, attribute_sweep
from .model.config import VariantKind, variant_of
from .model.inference import generate_image, generator_from_checkpoint
from .train.checkpoint import checkpoint_hash, load_checkpoint

PORT_ENV_VAR = "SCENEGAN_PORT"
DEFAULT_PORT = 8411


class RequestFieldError(Exception):
    """Validation failure tied to one request field; rendered as a 422."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(message)
        self.fieldname = fieldname


@dataclass
class ServiceState:
    gen: object = None
    checkpoint_hash: str | None = None
    variant: VariantKind | None = None
    gate: threading.Semaphore = field(default_factory=lambda: threading.Semaphore(2))

    def load(self, path) -> None:
        ckpt = load_checkpoint(path)
        self.gen = generator_from_checkpoint(ckpt)
        self.checkpoint_hash = checkpoint_hash(path)
        self.variant = variant_of(self.gen.cfg)

    @property
    def resolution(self):
        return None if self.gen is None else self.gen.cfg.resolution


def _error(status: int, message: str, fieldname=None) -> JSONResponse:
    body = {"detail": message}
    if fieldname is not None:
        body["field"] = fieldname
    return JSONResponse(body, status_code=status)


async def _parse_body(request: Request) -> dict:
    raw = await request.body()
    try:
        obj = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"body is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ValueError(f"body must be a JSON object, got {type(obj).__name__}")
    return obj


def _require_attributes(body: dict, n_slots: int) -> np.ndarray:
    if "attributes" not in body:
        raise RequestFieldError("attributes", "attributes is required")
    values = body["attributes"]
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise RequestFieldError("attributes", "attributes must be a list of numbers")
    if len(values) != n_slots:
        raise RequestFieldError("attributes", f"attributes must have {n_slots} entries, got {len(values)}")
    for k, v in enumerate(values):
        if not 0.0 <= v <= 1.0:
            raise RequestFieldError(f"attributes[{k}]", f"attributes[{k}] = {v} outside [0, 1]")
    return np.asarray(values, dtype=np.float32)


def _require_layout(body: dict, resolution: int) -> SemanticLayout:
    if "layout" not in body:
        raise RequestFieldError("layout", "layout is required")
    if not isinstance(body["layout"], str):
        raise RequestFieldError("layout", "layout must be a base64 PNG string")
    try:
        png = base64.b64decode(body["layout"], validate=True)
        layout = layout_from_png_bytes(png)
    except (ValueError, OSError, LayoutError) as exc:
        # OSError covers PIL's UnidentifiedImageError on non-PNG bytes.
        raise RequestFieldError("layout", f"layout does not decode to an index map: {exc}") from None
    if layout.index_map.shape != (resolution, resolution):
        raise RequestFieldError(
            "layout",
            f"layout is {layout.index_map.shape[0]}x{layout.index_map.shape[1]}, "
            f"model expects {resolution}x{resolution}",
        )
    return layout


def _require_seed(body: dict) -> int:
    seed = body.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise RequestFieldError("seed", "seed must be an integer")
    return seed


def _check_checkpoint_field(body: dict, state: ServiceState) -> None:
    wanted = body.get("checkpoint")
    if wanted is None:
        return
    if not isinstance(wanted, str) or not state.checkpoint_hash.startswith(wanted):
        raise RequestFieldError("checkpoint", f"service holds checkpoint {state.checkpoint_hash}, not {wanted!r}")


def _inputs_for_variant(body: dict, state: ServiceState):
    """(layout, attributes) as the loaded variant requires; extra inputs are ignored."""
    layout = None
    attrs = None
    if state.variant in (VariantKind.AL, VariantKind.L_ONLY):
        layout = _require_layout(body, state.resolution)
    if state.variant in (VariantKind.AL, VariantKind.A_ONLY):
        attrs = _require_attributes(body, state.gen.cfg.attribute_channels)
    return layout, attrs


def _png_b64(image: np.ndarray) -> str:
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(to_uint8(image)).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def create_app(checkpoint_path=None, max_workers: int = 2) -> FastAPI:
    app = FastAPI(title="scene synthesis service")
    # The browser studio is served from its own origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    state = ServiceState(gate=threading.Semaphore(max_workers))
    app.state.service = state
    if checkpoint_path is not None:
        state.load(checkpoint_path)

    @app.get("/meta")
    def meta():
        return {
            "labels": list(CANONICAL_LABELS) + ["unlabeled"],
            "attributes": attribute_names(),
            "palette": label_palette(),
            "resolution": state.resolution,
            "checkpoint_hash": state.checkpoint_hash,
            "variant": None if state.variant is None else state.variant.value,
        }

    @app.post("/generate")
    async def generate(request: Request):
        try:
            body = await _parse_body(request)
        except ValueError as exc:
            return _error(400, str(exc))
        if state.gen is None:
            return _error(503, "no checkpoint loaded")
        t0 = time.perf_counter()
        try:
            _check_checkpoint_field(body, state)
            layout, attrs = _inputs_for_variant(body, state)
            seed = _require_seed(body)
        except RequestFieldError as exc:
            return _error(422, str(exc), exc.fieldname)
        with state.gate:
            image = generate_image(state.gen, layout, attrs, seed)
        return {
            "image": _png_b64(image),
            "provenance": {
                "checkpoint_hash": state.checkpoint_hash,
                "seed": seed,
                "latency_ms": (time.perf_counter() - t0) * 1000.0,
            },
        }

    @app.post("/sweep")
    async def sweep(request: Request):
        try:
            body = await _parse_body(request)
        except ValueError as exc:
            return _error(400, str(exc))
        if state.gen is None:
            return _error(503, "no checkpoint loaded")
        if state.variant is VariantKind.L_ONLY:
            return _error(422, "layout-only model has no attributes to sweep", "attribute_index")
        t0 = time.perf_counter()
        try:
            _check_checkpoint_field(body, state)
            layout, attrs = _inputs_for_variant(body, state)
            seed = _require_seed(body)
            index = body.get("attribute_index")
            if isinstance(index, bool) or not isinstance(index, int):
                raise RequestFieldError("attribute_index", "attribute_index must be an integer")
            n_slots = state.gen.cfg.attribute_channels
            if not 0 <= index < n_slots:
                raise RequestFieldError("attribute_index", f"attribute_index {index} outside [0, {n_slots - 1}]")
            strengths = body.get("strengths", [0.0, 0.25, 0.5, 0.75, 1.0])
            if (
                not isinstance(strengths, list)
                or not strengths
                or not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in strengths)
            ):
                raise RequestFieldError("strengths", "strengths must be a non-empty list of numbers")
            for k, s in enumerate(strengths):
                if not 0.0 <= s <= 1.0:
                    raise RequestFieldError(f"strengths[{k}]", f"strengths[{k}] = {s} outside [0, 1]")
            if list(strengths) != sorted(strengths):
                raise RequestFieldError("strengths", "strengths must be sorted ascending")
        except RequestFieldError as exc:
            return _error(422, str(exc), exc.fieldname)
        req = SweepRequest(
            layout=layout,
            base_attributes=attrs,
            attribute_index=index,
            strengths=tuple(float(s) for s in strengths),
            seed=seed,
        )
        with state.gate:
            report = attribute_sweep(state.gen, req, checkpoint_hash=state.checkpoint_hash)
        return {
            "images": [_png_b64(cell) for cell in report.cells[0]],
            "strengths": list(req.strengths),
            "provenance": {
                "checkpoint_hash": state.checkpoint_hash,
                "seed": seed,
                "attribute_index": index,
                "latency_ms": (time.perf_counter() - t0) * 1000.0,
            },
        }

    return app


def run_service(checkpoint_path, host: str = "127.0.0.1", port: int | None = None, max_workers: int = 2):
    """Blocking uvicorn runner; port falls back to the environment, then the default."""
    import os

    import uvicorn

    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    app = create_app(checkpoint_path, max_workers=max_workers)
    uvicorn.run(app, host=host, port=port, log_level="warning")
