"""Checkpoint archive: versioned header, JSON metadata block, raw float32 blobs.

Layout:  magic "SGANCKPT" | u32 format version | u64 JSON length | JSON | blobs.
The JSON block carries both network configs, the training config, the epoch
counter and a blob index (name, dtype, shape, offset); blobs are
little-endian raw arrays: float32 parameters and optimizer moments, uint8
RNG states. Round-tripping is bit-exact, and reloading reproduces forward
passes and resumed training exactly on the same platform.
"""

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

MAGIC = b"SGANCKPT"
FORMAT_VERSION = 1

_DTYPES = {"float32": np.float32, "uint8": np.uint8, "int64": np.int64}


class CheckpointError(ValueError):
    pass


@dataclass
class Checkpoint:
    gen_state: dict
    disc_state: dict
    gen_config: dict
    disc_config: dict
    train_config: dict
    epoch: int
    opt_g_state: dict = field(default_factory=dict)
    opt_d_state: dict = field(default_factory=dict)
    rng_states: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


def _blob_items(ckpt: Checkpoint):
    for prefix, state in (("gen", ckpt.gen_state), ("disc", ckpt.disc_state),
                          ("opt_g", ckpt.opt_g_state), ("opt_d", ckpt.opt_d_state)):
        for name, tensor in state.items():
            arr = tensor.detach().cpu().numpy() if isinstance(tensor, torch.Tensor) else np.asarray(tensor)
            yield f"{prefix}.{name}", arr
    for name, state in ckpt.rng_states.items():
        yield f"rng.{name}", np.frombuffer(bytes(state), dtype=np.uint8)


def save_checkpoint(ckpt: Checkpoint, path) -> str:
    """Write the archive; returns the file's sha256 hex digest."""
    index = []
    blobs = []
    offset = 0
    for name, arr in _blob_items(ckpt):
        if arr.dtype == np.float64:
            arr = arr.astype(np.float32)
        if str(arr.dtype) not in _DTYPES:
            raise CheckpointError(f"blob {name!r} has unsupported dtype {arr.dtype}")
        raw = np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes()
        index.append({"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape),
                      "offset": offset, "nbytes": len(raw)})
        blobs.append(raw)
        offset += len(raw)
    meta = {
        "format_version": ckpt.format_version,
        "epoch": ckpt.epoch,
        "gen_config": ckpt.gen_config,
        "disc_config": ckpt.disc_config,
        "train_config": ckpt.train_config,
        "blobs": index,
    }
    payload = json.dumps(meta, sort_keys=True).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", ckpt.format_version))
        f.write(struct.pack("<Q", len(payload)))
        f.write(payload)
        for raw in blobs:
            f.write(raw)
    return checkpoint_hash(path)


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    data = path.read_bytes()
    if len(data) < len(MAGIC) + 12 or data[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"not a checkpoint archive: {path}")
    version = struct.unpack_from("<I", data, len(MAGIC))[0]
    if version != FORMAT_VERSION:
        raise CheckpointError(f"format version {version} unsupported (expected {FORMAT_VERSION})")
    json_len = struct.unpack_from("<Q", data, len(MAGIC) + 4)[0]
    header_end = len(MAGIC) + 12
    try:
        meta = json.loads(data[header_end : header_end + json_len])
    except json.JSONDecodeError as e:
        raise CheckpointError(f"corrupt metadata block: {e}") from e
    blob_base = header_end + json_len
    states = {"gen": {}, "disc": {}, "opt_g": {}, "opt_d": {}}
    rng_states = {}
    for entry in meta["blobs"]:
        start = blob_base + entry["offset"]
        end = start + entry["nbytes"]
        if end > len(data):
            raise CheckpointError(f"truncated archive: blob {entry['name']!r} extends past end of file")
        arr = np.frombuffer(data[start:end], dtype=_DTYPES[entry["dtype"]]).reshape(entry["shape"]).copy()
        prefix, name = entry["name"].split(".", 1)
        if prefix == "rng":
            rng_states[name] = arr.tobytes()
        else:
            states[prefix][name] = torch.from_numpy(arr)
    return Checkpoint(
        gen_state=states["gen"],
        disc_state=states["disc"],
        gen_config=meta["gen_config"],
        disc_config=meta["disc_config"],
        train_config=meta["train_config"],
        epoch=meta["epoch"],
        opt_g_state=states["opt_g"],
        opt_d_state=states["opt_d"],
        rng_states=rng_states,
        format_version=meta["format_version"],
    )


def checkpoint_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def pack_optimizer(opt: torch.optim.Optimizer, param_names: list) -> dict:
    """Flatten Adam state to named tensors; step counters become 0-d tensors."""
    out = {}
    params = [p for group in opt.param_groups for p in group["params"]]
    if len(params) != len(param_names):
        raise CheckpointError(f"optimizer has {len(params)} params but {len(param_names)} names given")
    for name, p in zip(param_names, params):
        state = opt.state.get(p)
        if not state:
            continue
        out[f"{name}.step"] = torch.tensor(float(state["step"]))
        out[f"{name}.exp_avg"] = state["exp_avg"]
        out[f"{name}.exp_avg_sq"] = state["exp_avg_sq"]
    return out


def unpack_optimizer(opt: torch.optim.Optimizer, param_names: list, packed: dict) -> None:
    params = [p for group in opt.param_groups for p in group["params"]]
    for name, p in zip(param_names, params):
        key = f"{name}.step"
        if key not in packed:
            continue
        opt.state[p] = {
            "step": torch.tensor(float(packed[key])),
            "exp_avg": packed[f"{name}.exp_avg"].clone(),
            "exp_avg_sq": packed[f"{name}.exp_avg_sq"].clone(),
        }
