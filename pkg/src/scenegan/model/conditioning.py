"""Conditioning assembly: tile noise and attribute vectors over the layout maps.

The generator consumes a single volume with channel order
[layout | tiled attributes | tiled noise]; the discriminator's condition
branch consumes [layout | tiled attributes]. Tiled channels are spatially
constant by construction.
"""

import torch

from .config import VariantKind


class ConditioningError(ValueError):
    pass


def sample_noise(dim: int, seed: int, batch: int = 1) -> torch.Tensor:
    """(batch, dim) i.i.d. standard-normal draws, deterministic per seed."""
    if dim <= 0:
        raise ConditioningError(f"noise dimension must be positive, got {dim}")
    if batch <= 0:
        raise ConditioningError(f"batch must be positive, got {batch}")
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(batch, dim, generator=gen)


def sample_noise_batch(batch: int, dim: int, generator: torch.Generator) -> torch.Tensor:
    """Batched draws from a caller-owned RNG stream (training loop use)."""
    return torch.randn(batch, dim, generator=generator)


def tile_vector(vec: torch.Tensor, resolution: int) -> torch.Tensor:
    """(B, C) -> (B, C, R, R) by replicating each vector to all spatial positions."""
    if vec.ndim != 2:
        raise ConditioningError(f"expected (batch, channels) vector, got shape {tuple(vec.shape)}")
    return vec[:, :, None, None].expand(-1, -1, resolution, resolution).contiguous()


def _check_batch(name_a: str, a, name_b: str, b):
    if a.shape[0] != b.shape[0]:
        raise ConditioningError(
            f"batch mismatch: {name_a} has {a.shape[0]} rows, {name_b} has {b.shape[0]}"
        )


def _layout_tensor(s: torch.Tensor) -> torch.Tensor:
    if s.ndim != 4:
        raise ConditioningError(f"layout batch must be (B, S, R, R), got shape {tuple(s.shape)}")
    if s.shape[2] != s.shape[3]:
        raise ConditioningError(f"layout must be square, got {s.shape[2]}x{s.shape[3]}")
    return s


def assemble_condition_maps(
    a: torch.Tensor | None,
    s: torch.Tensor | None,
    variant: VariantKind,
    resolution: int | None = None,
) -> torch.Tensor:
    """[layout | tiled attributes] volume for the variant's wired-in signals.

    a: (B, A) attribute batch, s: (B, S, R, R) one-hot layout batch. The
    dropped signal of an ablation variant may be passed or omitted; it is
    ignored either way.
    """
    variant = VariantKind(variant)
    parts = []
    if variant in (VariantKind.AL, VariantKind.L_ONLY):
        if s is None:
            raise ConditioningError(f"variant {variant.value} requires a layout batch")
        s = _layout_tensor(s)
        resolution = s.shape[2]
        parts.append(s)
    if variant in (VariantKind.AL, VariantKind.A_ONLY):
        if a is None:
            raise ConditioningError(f"variant {variant.value} requires an attribute batch")
        if a.ndim != 2:
            raise ConditioningError(f"attribute batch must be (B, A), got shape {tuple(a.shape)}")
        if resolution is None:
            raise ConditioningError("resolution required when no layout is wired in")
        parts.append(tile_vector(a.to(dtype=parts[0].dtype) if parts else a, resolution))
    if len(parts) == 2:
        _check_batch("layout", parts[0], "attributes", parts[1])
    return torch.cat(parts, dim=1) if len(parts) > 1 else parts[0]


def assemble_generator_input(
    z: torch.Tensor,
    a: torch.Tensor | None,
    s: torch.Tensor | None,
    variant: VariantKind,
    resolution: int | None = None,
) -> torch.Tensor:
    """Full generator input volume [layout | tiled attributes | tiled noise]."""
    if z.ndim != 2:
        raise ConditioningError(f"noise batch must be (B, Z), got shape {tuple(z.shape)}")
    variant = VariantKind(variant)
    use_s = variant in (VariantKind.AL, VariantKind.L_ONLY)
    use_a = variant in (VariantKind.AL, VariantKind.A_ONLY)
    if use_s:
        if s is None:
            raise ConditioningError(f"variant {variant.value} requires a layout batch")
        s = _layout_tensor(s)
        resolution = s.shape[2]
        _check_batch("layout", s, "noise", z)
    if resolution is None:
        raise ConditioningError("resolution required when no layout is wired in")
    parts = [s] if use_s else []
    if use_a:
        if a is None:
            raise ConditioningError(f"variant {variant.value} requires an attribute batch")
        _check_batch("attributes", a, "noise", z)
        parts.append(tile_vector(a.to(z.dtype), resolution))
    parts.append(tile_vector(z, resolution))
    return torch.cat(parts, dim=1)
