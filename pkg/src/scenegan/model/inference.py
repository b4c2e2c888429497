"""Single-image generation on a trained generator, shared by drivers and the service."""

import numpy as np
import torch

from ..data.layout import SemanticLayout
from .conditioning import assemble_generator_input, sample_noise
from .config import VariantKind, variant_of
from .generator import Generator


class InferenceError(ValueError):
    pass


def ensure_finite_weights(module: torch.nn.Module, name: str) -> None:
    for pname, p in module.named_parameters():
        if not torch.isfinite(p).all():
            raise InferenceError(f"{name} has non-finite weights in '{pname}'")


def prepare_inputs(gen: Generator, layout, attributes, seed: int):
    """Validated (z, a, s) batch-of-one tensors for the generator's variant."""
    cfg = gen.cfg
    variant = variant_of(cfg)
    s = None
    a = None
    if variant in (VariantKind.AL, VariantKind.L_ONLY):
        if layout is None:
            raise InferenceError(f"{variant.value} generator needs a layout")
        if not isinstance(layout, SemanticLayout):
            raise InferenceError(f"layout must be a SemanticLayout, got {type(layout).__name__}")
        if layout.index_map.shape != (cfg.resolution, cfg.resolution):
            raise InferenceError(
                f"layout is {layout.index_map.shape[0]}x{layout.index_map.shape[1]}, "
                f"model expects {cfg.resolution}x{cfg.resolution}"
            )
        s = torch.from_numpy(layout.channels_first()).unsqueeze(0)
    if variant in (VariantKind.AL, VariantKind.A_ONLY):
        if attributes is None:
            raise InferenceError(f"{variant.value} generator needs attributes")
        a = np.asarray(attributes, dtype=np.float32)
        if a.shape != (cfg.attribute_channels,):
            raise InferenceError(
                f"attributes must have shape ({cfg.attribute_channels},), got {tuple(a.shape)}"
            )
        a = torch.from_numpy(a).unsqueeze(0)
    z = sample_noise(cfg.noise_dim, seed)
    return z, a, s, variant


@torch.no_grad()
def generate_image(gen: Generator, layout, attributes, seed: int) -> np.ndarray:
    """H x W x 3 float32 image in [-1, 1]; deterministic in (weights, inputs, seed)."""
    ensure_finite_weights(gen, "generator")
    z, a, s, variant = prepare_inputs(gen, layout, attributes, seed)
    gen.eval()
    volume = assemble_generator_input(z, a, s, variant, resolution=gen.cfg.resolution)
    out = gen(volume)
    return out[0].permute(1, 2, 0).contiguous().numpy().astype(np.float32)


def generator_from_checkpoint(ckpt) -> Generator:
    """Eval-mode generator rebuilt from a checkpoint's config and weights."""
    from .config import generator_config_from_json

    gen = Generator(generator_config_from_json(ckpt.gen_config))
    gen.load_state_dict(ckpt.gen_state)
    gen.eval()
    return gen
