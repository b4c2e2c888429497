"""Network configuration: layer widths, stride schedule, conditioning variants.

Defaults reproduce the full-scale architecture: a stride-1 stem followed by
stride-2 convolutions down to an 8 x 8 bottleneck, mirrored back up by
stride-2 deconvolutions (generator) or fused at the bottleneck
(discriminator). Scaled configs shrink resolution and widths for desk-size
runs while keeping the 8 x 8 bottleneck.
"""

import json
from dataclasses import asdict, dataclass, replace
from enum import Enum

BOTTLENECK = 8
FULL_STAGE_CHANNELS = (128, 256, 512, 1024)  # stride-2 widths at full scale
FULL_FUSION_CHANNELS = 2048
IMAGE_CHANNELS = 3


class ConfigError(ValueError):
    pass


class VariantKind(str, Enum):
    """Which conditioning signals are wired into both networks."""

    AL = "AL"  # attributes and layout
    A_ONLY = "A_ONLY"  # attributes only (no layout channels)
    L_ONLY = "L_ONLY"  # layout only (no attribute channels)


def _check_stage_count(resolution: int, n_stages: int, what: str):
    if resolution != BOTTLENECK * (2 ** n_stages):
        raise ConfigError(
            f"{what}: resolution {resolution} needs {n_stages} stride-2 stages to reach "
            f"the {BOTTLENECK}x{BOTTLENECK} bottleneck, but resolution != {BOTTLENECK}*2^{n_stages}"
        )


@dataclass(frozen=True)
class GeneratorConfig:
    resolution: int = 128
    layout_channels: int = 19
    attribute_channels: int = 40
    noise_dim: int = 100
    stem_channels: int | None = None  # None: stride-1 stem preserves its input width
    down_channels: tuple = FULL_STAGE_CHANNELS
    up_channels: tuple = (512, 256, 128, IMAGE_CHANNELS)
    kernel_size: int = 5

    def __post_init__(self):
        object.__setattr__(self, "down_channels", tuple(self.down_channels))
        object.__setattr__(self, "up_channels", tuple(self.up_channels))
        n = len(self.down_channels)
        _check_stage_count(self.resolution, n, "generator")
        if self.up_channels[-1] != IMAGE_CHANNELS:
            raise ConfigError(f"final deconv must output {IMAGE_CHANNELS} channels, got {self.up_channels[-1]}")
        if len(self.up_channels) != max(n, 1):
            raise ConfigError(
                f"up path needs {max(n, 1)} layers for {n} stride-2 stages, got {len(self.up_channels)}"
            )
        if self.noise_dim < 1:
            raise ConfigError(f"noise_dim must be >= 1, got {self.noise_dim}")
        if self.in_channels < 1:
            raise ConfigError("generator input has no channels; check variant and dims")

    @property
    def in_channels(self) -> int:
        return self.layout_channels + self.attribute_channels + self.noise_dim

    @property
    def stem_out(self) -> int:
        return self.in_channels if self.stem_channels is None else self.stem_channels

    @property
    def n_stages(self) -> int:
        return len(self.down_channels)

    @classmethod
    def scaled(cls, resolution: int, channel_multiplier: float = 1.0, noise_dim: int = 100, **kw) -> "GeneratorConfig":
        """Desk-scale config: fewer stride-2 stages, widths scaled by the multiplier.

        The stage ladder keeps the full config's doubling pattern anchored at
        its first stage, and the multiplier also scales the stem when < 1.
        """
        n = _stages_for(resolution)
        downs = tuple(max(4, round(c * channel_multiplier)) for c in FULL_STAGE_CHANNELS[:n])
        ups = tuple(reversed(downs[:-1])) + (IMAGE_CHANNELS,) if n >= 1 else (IMAGE_CHANNELS,)
        kw.setdefault("down_channels", downs)
        kw.setdefault("up_channels", ups)
        cfg = cls(resolution=resolution, noise_dim=noise_dim, **kw)
        if channel_multiplier < 1 and "stem_channels" not in kw:
            cfg = replace(cfg, stem_channels=max(4, round(cfg.in_channels * channel_multiplier)))
        return cfg


@dataclass(frozen=True)
class DiscriminatorConfig:
    resolution: int = 128
    layout_channels: int = 19
    attribute_channels: int = 40
    cond_stem_channels: int | None = None  # attribute-layout branch stem; None preserves width
    image_stem_channels: int = IMAGE_CHANNELS
    branch_channels: tuple = FULL_STAGE_CHANNELS
    fusion_channels: int = FULL_FUSION_CHANNELS
    head_hidden: bool = False  # optional wide hidden linear before the logit
    kernel_size: int = 5

    def __post_init__(self):
        object.__setattr__(self, "branch_channels", tuple(self.branch_channels))
        _check_stage_count(self.resolution, self.n_stages, "discriminator")
        if self.cond_channels < 1:
            raise ConfigError("discriminator condition branch has no channels; check variant")

    @property
    def cond_channels(self) -> int:
        return self.layout_channels + self.attribute_channels

    @property
    def cond_stem_out(self) -> int:
        return self.cond_channels if self.cond_stem_channels is None else self.cond_stem_channels

    @property
    def n_stages(self) -> int:
        return len(self.branch_channels)

    @property
    def branch_out(self) -> int:
        """Per-branch channel count at the 8 x 8 bottleneck."""
        return self.branch_channels[-1] if self.branch_channels else max(self.cond_stem_out, self.image_stem_channels)

    @property
    def image_branch_out(self) -> int:
        return self.branch_channels[-1] if self.branch_channels else self.image_stem_channels

    @property
    def cond_branch_out(self) -> int:
        return self.branch_channels[-1] if self.branch_channels else self.cond_stem_out

    @property
    def fusion_in(self) -> int:
        """Concatenated width entering the 1 x 1 fusion; 2 x branch_out once any stage runs."""
        return self.image_branch_out + self.cond_branch_out

    @property
    def head_in(self) -> int:
        return self.fusion_channels * BOTTLENECK * BOTTLENECK

    @property
    def head_hidden_width(self) -> int:
        return self.branch_out * BOTTLENECK * BOTTLENECK

    @classmethod
    def scaled(cls, resolution: int, channel_multiplier: float = 1.0, **kw) -> "DiscriminatorConfig":
        """Desk-scale twin of GeneratorConfig.scaled; fusion keeps 2x the branch width."""
        n = _stages_for(resolution)
        branches = tuple(max(4, round(c * channel_multiplier)) for c in FULL_STAGE_CHANNELS[:n])
        kw.setdefault("branch_channels", branches)
        kw.setdefault("fusion_channels", 2 * (branches[-1] if branches else 4))
        cfg = cls(resolution=resolution, **kw)
        if channel_multiplier < 1 and "cond_stem_channels" not in kw:
            cfg = replace(cfg, cond_stem_channels=max(4, round(cfg.cond_channels * channel_multiplier)))
        return cfg


def _stages_for(resolution: int) -> int:
    n = 0
    r = resolution
    while r > BOTTLENECK:
        if r % 2:
            raise ConfigError(f"resolution {resolution} is not {BOTTLENECK}*2^k")
        r //= 2
        n += 1
    if r != BOTTLENECK:
        raise ConfigError(f"resolution {resolution} is below the {BOTTLENECK}x{BOTTLENECK} bottleneck")
    return n


def make_variant(kind: VariantKind, gen: GeneratorConfig, disc: DiscriminatorConfig):
    """Adjust a config pair for a conditioning variant.

    A_ONLY drops the layout channels, L_ONLY drops the attribute channels;
    every other layer width is left untouched.
    """
    kind = VariantKind(kind)
    if kind is VariantKind.A_ONLY:
        gen = replace(gen, layout_channels=0)
        disc = replace(disc, layout_channels=0)
    elif kind is VariantKind.L_ONLY:
        gen = replace(gen, attribute_channels=0)
        disc = replace(disc, attribute_channels=0)
    return gen, disc


def variant_of(cfg) -> VariantKind:
    """Recover the conditioning variant from a config's channel allocation."""
    if cfg.layout_channels == 0 and cfg.attribute_channels == 0:
        raise ConfigError("config carries neither layout nor attribute channels")
    if cfg.layout_channels == 0:
        return VariantKind.A_ONLY
    if cfg.attribute_channels == 0:
        return VariantKind.L_ONLY
    return VariantKind.AL


def generator_shape_plan(cfg: GeneratorConfig) -> list:
    """Per-layer (name, in_channels, out_channels, in_size, out_size, stride), by arithmetic."""
    plan = []
    size = cfg.resolution
    channels = cfg.in_channels
    plan.append(("conv1", channels, cfg.stem_out, size, size, 1))
    channels = cfg.stem_out
    for i, c in enumerate(cfg.down_channels, start=2):
        plan.append((f"conv{i}", channels, c, size, size // 2, 2))
        size //= 2
        channels = c
    if cfg.n_stages == 0:
        plan.append(("output", channels, IMAGE_CHANNELS, size, size, 1))
        return plan
    for i, c in enumerate(cfg.up_channels, start=1):
        plan.append((f"deconv{i}", channels, c, size, size * 2, 2))
        size *= 2
        channels = c
    return plan


def discriminator_shape_plan(cfg: DiscriminatorConfig) -> dict:
    """Shape plans for both branches plus fusion and head."""

    def branch(name: str, stem_in: int, stem_out: int) -> list:
        plan = [(f"{name}_conv1", stem_in, stem_out, cfg.resolution, cfg.resolution, 1)]
        size = cfg.resolution
        channels = stem_out
        for i, c in enumerate(cfg.branch_channels, start=2):
            plan.append((f"{name}_conv{i}", channels, c, size, size // 2, 2))
            size //= 2
            channels = c
        return plan

    return {
        "cond": branch("cond", cfg.cond_channels, cfg.cond_stem_out),
        "image": branch("image", IMAGE_CHANNELS, cfg.image_stem_channels),
        "fusion": ("fusion", cfg.fusion_in, cfg.fusion_channels, BOTTLENECK, BOTTLENECK, 1),
        "head_in": cfg.head_in,
    }


def config_to_json(cfg) -> dict:
    d = asdict(cfg)
    for k, v in d.items():
        if isinstance(v, tuple):
            d[k] = list(v)
    return d


def generator_config_from_json(obj: dict) -> GeneratorConfig:
    return GeneratorConfig(**_tupled(obj, ("down_channels", "up_channels")))


def discriminator_config_from_json(obj: dict) -> DiscriminatorConfig:
    return DiscriminatorConfig(**_tupled(obj, ("branch_channels",)))


def _tupled(obj: dict, keys) -> dict:
    out = dict(obj)
    for k in keys:
        if k in out and out[k] is not None:
            out[k] = tuple(out[k])
    return out


def dump_config(cfg, path) -> None:
    from pathlib import Path

    Path(path).write_text(json.dumps(config_to_json(cfg), indent=2) + "\n")
