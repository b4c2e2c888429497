"""Siamese discriminator: condition branch and image branch fused at 8 x 8.

Both branches run the same stride schedule (1, then 2s) down to the
bottleneck; their features are channel-concatenated and mixed by a 1 x 1
convolutional fusion layer before the sigmoid decision head. LeakyReLU and
batch normalization everywhere except the image branch's first convolution,
which has no normalization.
"""

import torch
from torch import nn

from .config import BOTTLENECK, DiscriminatorConfig, discriminator_shape_plan
from .generator import NonFiniteError, _check_finite

LEAKY_SLOPE = 0.2


def _branch(stem_in, stem_out, stage_channels, k, stem_batchnorm):
    pad = k // 2
    names, blocks = [], []
    stem = [nn.Conv2d(stem_in, stem_out, k, 1, pad)]
    if stem_batchnorm:
        stem.append(nn.BatchNorm2d(stem_out))
    stem.append(nn.LeakyReLU(LEAKY_SLOPE, inplace=True))
    names.append("conv1")
    blocks.append(nn.Sequential(*stem))
    channels = stem_out
    for i, c in enumerate(stage_channels, start=2):
        names.append(f"conv{i}")
        blocks.append(nn.Sequential(
            nn.Conv2d(channels, c, k, 2, pad),
            nn.BatchNorm2d(c),
            nn.LeakyReLU(LEAKY_SLOPE, inplace=True),
        ))
        channels = c
    return names, nn.ModuleList(blocks)


class SiameseDiscriminator(nn.Module):
    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        k = cfg.kernel_size
        self.image_names, self.image_branch = _branch(
            3, cfg.image_stem_channels, cfg.branch_channels, k, stem_batchnorm=False
        )
        self.cond_names, self.cond_branch = _branch(
            cfg.cond_channels, cfg.cond_stem_out, cfg.branch_channels, k, stem_batchnorm=True
        )
        self.fusion = nn.Sequential(
            nn.Conv2d(cfg.fusion_in, cfg.fusion_channels, 1, 1, 0),
            nn.BatchNorm2d(cfg.fusion_channels),
            nn.LeakyReLU(LEAKY_SLOPE, inplace=True),
        )
        head = []
        if cfg.head_hidden:
            head += [nn.Linear(cfg.head_in, cfg.head_hidden_width), nn.LeakyReLU(LEAKY_SLOPE, inplace=True)]
            head.append(nn.Linear(cfg.head_hidden_width, 1))
        else:
            head.append(nn.Linear(cfg.head_in, 1))
        self.head = nn.Sequential(*head)

    def branch_features(self, x: torch.Tensor, cond: torch.Tensor, check_finite: bool = True):
        """Run both branches to their 8 x 8 feature maps (pre-fusion)."""
        if x.ndim != 4 or x.shape[1] != 3:
            raise ValueError(f"image batch must be (B, 3, R, R), got {tuple(x.shape)}")
        if cond.ndim != 4 or cond.shape[1] != self.cfg.cond_channels:
            raise ValueError(
                f"condition batch must be (B, {self.cfg.cond_channels}, R, R), got {tuple(cond.shape)}"
            )
        if x.shape[0] != cond.shape[0]:
            raise ValueError(f"batch mismatch: image {x.shape[0]} vs condition {cond.shape[0]}")
        if x.shape[2] != self.cfg.resolution:
            raise ValueError(f"image spatial size {x.shape[2]} != configured {self.cfg.resolution}")
        for name, block in zip(self.image_names, self.image_branch):
            x = block(x)
            if check_finite:
                _check_finite(x, f"image_{name}", "discriminator")
        for name, block in zip(self.cond_names, self.cond_branch):
            cond = block(cond)
            if check_finite:
                _check_finite(cond, f"cond_{name}", "discriminator")
        return x, cond

    def forward(self, x: torch.Tensor, cond: torch.Tensor, check_finite: bool = True) -> torch.Tensor:
        """Realness probability in (0, 1), shape (B,)."""
        xf, cf = self.branch_features(x, cond, check_finite)
        fused = self.fusion(torch.cat([cf, xf], dim=1))
        if check_finite:
            _check_finite(fused, "fusion", "discriminator")
        logit = self.head(fused.flatten(1))
        if check_finite:
            _check_finite(logit, "head", "discriminator")
        return torch.sigmoid(logit).squeeze(1)

    def shape_plan(self):
        return discriminator_shape_plan(self.cfg)


__all__ = ["SiameseDiscriminator", "NonFiniteError", "BOTTLENECK", "LEAKY_SLOPE"]
