"""Image generator: stride-1 stem, stride-2 encoder to 8 x 8, deconv decoder.

All hidden layers use batch normalization and ReLU; the output layer is a
plain (de)convolution with tanh, so pixels land strictly inside (-1, 1).
"""

import torch
from torch import nn

from .config import GeneratorConfig, generator_shape_plan


class NonFiniteError(RuntimeError):
    """A weight or activation went NaN/Inf; the message names the layer."""


def _check_finite(x: torch.Tensor, layer: str, net: str):
    if not torch.isfinite(x).all():
        raise NonFiniteError(f"{net}: non-finite activation after layer {layer!r}")


class Generator(nn.Module):
    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        k = cfg.kernel_size
        pad = k // 2
        names, blocks = [], []

        def add(name, block):
            names.append(name)
            blocks.append(block)

        add("conv1", nn.Sequential(
            nn.Conv2d(cfg.in_channels, cfg.stem_out, k, 1, pad),
            nn.BatchNorm2d(cfg.stem_out),
            nn.ReLU(inplace=True),
        ))
        channels = cfg.stem_out
        for i, c in enumerate(cfg.down_channels, start=2):
            add(f"conv{i}", nn.Sequential(
                nn.Conv2d(channels, c, k, 2, pad),
                nn.BatchNorm2d(c),
                nn.ReLU(inplace=True),
            ))
            channels = c
        if cfg.n_stages == 0:
            # degenerate micro config: the image is already at bottleneck size
            add("output", nn.Sequential(nn.Conv2d(channels, 3, k, 1, pad), nn.Tanh()))
        else:
            for i, c in enumerate(cfg.up_channels[:-1], start=1):
                add(f"deconv{i}", nn.Sequential(
                    nn.ConvTranspose2d(channels, c, k, 2, pad, output_padding=1),
                    nn.BatchNorm2d(c),
                    nn.ReLU(inplace=True),
                ))
                channels = c
            add(f"deconv{len(cfg.up_channels)}", nn.Sequential(
                nn.ConvTranspose2d(channels, 3, k, 2, pad, output_padding=1),
                nn.Tanh(),
            ))
        self.layer_names = names
        self.blocks = nn.ModuleList(blocks)

    def forward(self, volume: torch.Tensor, check_finite: bool = True) -> torch.Tensor:
        if volume.ndim != 4 or volume.shape[1] != self.cfg.in_channels:
            raise ValueError(
                f"generator expects (B, {self.cfg.in_channels}, {self.cfg.resolution}, "
                f"{self.cfg.resolution}), got {tuple(volume.shape)}"
            )
        if volume.shape[2] != self.cfg.resolution or volume.shape[3] != self.cfg.resolution:
            raise ValueError(
                f"generator expects spatial size {self.cfg.resolution}, got "
                f"{volume.shape[2]}x{volume.shape[3]}"
            )
        x = volume
        for name, block in zip(self.layer_names, self.blocks):
            x = block(x)
            if check_finite:
                _check_finite(x, name, "generator")
        return x

    def shape_plan(self):
        return generator_shape_plan(self.cfg)
