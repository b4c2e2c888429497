"""Adversarial losses over discriminator probabilities.

d_loss = -mean log D(real) - mean log(1 - D(fake)); the generator either
minimizes mean log(1 - D(fake)) (minimax) or -mean log D(fake)
(non-saturating). Probabilities are clamped away from {0, 1} because the
logs are undefined there.
"""

import torch

LOG_EPS = 1e-7

MINIMAX = "minimax"
NON_SATURATING = "non_saturating"
GENERATOR_LOSS_MODES = (MINIMAX, NON_SATURATING)


def _log(p: torch.Tensor) -> torch.Tensor:
    return torch.log(p.clamp(min=LOG_EPS))


def d_loss(d_real: torch.Tensor, d_fake: torch.Tensor) -> torch.Tensor:
    """Discriminator loss; minimized by D -> 1 on real and D -> 0 on fake."""
    return -_log(d_real).mean() - _log(1.0 - d_fake).mean()


def g_loss(d_fake: torch.Tensor, mode: str = NON_SATURATING) -> torch.Tensor:
    """Generator loss; both modes decrease as fakes fool the discriminator."""
    if mode == MINIMAX:
        return _log(1.0 - d_fake).mean()
    if mode == NON_SATURATING:
        return -_log(d_fake).mean()
    raise ValueError(f"unknown generator loss mode {mode!r}; expected one of {GENERATOR_LOSS_MODES}")


def batch_value(d_real: torch.Tensor, d_fake: torch.Tensor) -> torch.Tensor:
    """Empirical two-player objective on a batch: mean log D(real) + mean log(1 - D(fake)).

    By construction d_loss == -batch_value and the minimax g_loss equals its
    fake term.
    """
    return _log(d_real).mean() + _log(1.0 - d_fake).mean()
