"""Adversarial training loop: alternating Adam updates on the two networks.

Each step draws a real mini-batch, builds fakes from the batch's own
conditioning (layouts and attributes are sampled from the data distribution),
updates the discriminator, then updates the generator. All randomness flows
through named, seeded generator streams so runs are reproducible and
resumable.
"""

import csv
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..data.manifest import SceneSample
from ..model.conditioning import assemble_condition_maps, assemble_generator_input, sample_noise_batch
from ..model.config import (
    DiscriminatorConfig,
    GeneratorConfig,
    VariantKind,
    config_to_json,
    discriminator_config_from_json,
    generator_config_from_json,
    make_variant,
)
from ..model.discriminator import SiameseDiscriminator
from ..model.generator import Generator, NonFiniteError
from .checkpoint import Checkpoint, load_checkpoint, pack_optimizer, save_checkpoint, unpack_optimizer
from .losses import GENERATOR_LOSS_MODES, NON_SATURATING, d_loss, g_loss

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


class TrainingDiverged(TrainingError):
    """A loss went non-finite; carries the most recent checkpoint path, if any."""

    def __init__(self, message: str, last_checkpoint=None):
        super().__init__(message + (f" (last good checkpoint: {last_checkpoint})" if last_checkpoint else ""))
        self.last_checkpoint = last_checkpoint


@dataclass(frozen=True)
class TrainingConfig:
    batch_size: int = 64
    learning_rate: float = 2e-4
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    epochs: int = 400
    init_std: float = 0.02
    seed: int = 0
    variant: VariantKind = VariantKind.AL
    d_steps_per_g_step: int = 1
    generator_loss_mode: str = NON_SATURATING
    checkpoint_every: int = 10

    def __post_init__(self):
        object.__setattr__(self, "variant", VariantKind(self.variant))
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2 (batch normalization needs more than one sample)")
        if self.learning_rate <= 0 or self.init_std <= 0:
            raise ValueError("learning rate and init std must be positive")
        if self.generator_loss_mode not in GENERATOR_LOSS_MODES:
            raise ValueError(f"generator_loss_mode must be one of {GENERATOR_LOSS_MODES}")
        if self.d_steps_per_g_step < 1:
            raise ValueError("d_steps_per_g_step must be >= 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingConfig":
        return cls(**obj)


@dataclass
class TrainingMetrics:
    steps: list = field(default_factory=list)  # dicts: step, epoch, d_loss, g_loss, d_real, d_fake, seconds
    epochs: list = field(default_factory=list)  # dicts: epoch, d_loss, g_loss, d_real, d_fake, seconds

    def record_step(self, **row):
        self.steps.append(row)

    def summarize_epoch(self, epoch: int, seconds: float):
        rows = [r for r in self.steps if r["epoch"] == epoch]
        if not rows:
            return
        agg = {k: float(np.mean([r[k] for r in rows])) for k in ("d_loss", "g_loss", "d_real", "d_fake")}
        self.epochs.append({"epoch": epoch, "seconds": seconds, **agg})

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fields = ["step", "epoch", "d_loss", "g_loss", "d_real", "d_fake", "seconds"]
        with path.open("w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.steps)


def init_weights(gen: Generator, disc: SiameseDiscriminator, std: float, seed: int) -> None:
    """Kernels ~ N(0, std^2), biases 0, normalization scale 1 / shift 0; per-seed deterministic."""
    rng = torch.Generator().manual_seed(seed)
    for module in list(gen.modules()) + list(disc.modules()):
        if isinstance(module, (torch.nn.Conv2d, torch.nn.ConvTranspose2d, torch.nn.Linear)):
            with torch.no_grad():
                module.weight.normal_(0.0, std, generator=rng)
                if module.bias is not None:
                    module.bias.zero_()
        elif isinstance(module, torch.nn.BatchNorm2d):
            with torch.no_grad():
                module.weight.fill_(1.0)
                module.bias.zero_()


def _stack_batch(samples, indices, variant: VariantKind):
    """(images, layouts, attributes) tensors for the chosen sample indices."""
    images = torch.from_numpy(
        np.stack([np.transpose(samples[i].image, (2, 0, 1)) for i in indices])
    )
    layouts = None
    attrs = None
    if variant in (VariantKind.AL, VariantKind.L_ONLY):
        layouts = torch.from_numpy(np.stack([samples[i].layout.channels_first() for i in indices]))
    if variant in (VariantKind.AL, VariantKind.A_ONLY):
        attrs = torch.from_numpy(np.stack([samples[i].attributes for i in indices]))
    return images, layouts, attrs


class Trainer:
    """Owns the mutable training state: both networks, optimizers, RNG streams."""

    def __init__(self, gen_cfg: GeneratorConfig, disc_cfg: DiscriminatorConfig, cfg: TrainingConfig):
        gen_cfg, disc_cfg = make_variant(cfg.variant, gen_cfg, disc_cfg)
        self.gen_cfg = gen_cfg
        self.disc_cfg = disc_cfg
        self.cfg = cfg
        self.gen = Generator(gen_cfg)
        self.disc = SiameseDiscriminator(disc_cfg)
        init_weights(self.gen, self.disc, cfg.init_std, cfg.seed)
        betas = (cfg.adam_beta1, cfg.adam_beta2)
        self.opt_g = torch.optim.Adam(self.gen.parameters(), lr=cfg.learning_rate, betas=betas)
        self.opt_d = torch.optim.Adam(self.disc.parameters(), lr=cfg.learning_rate, betas=betas)
        self.shuffle_rng = torch.Generator().manual_seed(cfg.seed * 9973 + 1)
        self.noise_rng = torch.Generator().manual_seed(cfg.seed * 9973 + 2)
        self.epoch = 0
        self.global_step = 0
        self.last_checkpoint = None

    # -- state round-trip ---------------------------------------------------

    def to_checkpoint(self) -> Checkpoint:
        gen_names = [n for n, _ in self.gen.named_parameters()]
        disc_names = [n for n, _ in self.disc.named_parameters()]
        return Checkpoint(
            gen_state=self.gen.state_dict(),
            disc_state=self.disc.state_dict(),
            gen_config=config_to_json(self.gen_cfg),
            disc_config=config_to_json(self.disc_cfg),
            train_config=self.cfg.to_json(),
            epoch=self.epoch,
            opt_g_state=pack_optimizer(self.opt_g, gen_names),
            opt_d_state=pack_optimizer(self.opt_d, disc_names),
            rng_states={
                "shuffle": self.shuffle_rng.get_state().numpy().tobytes(),
                "noise": self.noise_rng.get_state().numpy().tobytes(),
            },
        )

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "Trainer":
        cfg = TrainingConfig.from_json(ckpt.train_config)
        gen_cfg = generator_config_from_json(ckpt.gen_config)
        disc_cfg = discriminator_config_from_json(ckpt.disc_config)
        trainer = cls.__new__(cls)
        trainer.gen_cfg = gen_cfg
        trainer.disc_cfg = disc_cfg
        trainer.cfg = cfg
        trainer.gen = Generator(gen_cfg)
        trainer.disc = SiameseDiscriminator(disc_cfg)
        trainer.gen.load_state_dict(ckpt.gen_state)
        trainer.disc.load_state_dict(ckpt.disc_state)
        betas = (cfg.adam_beta1, cfg.adam_beta2)
        trainer.opt_g = torch.optim.Adam(trainer.gen.parameters(), lr=cfg.learning_rate, betas=betas)
        trainer.opt_d = torch.optim.Adam(trainer.disc.parameters(), lr=cfg.learning_rate, betas=betas)
        unpack_optimizer(trainer.opt_g, [n for n, _ in trainer.gen.named_parameters()], ckpt.opt_g_state)
        unpack_optimizer(trainer.opt_d, [n for n, _ in trainer.disc.named_parameters()], ckpt.opt_d_state)
        trainer.shuffle_rng = torch.Generator()
        trainer.noise_rng = torch.Generator()
        if "shuffle" in ckpt.rng_states:
            trainer.shuffle_rng.set_state(torch.frombuffer(bytearray(ckpt.rng_states["shuffle"]), dtype=torch.uint8).clone())
            trainer.noise_rng.set_state(torch.frombuffer(bytearray(ckpt.rng_states["noise"]), dtype=torch.uint8).clone())
        trainer.epoch = ckpt.epoch
        trainer.global_step = 0
        trainer.last_checkpoint = None
        return trainer

    # -- optimization -------------------------------------------------------

    def train_step(self, images: torch.Tensor, layouts, attrs) -> dict:
        """One alternation: d_steps_per_g_step discriminator updates, one generator update."""
        cfg = self.cfg
        self.gen.train()
        self.disc.train()
        variant = cfg.variant
        cond = assemble_condition_maps(attrs, layouts, variant, resolution=images.shape[2])
        t0 = time.perf_counter()

        d_loss_val = d_real_mean = d_fake_mean = 0.0
        try:
            fake = None
            for _ in range(cfg.d_steps_per_g_step):
                z = sample_noise_batch(images.shape[0], self.gen_cfg.noise_dim, self.noise_rng)
                volume = assemble_generator_input(z, attrs, layouts, variant, resolution=images.shape[2])
                fake = self.gen(volume)
                d_real = self.disc(images, cond)
                d_fake = self.disc(fake.detach(), cond)
                loss_d = d_loss(d_real, d_fake)
                self.opt_d.zero_grad(set_to_none=True)
                loss_d.backward()
                self.opt_d.step()
                d_loss_val = float(loss_d.detach())
                d_real_mean = float(d_real.detach().mean())
                d_fake_mean = float(d_fake.detach().mean())

            # generator update re-scores the last fake batch without detaching
            d_fake_for_g = self.disc(fake, cond)
            loss_g = g_loss(d_fake_for_g, cfg.generator_loss_mode)
            self.opt_g.zero_grad(set_to_none=True)
            loss_g.backward()
            self.opt_g.step()
            g_loss_val = float(loss_g.detach())
        except NonFiniteError as e:
            raise TrainingDiverged(f"step {self.global_step}: {e}", self.last_checkpoint) from e

        if not (np.isfinite(d_loss_val) and np.isfinite(g_loss_val)):
            raise TrainingDiverged(
                f"non-finite loss at step {self.global_step} (d={d_loss_val}, g={g_loss_val})",
                self.last_checkpoint,
            )
        self.global_step += 1
        return {
            "step": self.global_step,
            "epoch": self.epoch,
            "d_loss": d_loss_val,
            "g_loss": g_loss_val,
            "d_real": d_real_mean,
            "d_fake": d_fake_mean,
            "seconds": time.perf_counter() - t0,
        }

    def run_epoch(self, samples, metrics: TrainingMetrics) -> None:
        n = len(samples)
        order = torch.randperm(n, generator=self.shuffle_rng).tolist()
        t0 = time.perf_counter()
        for start in range(0, n - self.cfg.batch_size + 1, self.cfg.batch_size):
            batch_idx = order[start : start + self.cfg.batch_size]
            images, layouts, attrs = _stack_batch(samples, batch_idx, self.cfg.variant)
            metrics.record_step(**self.train_step(images, layouts, attrs))
        self.epoch += 1
        metrics.summarize_epoch(self.epoch - 1, time.perf_counter() - t0)


def train_step(trainer: Trainer, batch) -> dict:
    """Functional wrapper over Trainer.train_step for (images, layouts, attrs) batches."""
    return trainer.train_step(*batch)


def fit(samples, gen_cfg: GeneratorConfig, disc_cfg: DiscriminatorConfig, cfg: TrainingConfig,
        out_dir=None):
    """Full training run over in-memory samples; returns (Checkpoint, TrainingMetrics).

    Mini-batches are reshuffled per epoch under the seeded stream and the last
    partial batch is dropped. Checkpoints land in out_dir every
    checkpoint_every epochs plus a final one, with per-step metrics as CSV.
    """
    if not all(isinstance(s, SceneSample) for s in samples):
        raise TrainingError("fit expects a list of SceneSample")
    if len(samples) < cfg.batch_size:
        raise TrainingError(f"dataset has {len(samples)} samples; need at least one batch of {cfg.batch_size}")
    trainer = Trainer(gen_cfg, disc_cfg, cfg)
    return _run(trainer, samples, cfg, out_dir)


def resume(ckpt_path, samples, out_dir=None):
    """Continue a checkpointed run to its configured epoch count."""
    trainer = Trainer.from_checkpoint(load_checkpoint(ckpt_path))
    return _run(trainer, samples, trainer.cfg, out_dir)


def _run(trainer: Trainer, samples, cfg: TrainingConfig, out_dir):
    out_dir = Path(out_dir) if out_dir is not None else None
    metrics = TrainingMetrics()
    while trainer.epoch < cfg.epochs:
        trainer.run_epoch(samples, metrics)
        if out_dir and (trainer.epoch % cfg.checkpoint_every == 0 or trainer.epoch == cfg.epochs):
            path = out_dir / f"epoch_{trainer.epoch:04d}.ckpt"
            save_checkpoint(trainer.to_checkpoint(), path)
            trainer.last_checkpoint = path
            metrics.write_csv(out_dir / "metrics.csv")
        if trainer.epoch % 10 == 0 or trainer.epoch == cfg.epochs:
            last = metrics.epochs[-1] if metrics.epochs else {}
            log.info("epoch %d/%d d_loss=%.4f g_loss=%.4f", trainer.epoch, cfg.epochs,
                     last.get("d_loss", float("nan")), last.get("g_loss", float("nan")))
    ckpt = trainer.to_checkpoint()
    if out_dir:
        final = out_dir / "final.ckpt"
        save_checkpoint(ckpt, final)
        trainer.last_checkpoint = final
        metrics.write_csv(out_dir / "metrics.csv")
    return ckpt, metrics
