"""Shared fixtures: a tiny 16 x 16 setup trained once per session.

The tiny run keeps per-test cost low; anything that needs a trained model
(inference, drivers, service, CLI round trips) reuses it.
"""

from dataclasses import replace

import pytest

from scenegan.data.toy import default_toy_spec, generate_toy_dataset
from scenegan.model.config import DiscriminatorConfig, GeneratorConfig
from scenegan.model.inference import generator_from_checkpoint
from scenegan.train.loop import TrainingConfig, fit

TINY_RES = 16


@pytest.fixture(scope="session")
def tiny_spec():
    return replace(default_toy_spec(), resolution=TINY_RES)


@pytest.fixture(scope="session")
def tiny_samples(tiny_spec):
    return generate_toy_dataset(tiny_spec, 24, seed=3)


@pytest.fixture(scope="session")
def tiny_gen_cfg():
    return GeneratorConfig.scaled(TINY_RES, 0.125, noise_dim=8)


@pytest.fixture(scope="session")
def tiny_disc_cfg():
    return DiscriminatorConfig.scaled(TINY_RES, 0.125)


@pytest.fixture(scope="session")
def tiny_run(tiny_samples, tiny_gen_cfg, tiny_disc_cfg, tmp_path_factory):
    """Two epochs of real training; yields checkpoint paths and the final state."""
    out = tmp_path_factory.mktemp("tiny-run")
    cfg = TrainingConfig(batch_size=8, epochs=2, seed=1, checkpoint_every=1)
    ckpt, metrics = fit(tiny_samples, tiny_gen_cfg, tiny_disc_cfg, cfg, out)
    return {"ckpt": ckpt, "metrics": metrics, "dir": out, "path": out / "final.ckpt"}


@pytest.fixture(scope="session")
def tiny_generator(tiny_run):
    return generator_from_checkpoint(tiny_run["ckpt"])
