import csv

import numpy as np
import pytest

from scenegan.eval import ablation
from scenegan.eval.ablation import (
    ALL_VARIANTS,
    AblationError,
    ablation_compare,
    toy_color_error,
)
from scenegan.model.config import VariantKind, make_variant
from scenegan.model.generator import Generator
from scenegan.model.inference import generate_image
from scenegan.train.loop import TrainingConfig, TrainingDiverged


def _micro_cfg(epochs=1):
    return TrainingConfig(batch_size=8, epochs=epochs, seed=1)


def test_compare_trains_each_variant_and_scores_them(
    tmp_path, tiny_samples, tiny_gen_cfg, tiny_disc_cfg, tiny_spec
):
    report = ablation_compare(
        tiny_samples,
        tiny_gen_cfg,
        tiny_disc_cfg,
        _micro_cfg(),
        variants=(VariantKind.AL, VariantKind.L_ONLY),
        toy_spec=tiny_spec,
        out_dir=tmp_path,
    )
    assert report.grid.rows == 2
    assert report.grid.row_labels == ["AL", "L_ONLY"]
    assert report.grid.cols == 4
    assert set(report.checkpoints) == {"AL", "L_ONLY"}
    assert set(report.color_errors) == {"AL", "L_ONLY"}
    for err in report.color_errors.values():
        assert np.isfinite(err) and err >= 0
    assert report.diverged == {}
    with (tmp_path / "ablation.csv").open() as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["variant", "color_error", "status"]
    assert [r[0] for r in rows[1:]] == ["AL", "L_ONLY"]
    assert all(r[2] == "ok" for r in rows[1:])


def test_comparison_survives_a_diverging_variant(
    monkeypatch, tmp_path, tiny_samples, tiny_gen_cfg, tiny_disc_cfg
):
    real_fit = ablation.fit

    def flaky_fit(samples, gen_cfg, disc_cfg, cfg, out_dir=None):
        if cfg.variant is VariantKind.A_ONLY:
            raise TrainingDiverged("loss blew up")
        return real_fit(samples, gen_cfg, disc_cfg, cfg, out_dir)

    monkeypatch.setattr(ablation, "fit", flaky_fit)
    report = ablation_compare(
        tiny_samples, tiny_gen_cfg, tiny_disc_cfg, _micro_cfg(),
        variants=ALL_VARIANTS, out_dir=tmp_path,
    )
    assert set(report.diverged) == {"A_ONLY"}
    assert "loss blew up" in report.diverged["A_ONLY"]
    assert report.grid.row_labels == ["AL", "L_ONLY"]
    with (tmp_path / "ablation.csv").open() as f:
        status = {r[0]: r[2] for r in list(csv.reader(f))[1:]}
    assert status["A_ONLY"].startswith("diverged")
    assert status["AL"] == "ok"


def test_all_variants_diverging_is_an_error(
    monkeypatch, tiny_samples, tiny_gen_cfg, tiny_disc_cfg
):
    monkeypatch.setattr(
        ablation, "fit",
        lambda *a, **k: (_ for _ in ()).throw(TrainingDiverged("dead")),
    )
    with pytest.raises(AblationError, match="every variant diverged"):
        ablation_compare(tiny_samples, tiny_gen_cfg, tiny_disc_cfg, _micro_cfg())


def test_empty_dataset_cannot_supply_probes(tiny_gen_cfg, tiny_disc_cfg):
    with pytest.raises(AblationError, match="no probes"):
        ablation_compare([], tiny_gen_cfg, tiny_disc_cfg, _micro_cfg())


def test_attribute_only_models_ignore_the_layout_probe(tiny_gen_cfg, tiny_disc_cfg, tiny_samples):
    a_cfg, _ = make_variant(VariantKind.A_ONLY, tiny_gen_cfg, tiny_disc_cfg)
    gen = Generator(a_cfg)
    attrs = tiny_samples[0].attributes
    img_a = generate_image(gen, tiny_samples[0].layout, attrs, seed=3)
    img_b = generate_image(gen, tiny_samples[1].layout, attrs, seed=3)
    img_c = generate_image(gen, None, attrs, seed=3)
    assert np.array_equal(img_a, img_b)
    assert np.array_equal(img_a, img_c)


def test_toy_color_error_is_zero_for_a_perfect_painter(tiny_samples, tiny_spec, monkeypatch):
    from dataclasses import replace

    from scenegan.data.toy import render_toy

    clean = replace(tiny_spec, noise_sigma=0.0)
    probes = [(s.layout, s.attributes) for s in tiny_samples[:3]]

    def perfect(gen, layout, attrs, seed):
        return render_toy(layout, attrs, clean)

    monkeypatch.setattr(ablation, "generate_image", perfect)
    assert toy_color_error(object(), tiny_spec, probes) == pytest.approx(0.0)
