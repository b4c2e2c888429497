import numpy as np
import pytest
import torch

from scenegan.model.config import (
    BOTTLENECK,
    ConfigError,
    DiscriminatorConfig,
    GeneratorConfig,
    VariantKind,
    discriminator_shape_plan,
    generator_shape_plan,
    make_variant,
    variant_of,
)
from scenegan.model.discriminator import SiameseDiscriminator
from scenegan.model.generator import Generator, NonFiniteError

TABLE_GEN = [
    ("conv1", 159, 159, 128, 128, 1),
    ("conv2", 159, 128, 128, 64, 2),
    ("conv3", 128, 256, 64, 32, 2),
    ("conv4", 256, 512, 32, 16, 2),
    ("conv5", 512, 1024, 16, 8, 2),
    ("deconv1", 1024, 512, 8, 16, 2),
    ("deconv2", 512, 256, 16, 32, 2),
    ("deconv3", 256, 128, 32, 64, 2),
    ("deconv4", 128, 3, 64, 128, 2),
]


def test_default_generator_plan_matches_reference_table():
    assert generator_shape_plan(GeneratorConfig()) == TABLE_GEN


def test_default_discriminator_plan_reaches_bottleneck_and_fuses_at_2048():
    plan = discriminator_shape_plan(DiscriminatorConfig())
    assert plan["cond"][0] == ("cond_conv1", 59, 59, 128, 128, 1)
    assert plan["cond"][-1] == ("cond_conv5", 512, 1024, 16, 8, 2)
    assert plan["image"][0] == ("image_conv1", 3, 3, 128, 128, 1)
    assert plan["image"][-1] == ("image_conv5", 512, 1024, 16, 8, 2)
    assert plan["fusion"] == ("fusion", 2048, 2048, 8, 8, 1)
    assert plan["head_in"] == 2048 * BOTTLENECK * BOTTLENECK


def test_channel_arithmetic_for_all_variants():
    gen, disc = GeneratorConfig(), DiscriminatorConfig()
    assert gen.in_channels == 19 + 40 + 100 == 159
    assert disc.cond_channels == 19 + 40 == 59
    a_gen, a_disc = make_variant(VariantKind.A_ONLY, gen, disc)
    assert a_gen.in_channels == 159 - 19 == 140
    assert a_disc.cond_channels == 40
    l_gen, l_disc = make_variant(VariantKind.L_ONLY, gen, disc)
    assert l_gen.in_channels == 159 - 40 == 119
    assert l_disc.cond_channels == 19
    assert variant_of(a_gen) is VariantKind.A_ONLY
    assert variant_of(l_disc) is VariantKind.L_ONLY
    assert variant_of(gen) is VariantKind.AL


def _tiny_pair(res=16, mult=0.125, noise=8):
    return GeneratorConfig.scaled(res, mult, noise_dim=noise), DiscriminatorConfig.scaled(res, mult)


def test_generator_forward_shapes_follow_the_plan():
    cfg, _ = _tiny_pair()
    gen = Generator(cfg)
    seen = []

    def hook(module, inputs, output):
        seen.append(tuple(output.shape[1:]))

    handles = [block.register_forward_hook(hook) for block in gen.blocks]
    out = gen(torch.randn(2, cfg.in_channels, 16, 16))
    for h in handles:
        h.remove()
    plan = generator_shape_plan(cfg)
    assert len(seen) == len(plan)
    for (name, _in, out_c, _s, out_s, _stride), shape in zip(plan, seen):
        assert shape == (out_c, out_s, out_s), name
    assert out.shape == (2, 3, 16, 16)


def test_generator_output_in_tanh_range():
    cfg, _ = _tiny_pair()
    gen = Generator(cfg)
    with torch.no_grad():
        out = gen(torch.randn(4, cfg.in_channels, 16, 16) * 3)
    assert float(out.min()) >= -1.0 and float(out.max()) <= 1.0


def test_discriminator_output_in_sigmoid_range():
    gcfg, dcfg = _tiny_pair()
    disc = SiameseDiscriminator(dcfg)
    x = torch.tanh(torch.randn(4, 3, 16, 16))
    cond = torch.randn(4, dcfg.cond_channels, 16, 16)
    with torch.no_grad():
        p = disc(x, cond)
    assert p.shape == (4,)
    assert float(p.min()) > 0.0 and float(p.max()) < 1.0


def test_discriminator_branches_meet_at_the_bottleneck():
    _, dcfg = _tiny_pair()
    disc = SiameseDiscriminator(dcfg)
    x = torch.tanh(torch.randn(2, 3, 16, 16))
    cond = torch.randn(2, dcfg.cond_channels, 16, 16)
    xf, cf = disc.branch_features(x, cond)
    assert xf.shape == (2, dcfg.branch_out, BOTTLENECK, BOTTLENECK)
    assert cf.shape == (2, dcfg.branch_out, BOTTLENECK, BOTTLENECK)


def test_image_branch_stem_has_no_batchnorm_but_cond_stem_does():
    _, dcfg = _tiny_pair()
    disc = SiameseDiscriminator(dcfg)
    image_stem_kinds = [type(m) for m in disc.image_branch[0]]
    cond_stem_kinds = [type(m) for m in disc.cond_branch[0]]
    assert torch.nn.BatchNorm2d not in image_stem_kinds
    assert torch.nn.BatchNorm2d in cond_stem_kinds


def test_generator_hidden_layers_carry_batchnorm_output_does_not():
    cfg, _ = _tiny_pair()
    gen = Generator(cfg)
    kinds_per_block = [[type(m) for m in block] for block in gen.blocks]
    for kinds in kinds_per_block[:-1]:
        assert torch.nn.BatchNorm2d in kinds
    assert torch.nn.BatchNorm2d not in kinds_per_block[-1]
    assert torch.nn.Tanh in kinds_per_block[-1]


def test_nonfinite_activation_names_the_layer():
    cfg, _ = _tiny_pair()
    gen = Generator(cfg)
    with torch.no_grad():
        gen.blocks[1][0].weight.fill_(float("nan"))
    with pytest.raises(NonFiniteError, match="conv2"):
        gen(torch.randn(1, cfg.in_channels, 16, 16))


def test_micro_8x8_configs_run_without_stride_stages():
    gcfg = GeneratorConfig(resolution=8, noise_dim=8, down_channels=(), up_channels=(3,), stem_channels=12)
    dcfg = DiscriminatorConfig(resolution=8, branch_channels=(), cond_stem_channels=10,
                               image_stem_channels=6, fusion_channels=16)
    out = Generator(gcfg)(torch.randn(2, gcfg.in_channels, 8, 8))
    assert out.shape == (2, 3, 8, 8)
    p = SiameseDiscriminator(dcfg)(torch.tanh(torch.randn(2, 3, 8, 8)), torch.randn(2, 59, 8, 8))
    assert p.shape == (2,)
    assert dcfg.fusion_in == 16


def test_resolution_must_be_power_of_two_times_bottleneck():
    with pytest.raises(ConfigError):
        GeneratorConfig(resolution=48)
    with pytest.raises(ConfigError):
        GeneratorConfig(resolution=4)


def test_config_rejects_wrong_output_channels():
    with pytest.raises(ConfigError):
        GeneratorConfig(resolution=16, down_channels=(32,), up_channels=(5,))


def test_variant_and_scaled_configs_compose():
    gcfg, dcfg = _tiny_pair()
    for kind in VariantKind:
        g, d = make_variant(kind, gcfg, dcfg)
        gen = Generator(g)
        out = gen(torch.randn(2, g.in_channels, 16, 16))
        assert out.shape == (2, 3, 16, 16)
        disc = SiameseDiscriminator(d)
        p = disc(out.detach(), torch.randn(2, d.cond_channels, 16, 16))
        assert p.shape == (2,)


def test_deterministic_forward_under_fixed_weights():
    cfg, _ = _tiny_pair()
    torch.manual_seed(0)
    gen = Generator(cfg)
    gen.eval()
    x = torch.randn(1, cfg.in_channels, 16, 16)
    with torch.no_grad():
        a = gen(x)
        b = gen(x)
    assert torch.equal(a, b)
