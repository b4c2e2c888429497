"""Command-line workflows: data synthesis, training, generation, analysis, serving.

Exit codes follow the usual convention: 0 on success, 2 for bad flags (click's
usage errors), 1 for operation failures with the cause on stderr.
"""

import functools
import json
import logging
from dataclasses import replace
from pathlib import Path

import click
import numpy as np
from PIL import Image

from .data.labels import NUM_ATTRIBUTES, attribute_names
from .data.layout import load_layout_png, save_layout_png
from .data.manifest import load_manifest, materialize_samples, propagate_webcam_layout, write_manifest
from .data.preprocess import preprocess_image, preprocess_layout, to_uint8
from .data.toy import ToySceneSpec, default_toy_spec, generate_toy_dataset
from .eval.ablation import ALL_VARIANTS, ablation_compare
from .eval.edits import apply_edit_script, load_edit_script
from .eval.grids import GridReport, export_grid
from .eval.nearest import nearest_training_image
from .eval.sweeps import SweepRequest, attribute_sweep
from .model.config import DiscriminatorConfig, GeneratorConfig, VariantKind, variant_of
from .model.inference import generate_image, generator_from_checkpoint
from .train.checkpoint import checkpoint_hash, load_checkpoint
from .train.loop import TrainingConfig, fit

DEFAULT_RESOLUTION = 32
DEFAULT_MULTIPLIER = 0.25
DEFAULT_NOISE_DIM = 16


def _operation(fn):
    """Map operational failures to exit code 1 with the cause."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, RuntimeError, OSError, KeyError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.option("--verbose", is_flag=True, help="Log progress at INFO level.")
def main(verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_attributes(path, n_slots: int) -> np.ndarray:
    """Attribute vector from JSON: a full list, or a {name: value} mapping."""
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, list):
        arr = np.asarray(obj, dtype=np.float32)
        if arr.shape != (n_slots,):
            raise click.ClickException(f"{path}: expected {n_slots} attribute values, got {arr.shape}")
    elif isinstance(obj, dict):
        names = attribute_names()
        arr = np.zeros(n_slots, dtype=np.float32)
        for name, value in obj.items():
            if name not in names or names.index(name) >= n_slots:
                raise click.ClickException(f"{path}: unknown attribute {name!r}")
            arr[names.index(name)] = value
    else:
        raise click.ClickException(f"{path}: attributes must be a JSON list or object")
    if np.any(arr < 0) or np.any(arr > 1):
        k = int(np.flatnonzero((arr < 0) | (arr > 1))[0])
        raise click.ClickException(f"{path}: attributes[{k}] = {arr[k]} outside [0, 1]")
    return arr


def _inference_inputs(gen, layout_path, attrs_path):
    """(layout, attributes) required by the generator's variant, loaded from files."""
    variant = variant_of(gen.cfg)
    layout = None
    attrs = None
    if variant in (VariantKind.AL, VariantKind.L_ONLY):
        if layout_path is None:
            raise click.ClickException(f"{variant.value} model needs --layout")
        layout = preprocess_layout(load_layout_png(layout_path), gen.cfg.resolution)
    if variant in (VariantKind.AL, VariantKind.A_ONLY):
        if attrs_path is None:
            raise click.ClickException(f"{variant.value} model needs --attrs")
        attrs = _load_attributes(attrs_path, gen.cfg.attribute_channels)
    return layout, attrs


def _save_image(image: np.ndarray, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def _model_configs(resolution, multiplier, noise_dim):
    gen_cfg = GeneratorConfig.scaled(resolution, multiplier, noise_dim=noise_dim)
    disc_cfg = DiscriminatorConfig.scaled(resolution, multiplier)
    return gen_cfg, disc_cfg


def _training_config(config_path, **overrides) -> tuple:
    """(TrainingConfig, model dict) from an optional JSON file plus CLI overrides."""
    training = {}
    model = {}
    if config_path is not None:
        obj = json.loads(Path(config_path).read_text())
        training = dict(obj.get("training", {}))
        model = dict(obj.get("model", {}))
    for key, value in overrides.items():
        if value is not None:
            training[key] = value
    return TrainingConfig(**training), model


@main.command("make-toy-data")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--count", default=2000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--resolution", default=DEFAULT_RESOLUTION, show_default=True)
@click.option("--noise-sigma", default=None, type=float, help="Override the spec's pixel noise.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), default=None,
              help="Scene spec JSON; defaults to the built-in 4-class spec.")
@_operation
def make_toy_data(out_dir, count, seed, resolution, noise_sigma, spec_path):
    """Render a procedural dataset with known layout/attribute -> color rules."""
    spec = ToySceneSpec.load(spec_path) if spec_path else default_toy_spec()
    spec = replace(spec, resolution=resolution)
    if noise_sigma is not None:
        spec = replace(spec, noise_sigma=noise_sigma)
    samples = generate_toy_dataset(spec, count, seed)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "layouts").mkdir(parents=True, exist_ok=True)
    records = []
    for i, sample in enumerate(samples):
        image_rel = f"images/{i:05d}.png"
        layout_rel = f"layouts/{i:05d}.png"
        _save_image(sample.image, out_dir / image_rel)
        save_layout_png(sample.layout, out_dir / layout_rel)
        records.append({
            "image": image_rel,
            "layout": layout_rel,
            "attributes": [float(v) for v in sample.attributes],
            "group_id": sample.group_id,
        })
    write_manifest(records, out_dir / "manifest.jsonl")
    spec.save(out_dir / "spec.json")
    click.echo(f"wrote {len(records)} samples under {out_dir} (manifest.jsonl, spec.json)")


@main.command()
@click.option("--data", "data_path", type=click.Path(path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help='JSON with "training" and "model" sections; flags override it.')
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--variant", type=click.Choice([v.value for v in VariantKind]), default=None)
@click.option("--lr", "learning_rate", type=float, default=None)
@click.option("--checkpoint-every", type=int, default=None)
@click.option("--resolution", type=int, default=None)
@click.option("--channel-multiplier", type=float, default=None)
@click.option("--noise-dim", type=int, default=None)
@_operation
def train(data_path, out_dir, config_path, epochs, batch_size, seed, variant, learning_rate,
          checkpoint_every, resolution, channel_multiplier, noise_dim):
    """Adversarial training; writes checkpoints and a metrics CSV to --out."""
    cfg, model = _training_config(
        config_path, epochs=epochs, batch_size=batch_size, seed=seed, variant=variant,
        learning_rate=learning_rate, checkpoint_every=checkpoint_every,
    )
    res = resolution or model.get("resolution", DEFAULT_RESOLUTION)
    mult = channel_multiplier or model.get("channel_multiplier", DEFAULT_MULTIPLIER)
    ndim = noise_dim or model.get("noise_dim", DEFAULT_NOISE_DIM)
    manifest = propagate_webcam_layout(load_manifest(data_path, res))
    samples = materialize_samples(manifest)
    gen_cfg, disc_cfg = _model_configs(res, mult, ndim)
    ckpt, metrics = fit(samples, gen_cfg, disc_cfg, cfg, out_dir)
    last = metrics.epochs[-1] if metrics.epochs else {}
    click.echo(
        f"trained {cfg.variant.value} for {ckpt.epoch} epochs on {len(samples)} samples; "
        f"final d_loss={last.get('d_loss', float('nan')):.4f} g_loss={last.get('g_loss', float('nan')):.4f}"
    )
    click.echo(f"checkpoint: {Path(out_dir) / 'final.ckpt'}")


@main.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(path_type=Path), required=True)
@click.option("--layout", "layout_path", type=click.Path(path_type=Path), default=None)
@click.option("--attrs", "attrs_path", type=click.Path(path_type=Path), default=None)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_operation
def generate(ckpt_path, layout_path, attrs_path, seed, out_path):
    """One image from a checkpoint; deterministic in (checkpoint, inputs, seed)."""
    gen = generator_from_checkpoint(load_checkpoint(ckpt_path))
    layout, attrs = _inference_inputs(gen, layout_path, attrs_path)
    _save_image(generate_image(gen, layout, attrs, seed), out_path)
    click.echo(f"wrote {out_path}")


def _resolve_attribute_index(spec: str, n_slots: int) -> int:
    if spec.isdigit():
        return int(spec)
    names = attribute_names()
    if spec in names and names.index(spec) < n_slots:
        return names.index(spec)
    raise click.ClickException(f"unknown attribute {spec!r}; give a name or an index")


@main.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(path_type=Path), required=True)
@click.option("--layout", "layout_path", type=click.Path(path_type=Path), default=None)
@click.option("--attrs", "attrs_path", type=click.Path(path_type=Path), default=None)
@click.option("--attribute", required=True, help="Attribute name or index to sweep.")
@click.option("--strengths", default="0,0.25,0.5,0.75,1", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_operation
def sweep(ckpt_path, layout_path, attrs_path, attribute, strengths, seed, out_path):
    """Strength sweep of one attribute; writes a montage PNG plus its recipe sidecar."""
    gen = generator_from_checkpoint(load_checkpoint(ckpt_path))
    layout, attrs = _inference_inputs(gen, layout_path, attrs_path)
    if attrs is None:
        raise click.ClickException("layout-only model has no attributes to sweep")
    index = _resolve_attribute_index(attribute, gen.cfg.attribute_channels)
    req = SweepRequest(
        layout=layout,
        base_attributes=attrs,
        attribute_index=index,
        strengths=tuple(float(s) for s in strengths.split(",")),
        seed=seed,
    )
    report = attribute_sweep(gen, req, checkpoint_hash=checkpoint_hash(ckpt_path))
    export_grid(report, out_path)
    click.echo(f"wrote {out_path} and {out_path}.json")


@main.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(path_type=Path), default=None,
              help="Optional; with it, each edited layout is also rendered.")
@click.option("--layout", "layout_path", type=click.Path(path_type=Path), required=True)
@click.option("--script", "script_path", type=click.Path(path_type=Path), required=True)
@click.option("--attrs", "attrs_path", type=click.Path(path_type=Path), default=None)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@_operation
def edit(ckpt_path, layout_path, script_path, attrs_path, seed, out_dir):
    """Apply an edit script step by step; writes each layout (and image, with --ckpt)."""
    script = load_edit_script(script_path)
    base = load_layout_png(layout_path)
    gen = None
    attrs = None
    if ckpt_path is not None:
        gen = generator_from_checkpoint(load_checkpoint(ckpt_path))
        base = preprocess_layout(base, gen.cfg.resolution)
        _, attrs = _inference_inputs(gen, layout_path, attrs_path)
    layouts = apply_edit_script(base, script)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = []
    for i, step in enumerate(layouts):
        save_layout_png(step, out_dir / f"layout_{i:02d}.png")
        if gen is not None:
            image = generate_image(gen, step, attrs, seed)
            _save_image(image, out_dir / f"image_{i:02d}.png")
            images.append(image)
    if images:
        report = GridReport(
            cells=[images],
            row_labels=["edits"],
            col_labels=[f"step {i}" for i in range(len(images))],
            provenance={"driver": "edit_sequence", "seed": seed,
                        "checkpoint_hash": checkpoint_hash(ckpt_path)},
        )
        export_grid(report, out_dir / "sequence.png")
    click.echo(f"wrote {len(layouts)} steps under {out_dir}")


@main.command()
@click.option("--query", "query_path", type=click.Path(path_type=Path), required=True)
@click.option("--data", "data_path", type=click.Path(path_type=Path), required=True)
@click.option("--ckpt", "ckpt_path", type=click.Path(path_type=Path), default=None,
              help="Optional; sets the comparison resolution from the checkpoint.")
@click.option("--resolution", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the match as JSON here as well.")
@_operation
def nearest(query_path, data_path, ckpt_path, resolution, out_path):
    """Closest training image to a query under exhaustive L1 in pixel space."""
    if ckpt_path is not None:
        res = load_checkpoint(ckpt_path).gen_config["resolution"]
    else:
        res = resolution or DEFAULT_RESOLUTION
    manifest = propagate_webcam_layout(load_manifest(data_path, res))
    samples = materialize_samples(manifest)
    raw = np.asarray(Image.open(query_path).convert("RGB"))
    query = preprocess_image(raw, res)
    match, distance = nearest_training_image(query, samples)
    click.echo(f"nearest: {match.source_path} (distance {distance:.4f})")
    if out_path is not None:
        Path(out_path).write_text(json.dumps(
            {"match": match.source_path, "group_id": match.group_id, "distance": distance}, indent=2))


@main.command()
@click.option("--data", "data_path", type=click.Path(path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--variants", default="AL,A_ONLY,L_ONLY", show_default=True)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--resolution", type=int, default=None)
@click.option("--channel-multiplier", type=float, default=None)
@click.option("--noise-dim", type=int, default=None)
@click.option("--toy-spec", "toy_spec_path", type=click.Path(path_type=Path), default=None,
              help="Scene spec JSON; enables the numeric color-error report.")
@_operation
def ablate(data_path, out_dir, variants, epochs, batch_size, seed, config_path, resolution,
           channel_multiplier, noise_dim, toy_spec_path):
    """Train conditioning variants under one budget and compare on shared probes."""
    cfg, model = _training_config(config_path, epochs=epochs, batch_size=batch_size, seed=seed)
    res = resolution or model.get("resolution", DEFAULT_RESOLUTION)
    mult = channel_multiplier or model.get("channel_multiplier", DEFAULT_MULTIPLIER)
    ndim = noise_dim or model.get("noise_dim", DEFAULT_NOISE_DIM)
    kinds = [VariantKind(v.strip()) for v in variants.split(",")] if variants else list(ALL_VARIANTS)
    manifest = propagate_webcam_layout(load_manifest(data_path, res))
    samples = materialize_samples(manifest)
    gen_cfg, disc_cfg = _model_configs(res, mult, ndim)
    toy_spec = ToySceneSpec.load(toy_spec_path) if toy_spec_path else None
    report = ablation_compare(samples, gen_cfg, disc_cfg, cfg, variants=kinds,
                              toy_spec=toy_spec, out_dir=out_dir)
    export_grid(report.grid, Path(out_dir) / "ablation.png")
    for kind in kinds:
        key = kind.value
        if key in report.diverged:
            click.echo(f"{key}: diverged ({report.diverged[key]})")
        elif key in report.color_errors:
            click.echo(f"{key}: color error {report.color_errors[key]:.4f}")
        else:
            click.echo(f"{key}: trained")
    click.echo(f"wrote {Path(out_dir) / 'ablation.png'} and {Path(out_dir) / 'ablation.csv'}")


@main.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help="Defaults to $SCENEGAN_PORT, then 8411.")
@click.option("--workers", default=2, show_default=True,
              help="Concurrent generation cap; extra requests queue.")
@_operation
def serve(ckpt_path, host, port, workers):
    """Run the HTTP inference service on one checkpoint."""
    from .service import run_service

    run_service(ckpt_path, host=host, port=port, max_workers=workers)


if __name__ == "__main__":
    main()
