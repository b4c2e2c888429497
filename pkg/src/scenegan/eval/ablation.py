"""Conditioning ablation: train each variant under one budget and compare.

All variants share the dataset, the training schedule, and the probe inputs,
so differences in the side-by-side grid and the numeric report come only from
which conditioning signals each model receives. A diverging variant is
reported and the comparison continues with the rest.
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..data.toy import ToySceneSpec, render_toy, segment_color_error
from ..model.config import DiscriminatorConfig, GeneratorConfig, VariantKind
from ..model.generator import Generator
from ..model.inference import generate_image, generator_from_checkpoint
from ..train.loop import TrainingConfig, TrainingDiverged, fit
from .grids import GridReport

log = logging.getLogger(__name__)

ALL_VARIANTS = (VariantKind.AL, VariantKind.A_ONLY, VariantKind.L_ONLY)


class AblationError(RuntimeError):
    pass


@dataclass
class AblationReport:
    grid: GridReport | None
    color_errors: dict = field(default_factory=dict)  # variant value -> mean color error
    diverged: dict = field(default_factory=dict)  # variant value -> failure message
    checkpoints: dict = field(default_factory=dict)  # variant value -> Checkpoint

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["variant", "color_error", "status"])
            for kind in ALL_VARIANTS:
                key = kind.value
                if key in self.diverged:
                    writer.writerow([key, "", f"diverged: {self.diverged[key]}"])
                elif key in self.checkpoints:
                    err = self.color_errors.get(key)
                    writer.writerow([key, "" if err is None else f"{err:.6f}", "ok"])


def toy_color_error(gen: Generator, spec: ToySceneSpec, probes, seeds=None) -> float:
    """Mean per-segment color error of generations against noiseless oracle renders.

    probes: list of (layout, attributes); seeds default to the probe index.
    """
    clean = replace(spec, noise_sigma=0.0)
    errs = []
    for i, (layout, attrs) in enumerate(probes):
        seed = seeds[i] if seeds is not None else i
        img = generate_image(gen, layout, attrs, seed)
        ref = render_toy(layout, attrs, clean)
        errs.append(segment_color_error(img, layout, ref))
    return float(np.mean(errs))


def ablation_compare(
    samples,
    gen_cfg: GeneratorConfig,
    disc_cfg: DiscriminatorConfig,
    cfg: TrainingConfig,
    variants=ALL_VARIANTS,
    toy_spec: ToySceneSpec | None = None,
    probes=None,
    probe_seeds=(0, 1, 2, 3),
    out_dir=None,
) -> AblationReport:
    """Train every variant identically, then probe them on shared inputs.

    probes: list of (layout, attributes) pairs fed to every variant (defaults
    to the first 4 training samples). With a toy_spec, each variant also gets
    a mean color error over the probes.
    """
    variants = [VariantKind(v) for v in variants]
    out_dir = Path(out_dir) if out_dir is not None else None
    if probes is None:
        take = samples[: len(probe_seeds)]
        if not take:
            raise AblationError("no probes available: dataset is empty")
        probes = [(s.layout, s.attributes) for s in take]

    report = AblationReport(grid=None)
    generators = {}
    for kind in variants:
        vcfg = replace(cfg, variant=kind)
        vdir = out_dir / kind.value if out_dir else None
        try:
            ckpt, _ = fit(samples, gen_cfg, disc_cfg, vcfg, vdir)
        except TrainingDiverged as exc:
            log.warning("variant %s diverged: %s", kind.value, exc)
            report.diverged[kind.value] = str(exc)
            continue
        report.checkpoints[kind.value] = ckpt
        generators[kind.value] = generator_from_checkpoint(ckpt)

    if not generators:
        raise AblationError("every variant diverged; nothing to compare")

    cells = []
    row_labels = []
    for kind in variants:
        gen = generators.get(kind.value)
        if gen is None:
            continue
        row = [
            generate_image(gen, layout, attrs, probe_seeds[j % len(probe_seeds)])
            for j, (layout, attrs) in enumerate(probes)
        ]
        cells.append(row)
        row_labels.append(kind.value)
        if toy_spec is not None:
            report.color_errors[kind.value] = toy_color_error(gen, toy_spec, probes)
    report.grid = GridReport(
        cells=cells,
        row_labels=row_labels,
        col_labels=[f"probe {j}" for j in range(len(probes))],
        provenance={
            "driver": "ablation_compare",
            "variants": [k.value for k in variants],
            "probe_seeds": list(probe_seeds),
            "diverged": dict(report.diverged),
        },
    )
    if out_dir:
        report.write_csv(out_dir / "ablation.csv")
    return report
