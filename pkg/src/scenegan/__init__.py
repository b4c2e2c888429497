"""Attribute- and layout-conditioned adversarial synthesis of outdoor scenes.

Subpackages: data (labels, layouts, preprocessing, manifests, procedural
oracle), model (configs, conditioning, generator, discriminator, inference),
train (losses, loop, checkpoints), eval (sweeps, edits, grids, nearest
neighbor, ablation), plus the HTTP service and the command-line interface.
"""

__version__ = "0.1.0"
