"""Exact nearest-neighbor lookup in raw pixel space.

Distance is the sum of absolute differences over [-1, 1]-normalized pixels;
the scan is exhaustive by definition, with ties broken by dataset order.
"""

import numpy as np


class NearestError(ValueError):
    pass


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a.astype(np.float64) - b.astype(np.float64)).sum())


def nearest_training_image(query: np.ndarray, samples) -> tuple:
    """(closest SceneSample, distance) under exhaustive L1 scan; first wins ties."""
    if len(samples) == 0:
        raise NearestError("dataset is empty")
    query = np.asarray(query, dtype=np.float32)
    if query.ndim != 3 or query.shape[2] != 3:
        raise NearestError(f"query must be H x W x 3, got shape {query.shape}")
    best = None
    best_dist = np.inf
    for sample in samples:
        if sample.image.shape != query.shape:
            raise NearestError(
                f"resolution mismatch: query is {query.shape}, "
                f"dataset image {sample.source_path} is {sample.image.shape}"
            )
        dist = l1_distance(query, sample.image)
        if dist < best_dist:
            best, best_dist = sample, dist
    return best, best_dist
