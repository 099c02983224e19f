"""Seeded synthetic scenes and the anomaly-detection benchmark.

All generators take an integer seed and are deterministic, so benchmark
numbers are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .coder import CoderConfig
from .errors import ContractViolationError
from .imageio import to_patches
from .ksvd import LearnConfig, learn
from .pipeline import (
    PipelineConfig,
    evaluate_saliency,
    patch_scores,
    rarity_weights,
    saliency_from_codes,
)
from .rarity import activation_stats


def tiled_texture_image(seed: int, size: int = 128, block: int = 8, lo: float = 0.15, hi: float = 0.85):
    """One texture tiled everywhere except a single anomalous block.

    Returns ``(image, mask, (block_row, block_col))`` where the mask marks
    the anomalous block's pixels.
    """
    if size % block != 0 or size // block < 2:
        raise ContractViolationError("size must be a multiple of block with >= 2 blocks")
    rng = np.random.default_rng(seed)
    texture = rng.uniform(lo, hi, (block, block))
    anomaly = rng.uniform(lo, hi, (block, block))
    per_side = size // block
    img = np.tile(texture, (per_side, per_side))
    brow = int(rng.integers(0, per_side))
    bcol = int(rng.integers(0, per_side))
    rows = slice(brow * block, (brow + 1) * block)
    cols = slice(bcol * block, (bcol + 1) * block)
    img[rows, cols] = anomaly
    mask = np.zeros_like(img)
    mask[rows, cols] = 1.0
    return img, mask, (brow, bcol)


def two_texture_image(seed: int, size: int = 128, block: int = 8, rare_band: int = 4,
                      lo: float = 0.1, hi: float = 0.45):
    """A common texture with a rare texture band on the right edge.

    ``rare_band`` counts block columns. Returns ``(image, rare_mask)``.
    The default intensity range leaves headroom for boosting transforms
    before the [0, 1] clamp bites.
    """
    per_side = size // block
    if size % block != 0 or not 1 <= rare_band < per_side:
        raise ContractViolationError("rare_band must leave room for both textures")
    rng = np.random.default_rng(seed)
    common = rng.uniform(lo, hi, (block, block))
    rare = rng.uniform(lo, hi, (block, block))
    img = np.tile(common, (per_side, per_side))
    split = (per_side - rare_band) * block
    img[:, split:] = np.tile(rare, (per_side, rare_band))
    mask = np.zeros_like(img)
    mask[:, split:] = 1.0
    return img, mask


def disk_image(shape=(128, 128), center=None, radius: float = 8.0,
               fg: float = 0.9, bg: float = 0.1):
    """A bright disk on a dark background; returns ``(image, disk_mask)``."""
    height, width = shape
    if center is None:
        center = (height / 2.0, width / 2.0)
    rows, cols = np.mgrid[0:height, 0:width]
    inside = (rows - center[0]) ** 2 + (cols - center[1]) ** 2 <= radius**2
    img = np.full(shape, float(bg))
    img[inside] = float(fg)
    return img, inside.astype(np.float64)


def benchmark_config(seed: int = 0) -> PipelineConfig:
    """Reduced pipeline used by the anomaly benchmark.

    The scenes contain exactly two distinct patch signals, so a small
    dictionary and short loop resolve them; the full-size defaults would
    only add runtime.
    """
    return PipelineConfig(
        learn=LearnConfig(K=64, iters=3, coder=CoderConfig(mode="omp", T=4), seed=seed),
        saliency_blur_sigma=2.0,
    )


def anomaly_benchmark(seed: int = 0, trials: int = 100, cfg: PipelineConfig | None = None,
                      size: int = 128, block: int = 8) -> dict:
    """Run seeded anomalous-block scenes through the saliency pipeline.

    For each trial: generate the scene, learn codes, and record whether the
    top-scoring patch is the anomalous block, plus the pixel-map AUC against
    the block mask. Returns ``trials``, ``anomaly_hit_rate`` and
    ``mean_auc``.
    """
    if trials < 1:
        raise ContractViolationError("trials must be >= 1")
    base = cfg if cfg is not None else benchmark_config()
    hits = 0
    auc_sum = 0.0
    for t in range(trials):
        img, mask, (brow, bcol) = tiled_texture_image(seed + t, size=size, block=block)
        trial_cfg = replace(base, learn=replace(base.learn, seed=seed + t))
        patches, grid = to_patches(img, block)
        _, codes, _ = learn(patches, trial_cfg.learn)
        stats = activation_stats(codes)
        scores = patch_scores(codes, rarity_weights(stats.m, stats.N))
        top = int(np.argmax(scores))
        if (top // grid.cols, top % grid.cols) == (brow, bcol):
            hits += 1
        smap = saliency_from_codes(codes, grid, trial_cfg.saliency_blur_sigma)
        auc_sum += evaluate_saliency(smap, mask).auc
    return {
        "trials": trials,
        "anomaly_hit_rate": hits / trials,
        "mean_auc": auc_sum / trials,
    }
