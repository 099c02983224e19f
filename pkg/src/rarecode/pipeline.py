"""End-to-end enhancement, rarity saliency maps, and a baseline detector.

:func:`enhance` runs the whole chain: tile the image into blocks, learn a
dictionary and sparse codes, score atom rarity, map the scores through a
transform, reweight the dictionary columns, and reassemble the image from
the reweighted reconstruction.

:func:`saliency_map` turns the same code statistics into a per-pixel map:
each patch is scored by its rarity-weighted coefficient mass, scores are
broadcast over the patch pixels, blurred, and min-max normalized.

:func:`itti_lite` is an intensity + orientation center-surround pyramid
detector used as a comparison baseline, and :func:`evaluate_saliency`
scores any map against a binary ground-truth mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import ContractViolationError
from .imageio import PatchGrid, from_patches, to_patches, validate_image
from .ksvd import LearnConfig, LearnReport, learn
from .rarity import (
    RarityMeasure,
    TransformSpec,
    activation_stats,
    rarity,
    reweight_dictionary,
    transform,
)

_DEGENERATE_RANGE = 1e-12


@dataclass(frozen=True)
class PipelineConfig:
    """Aggregate configuration for the block pipeline."""

    learn: LearnConfig = field(default_factory=LearnConfig)
    measure: RarityMeasure = field(default_factory=RarityMeasure)
    transform: TransformSpec = field(default_factory=TransformSpec)
    dc_remove: bool = False
    saliency_blur_sigma: float = 2.0
    block: int = 8

    def __post_init__(self):
        if self.block < 1:
            raise ContractViolationError("block size must be >= 1")
        if self.saliency_blur_sigma < 0.0:
            raise ContractViolationError("blur sigma must be nonnegative")


@dataclass(frozen=True)
class EnhanceResult:
    """Everything :func:`enhance` produces.

    ``rarity`` holds the transformed weights actually applied to the
    dictionary; ``rarity_raw`` the scores before the transform.
    """

    image: np.ndarray
    dictionary: np.ndarray
    codes: np.ndarray
    rarity: np.ndarray
    rarity_raw: np.ndarray
    weighted_dictionary: np.ndarray
    grid: PatchGrid
    report: LearnReport


def enhance(img, cfg: PipelineConfig | None = None) -> EnhanceResult:
    """Reweight image content by atom rarity.

    Runs tiling, dictionary learning, rarity scoring, the configured
    transform, column reweighting, and reassembly from the reweighted
    reconstruction. With ``dc_remove`` the per-patch means are subtracted
    before learning and added back before reassembly. Output dimensions
    equal the input's. With weights identically one the output equals the
    plain reconstruction bit-for-bit.
    """
    if cfg is None:
        cfg = PipelineConfig()
    arr = validate_image(img)
    patches, grid = to_patches(arr, cfg.block)
    if cfg.dc_remove:
        means = patches.mean(axis=0)
        patches = patches - means[np.newaxis, :]
    dictionary, codes, report = learn(patches, cfg.learn)
    stats = activation_stats(codes)
    raw_scores = rarity(stats, cfg.measure)
    weights = transform(raw_scores, cfg.transform)
    weighted = reweight_dictionary(dictionary, weights)
    recon = weighted @ codes
    if cfg.dc_remove:
        recon = recon + means[np.newaxis, :]
    return EnhanceResult(
        image=from_patches(recon, grid),
        dictionary=dictionary,
        codes=codes,
        rarity=weights,
        rarity_raw=raw_scores,
        weighted_dictionary=weighted,
        grid=grid,
        report=report,
    )


def rarity_weights(m, N: int) -> np.ndarray:
    """Laplace-smoothed surprise weights ``-log((m + 1) / (N + 1))``.

    Atoms used by few signals get large weights; weights stay finite for
    unused atoms.
    """
    counts = np.asarray(m, dtype=np.float64)
    return -np.log((counts + 1.0) / (float(N) + 1.0))


def patch_scores(X, weights) -> np.ndarray:
    """Per-patch score ``sum_i weights[i] * |X[i, j]|``.

    Each column's terms are summed in ascending value order, so the result
    is bitwise invariant under any relabeling of the atoms.
    """
    codes = np.asarray(X, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if codes.ndim != 2 or w.ndim != 1 or w.shape[0] != codes.shape[0]:
        raise ContractViolationError("weights must match the code matrix rows")
    terms = np.abs(codes) * w[:, np.newaxis]
    terms.sort(axis=0)
    return terms.sum(axis=0)


def saliency_from_codes(X, grid: PatchGrid, blur_sigma: float = 2.0) -> np.ndarray:
    """Build a pixel map from sparse codes: score, broadcast, blur, normalize.

    Patch scores use :func:`rarity_weights` over the codes' own activation
    counts. Constant scores (e.g. from a constant image) yield an all-zero
    map; otherwise the blurred map is min-max normalized to [0, 1].
    """
    codes = np.asarray(X, dtype=np.float64)
    if codes.ndim != 2 or codes.shape[1] != grid.patch_count:
        raise ContractViolationError("code matrix does not match the patch grid")
    stats = activation_stats(codes)
    scores = patch_scores(codes, rarity_weights(stats.m, stats.N))
    if float(scores.max() - scores.min()) <= _DEGENERATE_RANGE:
        return np.zeros((grid.orig_height, grid.orig_width))
    block_map = scores.reshape(grid.rows, grid.cols)
    pixel_map = np.repeat(np.repeat(block_map, grid.block, axis=0), grid.block, axis=1)
    pixel_map = pixel_map[: grid.orig_height, : grid.orig_width]
    if blur_sigma > 0.0:
        pixel_map = ndimage.gaussian_filter(pixel_map, blur_sigma, mode="nearest")
    return _minmax_or_zeros(pixel_map)


def saliency_map(img, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Rarity saliency of an image; same dimensions, values in [0, 1]."""
    if cfg is None:
        cfg = PipelineConfig()
    arr = validate_image(img)
    patches, grid = to_patches(arr, cfg.block)
    if cfg.dc_remove:
        patches = patches - patches.mean(axis=0)[np.newaxis, :]
    _, codes, _ = learn(patches, cfg.learn)
    return saliency_from_codes(codes, grid, cfg.saliency_blur_sigma)


# ---------------------------------------------------------------------------
# Center-surround baseline


_CS_PAIRS = ((1, 3), (1, 4), (2, 4), (2, 5))
_ORIENTATIONS_DEG = (0.0, 45.0, 90.0, 135.0)
_PYRAMID_LEVELS = 6
_MIN_SIDE = 64


def _downsample(img: np.ndarray) -> np.ndarray:
    return ndimage.gaussian_filter(img, 1.0, mode="nearest")[::2, ::2]


def _resize_bilinear(img: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    height, width = img.shape
    out_h, out_w = shape
    rows = np.linspace(0.0, height - 1.0, out_h) if out_h > 1 else np.zeros(1)
    cols = np.linspace(0.0, width - 1.0, out_w) if out_w > 1 else np.zeros(1)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(img, [rr, cc], order=1, mode="nearest")


def _center_surround(levels: list[np.ndarray], c: int, s: int) -> np.ndarray:
    return np.abs(levels[c] - _resize_bilinear(levels[s], levels[c].shape))


def _directional_energy(img: np.ndarray, theta_deg: float) -> np.ndarray:
    gy, gx = np.gradient(img)
    t = np.deg2rad(theta_deg)
    return np.abs(np.cos(t) * gx + np.sin(t) * gy)


def _peak_promotion(m: np.ndarray) -> np.ndarray:
    """Weight a feature map by (global max - mean of other local maxima)^2.

    Maps with one dominant peak keep their strength; maps with many
    comparable peaks are suppressed. Degenerate (flat) maps become zero.
    """
    lo, hi = float(m.min()), float(m.max())
    if hi - lo <= _DEGENERATE_RANGE:
        return np.zeros_like(m)
    u = (m - lo) / (hi - lo)
    size = max(3, min(u.shape) // 8)
    peaks = (ndimage.maximum_filter(u, size=size, mode="nearest") == u) & (u >= 0.1)
    others = u[peaks & (u < 1.0 - 1e-12)]
    mean_other = float(others.mean()) if others.size else 0.0
    return u * (1.0 - mean_other) ** 2


def _combine_maps(maps: list[np.ndarray], shape: tuple[int, int]) -> np.ndarray:
    acc = np.zeros(shape)
    for m in maps:
        acc += _resize_bilinear(_peak_promotion(m), shape)
    return acc / len(maps)


def _minmax_or_zeros(m: np.ndarray) -> np.ndarray:
    lo, hi = float(m.min()), float(m.max())
    if hi - lo <= _DEGENERATE_RANGE:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo)


def itti_lite(img) -> np.ndarray:
    """Intensity + orientation center-surround saliency baseline.

    Builds a 6-level Gaussian pyramid, takes |center - surround| between
    levels (1,3), (1,4), (2,4), (2,5) for the intensity channel and for
    four directional gradient-energy channels, promotes maps with isolated
    peaks, averages the two channels at input resolution, and min-max
    normalizes. A uniform image maps to all zeros, and adding a global
    offset (within range) leaves the map essentially unchanged.
    """
    arr = validate_image(img)
    if arr.shape[0] < _MIN_SIDE or arr.shape[1] < _MIN_SIDE:
        raise ContractViolationError(
            f"need at least {_MIN_SIDE}x{_MIN_SIDE} pixels for the pyramid"
        )
    pyramid = [arr]
    for _ in range(_PYRAMID_LEVELS - 1):
        pyramid.append(_downsample(pyramid[-1]))

    intensity = [_center_surround(pyramid, c, s) for c, s in _CS_PAIRS]
    orientation = []
    for theta in _ORIENTATIONS_DEG:
        grad_pyramid = [_directional_energy(level, theta) for level in pyramid]
        orientation.extend(_center_surround(grad_pyramid, c, s) for c, s in _CS_PAIRS)

    intensity_channel = _combine_maps(intensity, arr.shape)
    orientation_channel = _combine_maps(orientation, arr.shape)
    return _minmax_or_zeros((intensity_channel + orientation_channel) / 2.0)


# ---------------------------------------------------------------------------
# Evaluation


class SaliencyEval(NamedTuple):
    hit: bool
    auc: float


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve by sweeping every distinct score threshold.

    Ties share a threshold (one ROC vertex per distinct value) and the
    area is the trapezoidal sum, matching the rank-statistic definition.
    Returns nan when either class is empty.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel().astype(bool)
    if s.shape != y.shape:
        raise ContractViolationError("scores and labels must have equal lengths")
    positives = int(y.sum())
    negatives = y.size - positives
    if positives == 0 or negatives == 0:
        return float("nan")
    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    sorted_labels = y[order]
    true_pos = np.cumsum(sorted_labels)
    false_pos = np.cumsum(~sorted_labels)
    # keep one ROC vertex per distinct threshold value
    boundary = np.r_[np.flatnonzero(np.diff(sorted_scores) != 0.0), s.size - 1]
    tpr = np.r_[0.0, true_pos[boundary] / positives]
    fpr = np.r_[0.0, false_pos[boundary] / negatives]
    return float(np.trapezoid(tpr, fpr))


def evaluate_saliency(saliency, truth) -> SaliencyEval:
    """Score a saliency map against a binary mask.

    ``hit`` is whether the map's argmax pixel (first in row-major order on
    ties) falls inside the mask; ``auc`` treats the map as a per-pixel
    score for the mask labels.
    """
    smap = np.asarray(saliency, dtype=np.float64)
    mask = np.asarray(truth, dtype=np.float64)
    if smap.ndim != 2 or smap.shape != mask.shape:
        raise ContractViolationError("saliency map and mask must have equal 2-D shapes")
    labels = mask > 0.5
    hit = bool(labels.flat[int(np.argmax(smap))])
    return SaliencyEval(hit=hit, auc=roc_auc(smap, labels))
