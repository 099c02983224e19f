"""Atom usage statistics, rarity scores, and dictionary reweighting.

Rarity of a dictionary atom is read off the sparse code matrix: how many
signals use the atom (and with how much absolute coefficient mass). A
rarity vector is mapped through an elementwise transform into per-atom
weights, and the weighted dictionary ``D * diag(weights)`` reconstructs
signals with rare or common content amplified or suppressed.

Note on polarity: the count and mass measures grow with usage frequency,
so a transform that boosts rare content must be decreasing (negative-slope
sigmoid, negative-scale affine); the negative-log measure is already
decreasing in usage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ContractViolationError

# Coefficients at or below this magnitude count as zero.
ZERO_COEFF_TOL = 1e-12

RARITY_KINDS = ("count_fraction", "coeff_mass", "neg_log_count", "squared_count")
TRANSFORM_KINDS = ("identity", "sigmoid", "gamma", "affine")


@dataclass(frozen=True)
class ActivationStats:
    """Per-atom usage over the N coded signals.

    ``m[i]`` counts nonzero coefficients in row i; ``mass[i]`` sums their
    absolute values. ``mass[i] == 0`` exactly when ``m[i] == 0``.
    """

    m: np.ndarray
    mass: np.ndarray
    N: int


@dataclass(frozen=True)
class RarityMeasure:
    """Which statistic to score atoms by, and its scale constant.

    ``S`` defaults to the signal count N, making ``count_fraction`` a
    frequency in [0, 1]. ``epsilon`` smooths the log variant so unused
    atoms stay finite.
    """

    kind: str = "count_fraction"
    S: float | None = None
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.kind not in RARITY_KINDS:
            raise ContractViolationError(f"unknown rarity measure {self.kind!r}")
        if self.S is not None and not self.S > 0.0:
            raise ContractViolationError("scale constant S must be positive")
        if not self.epsilon > 0.0:
            raise ContractViolationError("epsilon must be positive")


@dataclass(frozen=True)
class TransformSpec:
    """Elementwise map from rarity scores to atom weights.

    sigmoid: ``1 / (1 + exp(-a (r - b)))``; gamma: ``r ** g``; affine:
    ``max(scale * r + offset, 0)``; identity passes scores through.
    """

    kind: str = "identity"
    a: float = 10.0
    b: float = 0.5
    g: float = 0.5
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ContractViolationError(f"unknown transform {self.kind!r}")
        if not self.g > 0.0:
            raise ContractViolationError("gamma exponent must be positive")
        for name in ("a", "b", "g", "scale", "offset"):
            if not np.isfinite(getattr(self, name)):
                raise ContractViolationError(f"transform parameter {name} must be finite")


def activation_stats(X) -> ActivationStats:
    """Exact per-atom counts and absolute coefficient sums.

    Coefficients with magnitude at or below ``ZERO_COEFF_TOL`` count as
    zero for both statistics. Sums run in ascending column order, so the
    result is bit-stable and equivariant under row permutations.
    """
    codes = np.asarray(X, dtype=np.float64)
    if codes.ndim != 2:
        raise ContractViolationError("sparse code matrix must be 2-D")
    magnitudes = np.abs(codes)
    active = magnitudes > ZERO_COEFF_TOL
    return ActivationStats(
        m=active.sum(axis=1).astype(np.int64),
        mass=np.where(active, magnitudes, 0.0).sum(axis=1),
        N=codes.shape[1],
    )


def rarity(stats: ActivationStats, measure: RarityMeasure | None = None) -> np.ndarray:
    """Score every atom from its activation statistics.

    count_fraction: ``m / S``; coeff_mass: ``mass / S``; neg_log_count:
    ``-log((m + eps * S) / S)`` clamped at zero; squared_count:
    ``(m / S) ** 2``. All outputs are finite and nonnegative.
    """
    if measure is None:
        measure = RarityMeasure()
    scale = float(measure.S) if measure.S is not None else float(stats.N)
    if not scale > 0.0:
        raise ContractViolationError("scale constant S must be positive")
    counts = stats.m.astype(np.float64)
    if measure.kind == "count_fraction":
        return counts / scale
    if measure.kind == "coeff_mass":
        return np.asarray(stats.mass, dtype=np.float64) / scale
    if measure.kind == "neg_log_count":
        return np.maximum(-np.log((counts + measure.epsilon * scale) / scale), 0.0)
    return (counts / scale) ** 2  # squared_count


def transform(R, spec: TransformSpec | None = None) -> np.ndarray:
    """Apply a :class:`TransformSpec` elementwise to a rarity vector."""
    if spec is None:
        spec = TransformSpec()
    scores = np.asarray(R, dtype=np.float64)
    if spec.kind == "identity":
        return scores.copy()
    if spec.kind == "sigmoid":
        return expit(spec.a * (scores - spec.b))
    if spec.kind == "gamma":
        return np.power(scores, spec.g)
    return np.maximum(spec.scale * scores + spec.offset, 0.0)  # affine


def reweight_dictionary(D, weights) -> np.ndarray:
    """Scale column i of the dictionary by ``weights[i]``.

    The result is intentionally not renormalized; its column norms equal
    the weights.
    """
    arr = np.asarray(D, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolationError("dictionary must be 2-D")
    if w.ndim != 1 or w.shape[0] != arr.shape[1]:
        raise ContractViolationError(
            f"weight vector length {w.shape} does not match atom count {arr.shape[1]}"
        )
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise ContractViolationError("atom weights must be finite and nonnegative")
    return arr * w[np.newaxis, :]
