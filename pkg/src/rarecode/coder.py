"""Sparse coding of patch columns against a fixed dictionary.

Two coders are provided. Orthogonal matching pursuit greedily picks the
atom best correlated with the current residual and re-fits all selected
coefficients by least squares, giving codes with a hard atom budget.
The iterative shrinkage solver minimizes the l1-penalized objective
``||y - Dx||^2 + alpha * ||x||_1`` by proximal gradient steps and is
monotone in that objective.

Codes are returned as dense vectors (or a dense K x N matrix from
:func:`encode_all`); they are column-sparse by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

# Unit-norm tolerance for dictionary columns: norms in (1 - tol, 1 + tol].
NORM_TOL = 1e-9

# Correlations at or below this are treated as exact orthogonality.
_CORR_FLOOR = 1e-12

# Relative headroom on the gradient Lipschitz constant, covering the
# eigensolver's backward error so the proximal step stays on the provably
# monotone side.
_STEP_SAFETY = 1e-9

CODER_MODES = ("omp", "ista")


@dataclass(frozen=True)
class CoderConfig:
    """Solver selection plus per-solver knobs.

    ``T`` and ``residual_tol`` drive the pursuit coder; ``alpha``,
    ``max_iter`` and ``obj_tol`` drive the shrinkage coder.
    """

    mode: str = "omp"
    T: int = 8
    residual_tol: float = 1e-6
    alpha: float = 0.1
    max_iter: int = 200
    obj_tol: float = 1e-6

    def __post_init__(self):
        if self.mode not in CODER_MODES:
            raise ContractViolationError(f"unknown coder mode {self.mode!r}")
        if self.T < 1:
            raise ContractViolationError("T must be >= 1")
        if self.residual_tol <= 0.0:
            raise ContractViolationError("residual_tol must be positive")
        if self.alpha < 0.0:
            raise ContractViolationError("alpha must be nonnegative")
        if self.max_iter < 1:
            raise ContractViolationError("max_iter must be >= 1")
        if self.obj_tol <= 0.0:
            raise ContractViolationError("obj_tol must be positive")


def validate_dictionary(D) -> np.ndarray:
    """Check the unit-column contract and return the dictionary as float64."""
    arr = np.asarray(D, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError("dictionary must be a nonempty 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError("dictionary contains non-finite entries")
    norms = np.linalg.norm(arr, axis=0)
    if np.any(norms <= 1.0 - NORM_TOL) or np.any(norms > 1.0 + NORM_TOL):
        bad = int(np.argmax((norms <= 1.0 - NORM_TOL) | (norms > 1.0 + NORM_TOL)))
        raise ContractViolationError(
            f"dictionary column {bad} has norm {norms[bad]!r}, want 1 within {NORM_TOL}"
        )
    return arr


def _omp_column(D: np.ndarray, y: np.ndarray, T: int, residual_tol: float) -> np.ndarray:
    x = np.zeros(D.shape[1])
    residual = y.astype(np.float64, copy=True)
    support: list[int] = []
    coef = None
    for _ in range(T):
        if float(np.linalg.norm(residual)) <= residual_tol:
            break
        corr = D.T @ residual
        pick = int(np.argmax(np.abs(corr)))  # ties resolve to the lowest index
        if abs(corr[pick]) <= _CORR_FLOOR or pick in support:
            break  # residual is (numerically) orthogonal to every atom
        support.append(pick)
        subdict = D[:, support]
        # lstsq falls back to the pseudoinverse on rank-deficient supports
        coef = np.linalg.lstsq(subdict, y, rcond=None)[0]
        residual = y - subdict @ coef
    if support:
        x[support] = coef
    return x


def omp(D, y, T: int = 8, residual_tol: float = 1e-6) -> np.ndarray:
    """Greedy pursuit of one signal: at most ``T`` atoms, least-squares fit.

    Selection repeatedly maximizes |correlation| with the residual; after
    each selection all supported coefficients are re-fit, which leaves the
    residual orthogonal to the selected atoms. Stops once the support holds
    ``T`` atoms or the residual norm drops to ``residual_tol``. A zero
    signal yields an empty support.

    Parameters
    ----------
    D : array, shape (n, K)
        Dictionary with unit-norm columns.
    y : array, shape (n,)
        Signal to code.
    T : int
        Atom budget, ``1 <= T <= min(n, K)``.
    residual_tol : float
        Euclidean residual threshold for early exit.

    Returns
    -------
    array, shape (K,)
        Dense coefficient vector with at most ``T`` nonzeros.
    """
    arr = validate_dictionary(D)
    vec = np.asarray(y, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != arr.shape[0]:
        raise ContractViolationError("signal length must match the dictionary rows")
    if not 1 <= T <= min(arr.shape):
        raise ContractViolationError("T must satisfy 1 <= T <= min(n, K)")
    if residual_tol <= 0.0:
        raise ContractViolationError("residual_tol must be positive")
    return _omp_column(arr, vec, T, residual_tol)


def gram_top_eigenvalue(D) -> float:
    """Largest eigenvalue of ``D.T @ D``.

    Computed by a full symmetric eigensolve: the Gram matrices here are
    small, and an iterative estimate can undershoot by whole percentage
    points on clustered spectra, which would push the shrinkage step past
    the monotone regime.
    """
    arr = np.asarray(D, dtype=np.float64)
    gram = arr.T @ arr
    top = float(np.linalg.eigvalsh(gram)[-1])
    return max(top, 0.0)


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    """Elementwise shrink toward zero by ``t``."""
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _ista_column(
    D: np.ndarray,
    y: np.ndarray,
    alpha: float,
    max_iter: int,
    obj_tol: float,
    lipschitz_eig: float,
) -> np.ndarray:
    if lipschitz_eig <= 1e-30:
        return np.zeros(D.shape[1])
    step = 1.0 / (2.0 * lipschitz_eig * (1.0 + _STEP_SAFETY))
    x = np.zeros(D.shape[1])
    objective = float(y @ y)
    for _ in range(max_iter):
        gradient = 2.0 * (D.T @ (D @ x - y))
        x = soft_threshold(x - step * gradient, step * alpha)
        residual = y - D @ x
        refreshed = float(residual @ residual) + alpha * float(np.abs(x).sum())
        if abs(objective - refreshed) <= obj_tol * max(abs(objective), 1e-30):
            break
        objective = refreshed
    return x


def ista(D, y, cfg: CoderConfig | None = None) -> np.ndarray:
    """Proximal-gradient solve of ``||y - Dx||^2 + alpha * ||x||_1``.

    The step is ``1 / (2 L)`` with ``L`` the top eigenvalue of the Gram
    matrix from :func:`gram_top_eigenvalue`, which makes the objective
    non-increasing across iterations. Stops on ``cfg.max_iter`` or when the
    relative objective change falls below ``cfg.obj_tol``. With
    ``alpha == 0`` this is plain gradient descent on the least-squares fit.
    """
    if cfg is None:
        cfg = CoderConfig()
    arr = validate_dictionary(D)
    vec = np.asarray(y, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != arr.shape[0]:
        raise ContractViolationError("signal length must match the dictionary rows")
    eig = gram_top_eigenvalue(arr)
    return _ista_column(arr, vec, cfg.alpha, cfg.max_iter, cfg.obj_tol, eig)


def encode_all(D, Y, cfg: CoderConfig | None = None) -> np.ndarray:
    """Code every column of ``Y`` independently; returns a K x N matrix.

    Columns are processed sequentially, and the result is bit-identical
    across repeated runs; column order in ``Y`` maps one-to-one onto column
    order in the output.
    """
    if cfg is None:
        cfg = CoderConfig()
    arr = validate_dictionary(D)
    signals = np.asarray(Y, dtype=np.float64)
    if signals.ndim != 2:
        raise ContractViolationError("patch matrix must be 2-D")
    if signals.shape[0] != arr.shape[0]:
        raise ContractViolationError(
            f"patch dimension {signals.shape[0]} does not match dictionary rows {arr.shape[0]}"
        )
    if cfg.mode == "omp" and not 1 <= cfg.T <= min(arr.shape):
        raise ContractViolationError("T must satisfy 1 <= T <= min(n, K)")

    codes = np.zeros((arr.shape[1], signals.shape[1]))
    if cfg.mode == "omp":
        for j in range(signals.shape[1]):
            codes[:, j] = _omp_column(arr, signals[:, j], cfg.T, cfg.residual_tol)
    else:
        eig = gram_top_eigenvalue(arr)
        for j in range(signals.shape[1]):
            codes[:, j] = _ista_column(
                arr, signals[:, j], cfg.alpha, cfg.max_iter, cfg.obj_tol, eig
            )
    return codes
