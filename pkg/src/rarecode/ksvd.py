"""Dictionary learning by alternating sparse coding and rank-1 atom updates.

:func:`learn` alternates :func:`rarecode.coder.encode_all` with
:func:`ksvd_update`, which sweeps the atoms in ascending index and replaces
each one (and its supported coefficients) with the leading rank-1
factorization of the residual restricted to the columns that use it. The
sweep is Gauss-Seidel: later atoms see earlier updates, which is what makes
the reconstruction error non-increasing within a sweep. Atoms that end an
iteration unused are re-seeded from the worst-reconstructed signals.

Dictionaries serialize to a small binary format (magic ``RDCT``) that
round-trips bit-exactly; see :func:`dictionary_to_bytes`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .coder import CoderConfig, encode_all
from .errors import ContractViolationError, DictionaryFormatError
from .imageio import psnr

RDCT_MAGIC = b"RDCT"
RDCT_VERSION = 1

INIT_MODES = ("sample_patches", "random_gaussian")

_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class LearnConfig:
    """Knobs for the alternating loop."""

    K: int = 256
    iters: int = 20
    coder: CoderConfig = field(default_factory=CoderConfig)
    seed: int = 0
    unused_policy: str = "replace_with_worst_signal"
    init: str = "sample_patches"

    def __post_init__(self):
        if self.K < 1:
            raise ContractViolationError("K must be >= 1")
        if self.iters < 1:
            raise ContractViolationError("iters must be >= 1")
        if self.unused_policy != "replace_with_worst_signal":
            raise ContractViolationError(f"unknown unused_policy {self.unused_policy!r}")
        if self.init not in INIT_MODES:
            raise ContractViolationError(f"unknown init mode {self.init!r}")


@dataclass(frozen=True)
class LearnReport:
    """Observability record for one :func:`learn` run.

    ``objective_per_iter`` holds ``||Y - DX||_F^2`` (plus the weighted l1
    term in ista mode) after each iteration's dictionary update. The
    pre/post sweep errors expose the per-sweep monotonicity of the update
    stage; all lists have one entry per iteration.
    """

    objective_per_iter: list[float]
    atoms_replaced_per_iter: list[int]
    final_psnr: float
    presweep_error_per_iter: list[float]
    postsweep_error_per_iter: list[float]


def init_dictionary(Y, K: int, seed: int = 0, init: str = "sample_patches") -> np.ndarray:
    """Seeded initial dictionary with unit-norm columns.

    ``sample_patches`` draws K columns of ``Y`` (distinct unless N < K);
    any zero-norm draw is replaced by a seeded Gaussian vector.
    ``random_gaussian`` draws Gaussian columns directly. Deterministic for
    a given seed.
    """
    signals = np.asarray(Y, dtype=np.float64)
    if signals.ndim != 2 or signals.shape[0] < 1 or signals.shape[1] < 1:
        raise ContractViolationError("patch matrix must be 2-D and nonempty")
    if K < 1:
        raise ContractViolationError("K must be >= 1")
    if init not in INIT_MODES:
        raise ContractViolationError(f"unknown init mode {init!r}")
    rng = np.random.default_rng(seed)
    n, N = signals.shape
    if init == "sample_patches":
        picks = rng.choice(N, size=K, replace=N < K)
        D = signals[:, picks].copy()
    else:
        D = rng.standard_normal((n, K))
    norms = np.linalg.norm(D, axis=0)
    for k in np.flatnonzero(norms <= _ZERO_NORM):
        while True:
            draw = rng.standard_normal(n)
            draw_norm = float(np.linalg.norm(draw))
            if draw_norm > _ZERO_NORM:
                break
        D[:, k] = draw / draw_norm
        norms[k] = 1.0
    return D / norms


def _leading_rank1(E: np.ndarray, warm_start: np.ndarray, iters: int, tol: float):
    """Leading singular pair of E via power iteration on ``E @ E.T``.

    Warm-starting from the current atom makes the Rayleigh quotient (and
    with it the captured energy) non-decreasing relative to the incoming
    atom, which is what the sweep's monotonicity rests on. Returns
    ``(None, None)`` when E carries no energy.
    """
    u = warm_start
    w = E @ (E.T @ u)
    wnorm = float(np.linalg.norm(w))
    if wnorm <= 1e-30:
        # warm start orthogonal to the residual column space
        energies = np.einsum("ij,ij->j", E, E)
        j = int(np.argmax(energies))
        if energies[j] <= 1e-30:
            return None, None
        u = E[:, j] / np.sqrt(energies[j])
        w = E @ (E.T @ u)
        wnorm = float(np.linalg.norm(w))
        if wnorm <= 1e-30:
            return None, None
    rayleigh = float(u @ w)
    for _ in range(iters):
        u = w / wnorm
        w = E @ (E.T @ u)
        refreshed = float(u @ w)
        if abs(refreshed - rayleigh) <= tol * max(refreshed, 1e-30):
            break
        rayleigh = refreshed
        wnorm = float(np.linalg.norm(w))
        if wnorm <= 1e-30:
            break
    coeffs = E.T @ u
    lead = np.flatnonzero(np.abs(u) > 1e-12)
    if lead.size and u[lead[0]] < 0.0:
        u = -u
        coeffs = -coeffs
    return u, coeffs


def ksvd_update(D, X, Y, power_iters: int = 100, power_tol: float = 1e-10):
    """One sweep of rank-1 atom updates; returns new ``(D, X)``.

    Atoms are visited in ascending index. For atom ``k`` with support
    ``{j : X[k, j] != 0}`` the residual restricted to those columns (with
    atom k's own contribution added back) is factored; the atom becomes the
    leading left singular vector (sign fixed so its first nonzero entry is
    positive) and the supported coefficients become sigma times the right
    singular vector. Supports never grow and the Frobenius error never
    increases across the sweep. Empty-support atoms are skipped.
    """
    dictionary = np.array(D, dtype=np.float64, copy=True)
    codes = np.array(X, dtype=np.float64, copy=True)
    signals = np.asarray(Y, dtype=np.float64)
    if (
        dictionary.ndim != 2
        or codes.ndim != 2
        or signals.ndim != 2
        or signals.shape[0] != dictionary.shape[0]
        or codes.shape != (dictionary.shape[1], signals.shape[1])
    ):
        raise ContractViolationError("inconsistent shapes for the dictionary update")

    residual = signals - dictionary @ codes
    for k in range(dictionary.shape[1]):
        support = np.flatnonzero(codes[k] != 0.0)
        if support.size == 0:
            continue
        E = residual[:, support] + np.outer(dictionary[:, k], codes[k, support])
        atom, coeffs = _leading_rank1(E, dictionary[:, k], power_iters, power_tol)
        if atom is None:
            codes[k, support] = 0.0
            residual[:, support] = E
            continue
        dictionary[:, k] = atom
        codes[k, support] = coeffs
        residual[:, support] = E - np.outer(atom, coeffs)
    return dictionary, codes


def replace_unused_atoms(D, X, Y, residual=None):
    """Re-seed atoms with no nonzero coefficients from poorly coded signals.

    The worst-reconstructed columns of ``Y`` (ties to the lowest column
    index) are assigned, normalized, to the unused atoms in ascending atom
    order, one distinct column per atom. Columns that are already
    reconstructed exactly, or have no energy, trigger no replacement.
    Returns ``(D, count)``.
    """
    dictionary = np.array(D, dtype=np.float64, copy=True)
    codes = np.asarray(X, dtype=np.float64)
    signals = np.asarray(Y, dtype=np.float64)
    unused = np.flatnonzero(~np.any(codes != 0.0, axis=1))
    if unused.size == 0:
        return dictionary, 0
    if residual is None:
        residual = signals - dictionary @ codes
    column_errors = np.linalg.norm(residual, axis=0)
    ranking = np.argsort(-column_errors, kind="stable")
    replaced = 0
    for rank, k in enumerate(unused):
        j = int(ranking[rank % ranking.size])
        column = signals[:, j]
        norm = float(np.linalg.norm(column))
        if column_errors[j] <= _ZERO_NORM or norm <= _ZERO_NORM:
            continue
        dictionary[:, k] = column / norm
        replaced += 1
    return dictionary, replaced


def _frobenius_error(Y, D, X) -> float:
    return float(np.linalg.norm(Y - D @ X))


def learn(Y, cfg: LearnConfig | None = None):
    """Alternate coding and dictionary updates; returns ``(D, X, report)``.

    Each iteration codes every signal against the current dictionary, runs
    one :func:`ksvd_update` sweep, then re-seeds unused atoms per the
    configured policy. Fully deterministic for a given ``(Y, cfg)``.
    """
    if cfg is None:
        cfg = LearnConfig()
    signals = np.asarray(Y, dtype=np.float64)
    if signals.ndim != 2 or signals.shape[0] < 1 or signals.shape[1] < 1:
        raise ContractViolationError("patch matrix must be 2-D and nonempty")

    dictionary = init_dictionary(signals, cfg.K, seed=cfg.seed, init=cfg.init)
    codes = np.zeros((cfg.K, signals.shape[1]))
    objectives: list[float] = []
    replacements: list[int] = []
    pre_errors: list[float] = []
    post_errors: list[float] = []
    for _ in range(cfg.iters):
        codes = encode_all(dictionary, signals, cfg.coder)
        pre_errors.append(_frobenius_error(signals, dictionary, codes))
        dictionary, codes = ksvd_update(dictionary, codes, signals)
        residual = signals - dictionary @ codes
        post = float(np.linalg.norm(residual))
        post_errors.append(post)
        dictionary, count = replace_unused_atoms(dictionary, codes, signals, residual=residual)
        replacements.append(count)
        objective = post * post
        if cfg.coder.mode == "ista":
            objective += cfg.coder.alpha * float(np.abs(codes).sum())
        objectives.append(objective)

    report = LearnReport(
        objective_per_iter=objectives,
        atoms_replaced_per_iter=replacements,
        final_psnr=psnr(signals, dictionary @ codes),
        presweep_error_per_iter=pre_errors,
        postsweep_error_per_iter=post_errors,
    )
    return dictionary, codes, report


def dictionary_to_bytes(D) -> bytes:
    """Serialize a dictionary: magic, version, n, K (u32 LE), then column-major f64 LE."""
    arr = np.asarray(D, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError("dictionary must be a nonempty 2-D matrix")
    header = RDCT_MAGIC + struct.pack("<III", RDCT_VERSION, arr.shape[0], arr.shape[1])
    return header + arr.astype("<f8", copy=False).tobytes(order="F")


def dictionary_from_bytes(data: bytes) -> np.ndarray:
    """Inverse of :func:`dictionary_to_bytes`; bit-exact round trip."""
    data = bytes(data)
    if len(data) < 16:
        raise DictionaryFormatError("dictionary stream shorter than its header")
    if data[:4] != RDCT_MAGIC:
        raise DictionaryFormatError(f"bad magic {data[:4]!r}, want {RDCT_MAGIC!r}")
    version, n, K = struct.unpack_from("<III", data, 4)
    if version != RDCT_VERSION:
        raise DictionaryFormatError(f"unsupported version {version}")
    if n < 1 or K < 1:
        raise DictionaryFormatError(f"bad dimensions {n} x {K}")
    expected = 16 + 8 * n * K
    if len(data) < expected:
        raise DictionaryFormatError(
            f"dictionary payload truncated: want {expected} bytes, have {len(data)}"
        )
    if len(data) > expected:
        raise DictionaryFormatError("trailing bytes after the dictionary payload")
    values = np.frombuffer(data, dtype="<f8", count=n * K, offset=16)
    return values.reshape((n, K), order="F").copy()


def save_dictionary(D, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dictionary_to_bytes(D))


def load_dictionary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return dictionary_from_bytes(fh.read())
