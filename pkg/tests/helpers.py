"""Independent oracles and seeded generators shared by the test modules.

Everything here deliberately avoids the library's own solver paths: sparse
fits are found by exhaustive support enumeration, the lasso oracle is
coordinate descent, AUC is recomputed from rank statistics, and activation
counts are recounted with plain loops.
"""

import itertools

import numpy as np
from scipy import ndimage
from scipy.stats import rankdata


def best_k_sparse(D, y, k):
    """Exhaustive search over all k-atom supports, least squares on each.

    Returns ``(error, support, coefficients)`` for the best fit; ties keep
    the lexicographically first support.
    """
    best_err, best_support, best_coef = np.inf, None, None
    for support in itertools.combinations(range(D.shape[1]), k):
        sub = D[:, support]
        coef = np.linalg.lstsq(sub, y, rcond=None)[0]
        err = float(np.linalg.norm(y - sub @ coef))
        if err < best_err - 1e-12:
            best_err, best_support, best_coef = err, support, coef
    return best_err, best_support, best_coef


def cd_lasso(D, y, alpha, tol=1e-10, max_iter=100000):
    """Coordinate descent for ``||y - Dx||^2 + alpha * ||x||_1``."""
    K = D.shape[1]
    x = np.zeros(K)
    r = np.asarray(y, dtype=float).copy()
    colsq = (D * D).sum(axis=0)
    for _ in range(max_iter):
        delta = 0.0
        for i in range(K):
            if colsq[i] == 0.0:
                continue
            old = x[i]
            r += D[:, i] * old
            rho = float(D[:, i] @ r)
            new = np.sign(rho) * max(abs(rho) - alpha / 2.0, 0.0) / colsq[i]
            x[i] = new
            r -= D[:, i] * new
            delta = max(delta, abs(new - old))
        if delta < tol:
            break
    return x


def lasso_objective(D, y, x, alpha):
    r = y - D @ x
    return float(r @ r) + alpha * float(np.abs(x).sum())


def mutual_coherence(D):
    G = np.abs(D.T @ D)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def low_coherence_dictionary(rng, n, K, target, max_rounds=2000):
    """Gaussian start, then alternating Gram clipping until coherence < target.

    Plain rejection of Gaussian draws essentially never hits small
    coherence targets at these shapes, so the Gram's off-diagonals are
    repeatedly clipped and the matrix refactored at rank n.
    """
    D = rng.standard_normal((n, K))
    D /= np.linalg.norm(D, axis=0)
    clip = 0.95 * target
    for _ in range(max_rounds):
        if mutual_coherence(D) < target:
            return D
        G = D.T @ D
        Gc = np.clip(G, -clip, clip)
        np.fill_diagonal(Gc, 1.0)
        w, V = np.linalg.eigh(Gc)
        w = np.clip(w[-n:], 0.0, None)
        D = (V[:, -n:] * np.sqrt(w)).T
        norms = np.linalg.norm(D, axis=0)
        norms[norms == 0.0] = 1.0
        D = D / norms
    raise AssertionError("coherence reduction did not converge")


def recount_activations(X, tol=1e-12):
    """Dense per-row recount of nonzeros and absolute mass, loop form."""
    K, N = X.shape
    m = np.zeros(K, dtype=np.int64)
    mass = np.zeros(K)
    for i in range(K):
        for j in range(N):
            v = abs(X[i, j])
            if v > tol:
                m[i] += 1
                mass[i] += v
    return m, mass


def rank_auc(scores, labels):
    """Mann-Whitney AUC with tie-averaged ranks (scipy rankdata)."""
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    ranks = rankdata(scores)
    pos = int(labels.sum())
    neg = labels.size - pos
    return (float(ranks[labels].sum()) - pos * (pos + 1) / 2.0) / (pos * neg)


def sweep_auc(scores, labels):
    """Literal threshold sweep over every distinct value, O(V * P) loop."""
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    pos = int(labels.sum())
    neg = labels.size - pos
    points = [(0.0, 0.0)]
    for t in np.unique(scores)[::-1]:
        predicted = scores >= t
        tpr = float((predicted & labels).sum()) / pos
        fpr = float((predicted & ~labels).sum()) / neg
        points.append((fpr, tpr))
    area = 0.0
    for (f0, t0), (f1, t1) in zip(points, points[1:]):
        area += (f1 - f0) * (t0 + t1) / 2.0
    return area


def random_image(rng, shape):
    return rng.uniform(0.0, 1.0, shape)


def natural_test_image(seed=7, size=256):
    """Procedural stand-in for a natural photo.

    Smooth shading, a few hard-edged shapes, one oriented texture band,
    and light grain; deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / float(size)
    img = 0.35 + 0.25 * xx + 0.1 * np.sin(2 * np.pi * yy * 1.3)
    img += ndimage.gaussian_filter(rng.standard_normal((size, size)), 18.0) * 2.0
    img[int(0.16 * size) : int(0.43 * size), int(0.12 * size) : int(0.35 * size)] += 0.25
    disk = (yy - 0.65) ** 2 + (xx - 0.7) ** 2 <= 0.18**2
    img[disk] -= 0.3
    tri = (xx + yy > 1.55) & (xx - yy < 0.1)
    img[tri] += 0.2
    band = (slice(int(0.59 * size), int(0.86 * size)), slice(int(0.16 * size), int(0.51 * size)))
    img[band] += 0.08 * np.sin(2 * np.pi * (xx[band] * 14 + yy[band] * 5))
    img += rng.normal(0.0, 0.01, (size, size))
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo) * 0.96 + 0.02
