"""Acceptance gate: one test per shipping criterion, at pinned tolerances.

Each test prints a ``ACCEPTANCE Cnn PASS`` line when it completes (visible
with ``pytest -v -s`` or in captured output); a failing criterion simply
fails its test.
"""

import time

import numpy as np
import pytest

from helpers import (
    cd_lasso,
    lasso_objective,
    low_coherence_dictionary,
    mutual_coherence,
    natural_test_image,
)
from rarecode.cli import main as cli_main
from rarecode.coder import CoderConfig, ista, omp
from rarecode.imageio import from_patches, psnr, read_pgm, to_patches, write_pgm
from rarecode.ksvd import (
    LearnConfig,
    dictionary_from_bytes,
    dictionary_to_bytes,
    learn,
)
from rarecode.pipeline import (
    PipelineConfig,
    enhance,
    itti_lite,
    saliency_from_codes,
)
from rarecode.rarity import (
    RarityMeasure,
    TransformSpec,
    activation_stats,
    rarity,
    reweight_dictionary,
    transform,
)
from rarecode.synthetic import anomaly_benchmark, disk_image


def report(criterion, text):
    print(f"ACCEPTANCE {criterion} PASS - {text}")


@pytest.fixture(scope="module")
def natural_learn_run():
    """K=256, T=8, 20 iterations over the 64x1024 patch matrix of a 256x256 image."""
    img = natural_test_image(seed=7, size=256)
    patches, grid = to_patches(img, 8)
    assert patches.shape == (64, 1024)
    cfg = LearnConfig(K=256, iters=20, coder=CoderConfig(mode="omp", T=8), seed=0)
    dictionary, codes, rep = learn(patches, cfg)
    return img, patches, grid, dictionary, codes, rep


def test_c01_default_constants(capsys):
    assert cli_main(["enhance", "--print-config"]) == 0
    config = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert config["block"] == "8"
    assert config["K"] == "256"
    with capsys.disabled():
        report("C01", "defaults use 8x8 blocks and K=256 (via --print-config)")


def test_c02_omp_exact_recovery(capsys):
    start = time.perf_counter()
    recovered = 0
    trials = 1000
    for trial in range(trials):
        rng = np.random.default_rng(20_000 + trial)
        D = low_coherence_dictionary(rng, 16, 32, 1.0 / 3.0)
        assert mutual_coherence(D) < 1.0 / 3.0
        support = rng.choice(32, size=2, replace=False)
        coeffs = rng.uniform(1.0, 2.0, 2) * rng.choice([-1.0, 1.0], 2)
        x = omp(D, D[:, support] @ coeffs, T=2, residual_tol=1e-12)
        if set(np.flatnonzero(x)) == set(support) and np.allclose(
            x[support], coeffs, atol=1e-8, rtol=0.0
        ):
            recovered += 1
    elapsed = time.perf_counter() - start
    assert recovered == trials
    assert elapsed < 10.0
    with capsys.disabled():
        report("C02", f"{recovered}/{trials} exact recoveries in {elapsed:.2f}s")


def test_c03_ista_matches_coordinate_descent(capsys):
    worst = 0.0
    for trial in range(50):
        rng = np.random.default_rng(500 + trial)
        D = rng.standard_normal((8, 12))
        D /= np.linalg.norm(D, axis=0)
        y = rng.standard_normal(8)
        for alpha in (0.1, 0.5):
            x_cd = cd_lasso(D, y, alpha, tol=1e-10)
            cfg = CoderConfig(mode="ista", alpha=alpha, max_iter=20_000, obj_tol=1e-30)
            x = ista(D, y, cfg)
            gap = abs(
                lasso_objective(D, y, x, alpha) - lasso_objective(D, y, x_cd, alpha)
            )
            worst = max(worst, gap)
            assert gap <= 1e-4
    with capsys.disabled():
        report("C03", f"worst objective gap {worst:.2e} <= 1e-4 over 100 solves")


def test_c04_ksvd_sweep_monotonicity(natural_learn_run, capsys):
    _, _, _, _, _, rep = natural_learn_run
    assert len(rep.presweep_error_per_iter) == 20
    for pre, post in zip(rep.presweep_error_per_iter, rep.postsweep_error_per_iter):
        assert post <= pre * (1.0 + 1e-9)
    assert rep.objective_per_iter[19] <= rep.objective_per_iter[0]
    with capsys.disabled():
        report(
            "C04",
            "20/20 update sweeps non-increasing; "
            f"objective {rep.objective_per_iter[0]:.3f} -> {rep.objective_per_iter[19]:.3f}",
        )


def test_c05_reconstruction_quality(natural_learn_run, capsys):
    img, _, grid, dictionary, codes, _ = natural_learn_run
    recon = from_patches(dictionary @ codes, grid)
    quality = psnr(img, recon)
    assert quality >= 28.0
    with capsys.disabled():
        report("C05", f"reconstruction PSNR {quality:.2f} dB >= 28 dB")


def test_c06_identity_transform_equivalence(capsys):
    unit = TransformSpec(kind="affine", scale=0.0, offset=1.0)
    for trial in range(10):
        rng = np.random.default_rng(600 + trial)
        img = rng.uniform(0.0, 1.0, (40, 40))
        cfg = PipelineConfig(
            learn=LearnConfig(K=24, iters=2, coder=CoderConfig(mode="omp", T=4), seed=trial),
            transform=unit,
        )
        result = enhance(img, cfg)
        assert np.array_equal(result.rarity, np.ones(24))
        patches, grid = to_patches(img, 8)
        D, X, _ = learn(patches, cfg.learn)
        assert np.array_equal(result.image, from_patches(D @ X, grid))
    with capsys.disabled():
        report("C06", "unit-weight enhancement bitwise equals plain reconstruction, 10/10")


def test_c07_synthetic_rarity_detection(capsys):
    start = time.perf_counter()
    metrics = anomaly_benchmark(seed=1, trials=100)
    elapsed = time.perf_counter() - start
    assert metrics["anomaly_hit_rate"] >= 0.95
    assert metrics["mean_auc"] >= 0.9
    assert elapsed < 120.0
    with capsys.disabled():
        report(
            "C07",
            f"hit rate {metrics['anomaly_hit_rate']:.2f}, "
            f"mean AUC {metrics['mean_auc']:.4f}, {elapsed:.1f}s",
        )


def test_c08_permutation_equivariance_suite(capsys):
    from rarecode.imageio import PatchGrid

    grid = PatchGrid(block=8, rows=8, cols=8, orig_height=64, orig_width=64)
    for trial in range(100):
        rng = np.random.default_rng(800 + trial)
        K = 32
        codes = rng.standard_normal((K, 64)) * (rng.uniform(size=(K, 64)) < 0.2)
        D = rng.standard_normal((8, K))
        D /= np.linalg.norm(D, axis=0)
        perm = rng.permutation(K)

        base_map = saliency_from_codes(codes, grid, 2.0)
        assert np.array_equal(saliency_from_codes(codes[perm], grid, 2.0), base_map)

        measure = RarityMeasure(kind="count_fraction")
        scores = rarity(activation_stats(codes), measure)
        scores_p = rarity(activation_stats(codes[perm]), measure)
        assert np.array_equal(scores_p, scores[perm])

        weights = transform(scores, TransformSpec(kind="sigmoid", a=-8.0, b=0.3))
        weights_p = transform(scores_p, TransformSpec(kind="sigmoid", a=-8.0, b=0.3))
        assert np.array_equal(
            reweight_dictionary(D[:, perm], weights_p),
            reweight_dictionary(D, weights)[:, perm],
        )
    with capsys.disabled():
        report("C08", "100/100 atom relabelings leave maps bitwise unchanged")


def test_c09_itti_lite_sanity(capsys):
    img, mask = disk_image((128, 128), radius=8.0, fg=0.9, bg=0.1)
    smap = itti_lite(img)
    r, c = divmod(int(np.argmax(smap)), 128)
    assert mask[r, c] == 1.0
    uniform = itti_lite(np.full((128, 128), 0.5))
    assert np.array_equal(uniform, np.zeros((128, 128)))
    with capsys.disabled():
        report("C09", "disk argmax inside the disk; uniform image maps to zeros")


def test_c10_format_roundtrips(capsys):
    for trial in range(50):
        rng = np.random.default_rng(1000 + trial)
        h, w = int(rng.integers(1, 50)), int(rng.integers(1, 50))
        raw = rng.integers(0, 256, (h, w))
        encoded = write_pgm(raw / 255.0, 255)
        decoded = read_pgm(encoded)
        assert np.array_equal(decoded * 255.0, raw)
        assert write_pgm(decoded, 255) == encoded
    for trial in range(50):
        rng = np.random.default_rng(2000 + trial)
        n, K = int(rng.integers(1, 80)), int(rng.integers(1, 80))
        D = rng.standard_normal((n, K))
        data = dictionary_to_bytes(D)
        back = dictionary_from_bytes(data)
        assert np.array_equal(back, D)
        assert dictionary_to_bytes(back) == data
    with capsys.disabled():
        report("C10", "50/50 PGM payload and 50/50 dictionary roundtrips bit-exact")
