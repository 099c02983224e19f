import numpy as np
import pytest
from hypothesis import given, strategies as st

from rarecode.errors import ContractViolationError, PgmParseError, PgmTruncatedError
from rarecode.imageio import (
    PatchGrid,
    from_patches,
    psnr,
    read_pgm,
    to_patches,
    validate_image,
    write_pgm,
)


class TestReadPgm:
    def test_p5_endpoints(self):
        img = read_pgm(b"P5\n2 1\n255\n" + bytes([0, 255]))
        assert img.shape == (1, 2)
        assert img[0, 0] == 0.0 and img[0, 1] == 1.0

    def test_p2_direct_scaling(self):
        img = read_pgm(b"P2 1 1 255 128")
        assert img.shape == (1, 1)
        assert img[0, 0] == 128 / 255

    def test_unsupported_magic(self):
        with pytest.raises(PgmParseError) as exc:
            read_pgm(b"P7\n1 1\n255\n\x00")
        assert exc.value.offset == 0

    def test_comments_in_header(self):
        img = read_pgm(b"P5 # binary graymap\n# another comment\n1 1\n255\n\x80")
        assert img[0, 0] == 128 / 255

    def test_sixteen_bit_big_endian(self):
        img = read_pgm(b"P5\n1 1\n65535\n" + bytes([0x01, 0x00]))
        assert img[0, 0] == 256 / 65535

    def test_truncated_p5_payload(self):
        with pytest.raises(PgmTruncatedError):
            read_pgm(b"P5\n2 2\n255\n" + bytes([1, 2, 3]))

    def test_truncated_p2_payload(self):
        with pytest.raises(PgmTruncatedError):
            read_pgm(b"P2\n2 2\n255\n1 2 3")

    def test_malformed_dimension_names_offset(self):
        with pytest.raises(PgmParseError) as exc:
            read_pgm(b"P5\nxx 1\n255\n\x00")
        assert exc.value.offset == 3
        assert "3" in str(exc.value)

    def test_zero_width_rejected(self):
        with pytest.raises(PgmParseError):
            read_pgm(b"P5\n0 1\n255\n")

    def test_maxval_out_of_range(self):
        with pytest.raises(PgmParseError):
            read_pgm(b"P5\n1 1\n0\n\x00")
        with pytest.raises(PgmParseError):
            read_pgm(b"P5\n1 1\n70000\n\x00\x00")

    def test_sample_above_maxval_rejected(self):
        with pytest.raises(PgmParseError):
            read_pgm(b"P5\n1 1\n100\n\xc8")  # sample 200 > maxval 100
        with pytest.raises(PgmParseError):
            read_pgm(b"P2\n1 1\n100\n200")


class TestWritePgm:
    def test_full_scale_sample(self):
        data = write_pgm(np.array([[1.0]]), 255)
        assert data.endswith(b"\xff")

    def test_round_half_away_from_zero(self):
        data = write_pgm(np.array([[0.5]]), 255)
        assert data[-1] == 128  # round(127.5) away from zero

    def test_clamps_out_of_range(self):
        data = write_pgm(np.array([[1.7, -0.3]]), 255)
        assert data[-2:] == bytes([255, 0])

    def test_sixteen_bit_payload(self):
        data = write_pgm(np.array([[1.0]]), 65535)
        assert data.endswith(b"\xff\xff")

    def test_bad_maxval(self):
        with pytest.raises(ContractViolationError):
            write_pgm(np.zeros((1, 1)), 0)
        with pytest.raises(ContractViolationError):
            write_pgm(np.zeros((1, 1)), 65536)

    @given(st.integers(0, 2**32 - 1))
    def test_eight_bit_payload_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        h, w = int(rng.integers(1, 24)), int(rng.integers(1, 24))
        raw = rng.integers(0, 256, (h, w))
        encoded = write_pgm(raw / 255.0, 255)
        again = write_pgm(read_pgm(encoded), 255)
        assert encoded == again
        assert np.array_equal(read_pgm(encoded) * 255, raw)


class TestToPatches:
    def test_constant_single_block(self):
        img = np.full((8, 8), 0.5)
        pm, grid = to_patches(img, 8)
        assert pm.shape == (64, 1)
        assert np.all(pm == 0.5)
        assert (grid.rows, grid.cols) == (1, 1)

    def test_two_blocks_ordering(self):
        img = np.hstack([np.zeros((8, 8)), np.ones((8, 8))])  # 16 wide, 8 tall
        pm, grid = to_patches(img, 8)
        assert pm.shape == (64, 2)
        assert np.all(pm[:, 0] == 0.0) and np.all(pm[:, 1] == 1.0)
        assert (grid.rows, grid.cols) == (1, 2)

    def test_edge_replication_padding(self):
        rng = np.random.default_rng(0)
        img = rng.uniform(0, 1, (9, 9))
        pm, grid = to_patches(img, 8)
        assert (grid.rows, grid.cols) == (2, 2)
        rebuilt = (
            pm.T.reshape(2, 2, 8, 8).swapaxes(1, 2).reshape(16, 16)
        )
        assert np.array_equal(rebuilt[:9, :9], img)
        # padded rows/cols repeat the last interior row/col
        assert np.array_equal(rebuilt[9:, :9], np.tile(img[8, :], (7, 1)))
        assert np.array_equal(rebuilt[:9, 9:], np.tile(img[:, 8][:, None], (1, 7)))

    def test_block_scan_is_row_major(self):
        img = np.arange(16 * 24, dtype=float).reshape(16, 24) / (16 * 24)
        pm, grid = to_patches(img, 8)
        j = 1 * grid.cols + 2  # block at block-row 1, block-col 2
        assert np.array_equal(pm[:, j], img[8:16, 16:24].ravel())

    def test_color_input_rejected(self):
        with pytest.raises(ContractViolationError):
            to_patches(np.zeros((4, 4, 3)), 8)

    def test_degenerate_one_pixel(self):
        pm, grid = to_patches(np.array([[0.25]]), 8)
        assert pm.shape == (64, 1)
        assert np.all(pm == 0.25)


class TestFromPatches:
    @given(st.integers(0, 2**32 - 1))
    def test_roundtrip_identity(self, seed):
        rng = np.random.default_rng(seed)
        h, w = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        img = rng.uniform(0, 1, (h, w))
        pm, grid = to_patches(img, 8)
        assert np.array_equal(from_patches(pm, grid), img)

    def test_roundtrip_bitwise_on_multiples(self):
        rng = np.random.default_rng(1)
        img = rng.uniform(0, 1, (24, 40))
        pm, grid = to_patches(img, 8)
        out = from_patches(pm, grid)
        assert out.dtype == img.dtype and np.array_equal(out, img)

    def test_clamps_overrange_values(self):
        pm, grid = to_patches(np.full((8, 8), 0.5), 8)
        pm[0, 0] = 1.3
        pm[1, 0] = -0.2
        out = from_patches(pm, grid)
        assert out[0, 0] == 1.0 and out[0, 1] == 0.0

    def test_single_block_reshape(self):
        col = np.linspace(0, 1, 64)
        grid = PatchGrid(block=8, rows=1, cols=1, orig_height=8, orig_width=8)
        assert np.array_equal(from_patches(col[:, None], grid), col.reshape(8, 8))

    def test_dimension_mismatch(self):
        grid = PatchGrid(block=8, rows=1, cols=1, orig_height=8, orig_width=8)
        with pytest.raises(ContractViolationError):
            from_patches(np.zeros((64, 2)), grid)

    def test_tiling_partition(self):
        # every interior pixel lands in exactly one (column, index) slot
        img = np.arange(12 * 20, dtype=float).reshape(12, 20) / (12 * 20)
        pm, grid = to_patches(img, 8)
        seen = {}
        for j in range(pm.shape[1]):
            br, bc = divmod(j, grid.cols)
            for idx in range(64):
                py, px = divmod(idx, 8)
                y, x = br * 8 + py, bc * 8 + px
                if y < 12 and x < 20:
                    assert (y, x) not in seen
                    seen[(y, x)] = pm[idx, j]
        assert len(seen) == 12 * 20
        for (y, x), v in seen.items():
            assert v == img[y, x]


class TestValidateImage:
    def test_rejects_out_of_range(self):
        with pytest.raises(ContractViolationError):
            validate_image(np.array([[1.5]]))
        with pytest.raises(ContractViolationError):
            validate_image(np.array([[-0.1]]))

    def test_rejects_nan(self):
        with pytest.raises(ContractViolationError):
            validate_image(np.array([[np.nan]]))

    def test_accepts_boundaries(self):
        validate_image(np.array([[0.0, 1.0]]))


class TestPsnr:
    def test_exact_match_is_inf(self):
        a = np.random.default_rng(0).uniform(0, 1, (5, 5))
        assert psnr(a, a) == float("inf")

    def test_known_value(self):
        a = np.zeros((10, 10))
        b = np.full((10, 10), 0.1)
        assert psnr(a, b) == pytest.approx(10 * np.log10(1 / 0.01))

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolationError):
            psnr(np.zeros((2, 2)), np.zeros((2, 3)))
