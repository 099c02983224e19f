"""Grayscale PGM I/O and non-overlapping block decomposition.

Images are 2-D float64 arrays with luminance in [0, 1], indexed
``img[row, col]``. :func:`to_patches` tiles an image into non-overlapping
square blocks and stacks each block, flattened row-major, as one column of
a patch matrix; :func:`from_patches` inverts the tiling. Block bookkeeping
(counts, padding, flattening convention) lives in :class:`PatchGrid`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, PgmParseError, PgmTruncatedError

_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True)
class PatchGrid:
    """Bookkeeping for one non-overlapping block tiling of an image.

    Blocks are scanned row-major over the image and pixels within a block
    are flattened row-major; patch column ``j`` holds block
    ``(j // cols, j % cols)``.
    """

    block: int
    rows: int
    cols: int
    orig_height: int
    orig_width: int
    order: str = "row-major"

    def __post_init__(self):
        if self.block < 1 or self.rows < 1 or self.cols < 1:
            raise ContractViolationError("grid dimensions must be positive")
        if self.orig_height < 1 or self.orig_width < 1:
            raise ContractViolationError("original image dimensions must be positive")
        for count, side in ((self.rows, self.orig_height), (self.cols, self.orig_width)):
            if not 0 <= count * self.block - side < self.block:
                raise ContractViolationError(
                    "block counts inconsistent with the original image size"
                )
        if self.order != "row-major":
            raise ContractViolationError(f"unknown flattening order {self.order!r}")

    @property
    def n(self) -> int:
        """Patch dimension (block squared)."""
        return self.block * self.block

    @property
    def patch_count(self) -> int:
        return self.rows * self.cols


def validate_image(img) -> np.ndarray:
    """Coerce to a float64 grayscale image and check the [0, 1] contract.

    Color (3-D) inputs are rejected rather than converted.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolationError(
            f"expected a 2-D grayscale image, got {arr.ndim} dimension(s)"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError("image must have at least one pixel")
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError("image contains non-finite samples")
    if float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
        raise ContractViolationError("image luminance must lie in [0, 1]")
    return arr


def _skip_header_space(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#' comment runs to end of line
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        else:
            break
    return pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int, int]:
    pos = _skip_header_space(data, pos)
    if pos >= len(data):
        raise PgmTruncatedError(f"stream ended while reading {what} (byte offset {pos})")
    start = pos
    while pos < len(data) and 0x30 <= data[pos] <= 0x39:
        pos += 1
    if pos == start:
        raise PgmParseError(f"malformed {what} at byte offset {start}", offset=start)
    return int(data[start:pos]), pos, start


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) or ASCII (P2) PGM stream into an image.

    Samples are divided by the header maxval so results land in [0, 1].
    Two-byte samples (maxval > 255) are read big-endian.

    Raises
    ------
    PgmParseError
        Malformed magic, header field, or out-of-range sample; the message
        names the byte offset.
    PgmTruncatedError
        Fewer payload bytes (or ASCII samples) than the header declares.
    """
    data = bytes(data)
    if len(data) < 2:
        raise PgmParseError("not a PGM stream: missing magic at byte offset 0", offset=0)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(
            f"unsupported magic {magic!r} at byte offset 0 (want P2 or P5)", offset=0
        )
    width, pos, off = _read_header_int(data, 2, "width")
    if width < 1:
        raise PgmParseError(f"width must be >= 1 at byte offset {off}", offset=off)
    height, pos, off = _read_header_int(data, pos, "height")
    if height < 1:
        raise PgmParseError(f"height must be >= 1 at byte offset {off}", offset=off)
    maxval, pos, off = _read_header_int(data, pos, "maxval")
    if not 1 <= maxval <= 65535:
        raise PgmParseError(
            f"maxval {maxval} outside 1..65535 at byte offset {off}", offset=off
        )
    count = width * height

    if magic == b"P5":
        if pos >= len(data):
            raise PgmTruncatedError("stream ended before the pixel payload")
        if data[pos] not in _WHITESPACE:
            raise PgmParseError(
                f"expected one whitespace byte after maxval at byte offset {pos}",
                offset=pos,
            )
        pos += 1
        itemsize = 2 if maxval > 255 else 1
        need = count * itemsize
        have = len(data) - pos
        if have < need:
            raise PgmTruncatedError(
                f"pixel payload truncated: want {need} bytes at offset {pos}, have {have}"
            )
        dtype = ">u2" if itemsize == 2 else np.uint8
        samples = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(
            np.float64
        )
        if float(samples.max()) > maxval:
            bad = int(np.argmax(samples > maxval))
            raise PgmParseError(
                f"sample {int(samples[bad])} exceeds maxval {maxval} "
                f"at byte offset {pos + bad * itemsize}",
                offset=pos + bad * itemsize,
            )
    else:  # P2
        samples = np.empty(count, dtype=np.float64)
        for i in range(count):
            value, pos, off = _read_header_int(data, pos, f"sample {i}")
            if value > maxval:
                raise PgmParseError(
                    f"sample {value} exceeds maxval {maxval} at byte offset {off}",
                    offset=off,
                )
            samples[i] = value

    return samples.reshape(height, width) / float(maxval)


def write_pgm(img, maxval: int = 255) -> bytes:
    """Encode an image as binary (P5) PGM.

    Samples are clamped to [0, 1] and quantized by rounding half away from
    zero; maxvals above 255 produce big-endian two-byte samples. Reading
    back an 8-bit quantized image at maxval 255 is lossless.
    """
    if not 1 <= int(maxval) <= 65535 or int(maxval) != maxval:
        raise ContractViolationError("maxval must be an integer in 1..65535")
    maxval = int(maxval)
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError("image must be a nonempty 2-D array")
    quant = np.floor(np.clip(arr, 0.0, 1.0) * maxval + 0.5)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    payload = quant.astype(">u2" if maxval > 255 else np.uint8).tobytes()
    return header + payload


def to_patches(img, block: int = 8) -> tuple[np.ndarray, PatchGrid]:
    """Tile an image into non-overlapping ``block``-square patches.

    The image is padded up to block multiples by edge replication (the last
    row/column repeated). Returns the ``n x N`` patch matrix (``n`` =
    block squared) and the companion :class:`PatchGrid`.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolationError("image must be a nonempty 2-D array")
    if block < 1:
        raise ContractViolationError("block size must be >= 1")
    height, width = arr.shape
    rows = -(-height // block)
    cols = -(-width // block)
    padded = np.pad(arr, ((0, rows * block - height), (0, cols * block - width)), mode="edge")
    stacked = (
        padded.reshape(rows, block, cols, block)
        .swapaxes(1, 2)
        .reshape(rows * cols, block * block)
    )
    grid = PatchGrid(block=block, rows=rows, cols=cols, orig_height=height, orig_width=width)
    return stacked.T.copy(), grid


def from_patches(patches, grid: PatchGrid) -> np.ndarray:
    """Reassemble an image from a patch matrix, cropping padding.

    Samples are clamped to [0, 1]; in-range values pass through bit-exactly,
    so ``from_patches(*to_patches(img))`` is the identity for valid images.
    """
    arr = np.asarray(patches, dtype=np.float64)
    if arr.ndim != 2 or arr.shape != (grid.n, grid.patch_count):
        raise ContractViolationError(
            f"patch matrix shape {getattr(arr, 'shape', None)} does not match grid "
            f"({grid.n} x {grid.patch_count})"
        )
    block, rows, cols = grid.block, grid.rows, grid.cols
    tiled = (
        arr.T.reshape(rows, cols, block, block)
        .swapaxes(1, 2)
        .reshape(rows * block, cols * block)
    )
    return np.clip(tiled[: grid.orig_height, : grid.orig_width], 0.0, 1.0)


def psnr(reference, estimate) -> float:
    """Peak signal-to-noise ratio in dB for [0, 1]-valued arrays.

    Returns ``inf`` for an exact match.
    """
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(estimate, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractViolationError("psnr operands must have equal shapes")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(1.0 / mse))
