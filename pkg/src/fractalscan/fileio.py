"""File formats: binary PGM/PPM images, scan-order text files, atomic writes.

Images are exchanged as real grids in [0, 1]; quantization happens only at
the file boundary. All writers go through a temp-file-then-rename path so a
failure never leaves a partial output behind.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from fractalscan.curves import ScanOrder


class PnmError(ValueError):
    """Base class for PGM/PPM format problems."""


class PnmHeaderError(PnmError):
    """Magic number, dimensions, or maxval are missing or malformed."""


class PnmPayloadError(PnmError):
    """Header parsed fine but the raster bytes are short or overlong."""


def write_bytes_atomic(path, data: bytes) -> None:
    """Write the whole payload or nothing: temp file in the target
    directory, fsync'd, then renamed over the destination."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_text_atomic(path, text: str) -> None:
    write_bytes_atomic(path, text.encode("ascii"))


def _read_header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First `count` whitespace-separated tokens, honoring '#' comments.
    Returns the tokens and the offset one byte past the final separator."""
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (10, 13):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace():
            i += 1
        if i == start:
            raise PnmHeaderError("header ended before all fields were read")
        tokens.append(data[start:i])
        if len(tokens) == count:
            if i >= n:
                raise PnmHeaderError("no separator after the last header field")
            i += 1  # exactly one whitespace byte before the raster
    return tokens, i


def read_pgm(path) -> np.ndarray:
    """Load a binary (P5) PGM as a float grid scaled to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise PnmHeaderError(f"not a binary PGM (magic {data[:2]!r})")
    tokens, offset = _read_header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PnmHeaderError(f"non-numeric header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise PnmHeaderError(f"bad dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise PnmHeaderError(f"unsupported maxval {maxval}")
    itemsize = 1 if maxval < 256 else 2
    expected = width * height * itemsize
    payload = data[offset:]
    if len(payload) != expected:
        raise PnmPayloadError(
            f"raster has {len(payload)} bytes, expected {expected}")
    dtype = np.uint8 if itemsize == 1 else np.dtype(">u2")
    raw = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return raw.astype(float) / maxval


def write_pgm(field, path, maxval: int = 255) -> None:
    """Store a [0, 1] grid as binary PGM; values are clamped then rounded
    to the maxval range (lossless for inputs already on that lattice)."""
    if not 1 <= maxval <= 65535:
        raise PnmHeaderError(f"unsupported maxval {maxval}")
    f = np.asarray(field, dtype=float)
    if f.ndim != 2 or f.size == 0:
        raise ValueError(f"expected a nonempty 2-D grid, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("grid contains non-finite values")
    quantized = np.rint(np.clip(f, 0.0, 1.0) * maxval)
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    raster = quantized.astype(dtype).tobytes()
    h, w = f.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    write_bytes_atomic(path, header + raster)


def write_ppm(rgb, path, maxval: int = 255) -> None:
    """Store an (H, W, 3) grid of [0, 1] reals as binary PPM (P6)."""
    if not 1 <= maxval <= 65535:
        raise PnmHeaderError(f"unsupported maxval {maxval}")
    f = np.asarray(rgb, dtype=float)
    if f.ndim != 3 or f.shape[2] != 3 or f.size == 0:
        raise ValueError(f"expected a nonempty (H, W, 3) grid, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("grid contains non-finite values")
    quantized = np.rint(np.clip(f, 0.0, 1.0) * maxval)
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    raster = quantized.astype(dtype).tobytes()
    h, w = f.shape[:2]
    header = f"P6\n{w} {h}\n{maxval}\n".encode("ascii")
    write_bytes_atomic(path, header + raster)


def read_scan_order(path) -> ScanOrder:
    with open(path, "r", encoding="ascii") as fh:
        return ScanOrder.from_text(fh.read())


def write_scan_order(order: ScanOrder, path) -> None:
    write_text_atomic(path, order.to_text())
