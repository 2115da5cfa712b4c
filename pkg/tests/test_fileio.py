"""Image and scan-order file round-trips, the header/payload error split,
and the all-or-nothing write guarantee."""

import os

import numpy as np
import pytest

from fractalscan.curves import make_order
from fractalscan.fileio import (
    PnmHeaderError,
    PnmPayloadError,
    read_pgm,
    read_scan_order,
    write_bytes_atomic,
    write_pgm,
    write_ppm,
    write_scan_order,
)


# -------------------------------------------------------------- PGM round-trip

def test_pgm_round_trip_is_byte_identical(tmp_path):
    rng = np.random.default_rng(0)
    field = rng.integers(0, 256, (11, 7)).astype(float) / 255.0
    first = tmp_path / "a.pgm"
    second = tmp_path / "b.pgm"
    write_pgm(field, first)
    loaded = read_pgm(first)
    assert loaded.shape == (11, 7)
    assert np.array_equal(loaded, field)  # input already on the 8-bit lattice
    write_pgm(loaded, second)
    assert first.read_bytes() == second.read_bytes()


def test_pgm_single_pixel_quantization(tmp_path):
    path = tmp_path / "one.pgm"
    write_pgm(np.array([[128 / 255]]), path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n1 1\n255\n")
    assert data[-1] == 128
    assert read_pgm(path)[0, 0] == 128 / 255


def test_pgm_16_bit_path(tmp_path):
    rng = np.random.default_rng(1)
    field = rng.integers(0, 65536, (5, 4)).astype(float) / 65535.0
    path = tmp_path / "deep.pgm"
    write_pgm(field, path, maxval=65535)
    loaded = read_pgm(path)
    assert np.allclose(loaded, field, atol=1e-12)
    assert path.read_bytes().startswith(b"P5\n4 5\n65535\n")


def test_pgm_clamps_out_of_range(tmp_path):
    path = tmp_path / "clamp.pgm"
    write_pgm(np.array([[-0.5, 2.0]]), path)
    assert path.read_bytes()[-2:] == bytes([0, 255])


def test_pgm_header_comments_are_skipped(tmp_path):
    path = tmp_path / "comment.pgm"
    payload = bytes([7, 8, 9, 10, 11, 12])
    path.write_bytes(b"P5 # magic\n# a comment line\n3 # width\n2\n255\n" + payload)
    loaded = read_pgm(path)
    assert loaded.shape == (2, 3)
    assert np.array_equal(np.rint(loaded * 255).astype(int),
                          np.arange(7, 13).reshape(2, 3))


# ----------------------------------------------------------- error taxonomy

def test_wrong_magic_is_a_header_error(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P4\n2 2\n255\n" + bytes(4))
    with pytest.raises(PnmHeaderError):
        read_pgm(path)


def test_truncated_payload_is_a_payload_error(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes(3))
    with pytest.raises(PnmPayloadError):
        read_pgm(path)


def test_overlong_payload_is_a_payload_error(tmp_path):
    path = tmp_path / "long.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes(5))
    with pytest.raises(PnmPayloadError):
        read_pgm(path)


def test_payload_and_header_errors_are_distinct(tmp_path):
    path = tmp_path / "short2.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes(3))
    with pytest.raises(PnmPayloadError) as exc_info:
        read_pgm(path)
    assert not isinstance(exc_info.value, PnmHeaderError)


@pytest.mark.parametrize("header", [
    b"P5\n0 2\n255\n",        # zero width
    b"P5\n2 -1\n255\n",       # negative height
    b"P5\n2 2\n0\n",          # maxval too small
    b"P5\n2 2\n70000\n",      # maxval too large
    b"P5\n2 two\n255\n",      # non-numeric field
    b"P5\n2 2",               # header ends early
    b"P5\n2 2\n255",          # no separator before raster
])
def test_malformed_headers(tmp_path, header):
    path = tmp_path / "malformed.pgm"
    path.write_bytes(header + bytes(8))
    if header.endswith(b"255"):
        path.write_bytes(header)  # the no-separator case needs a clean EOF
    with pytest.raises(PnmHeaderError):
        read_pgm(path)


def test_write_pgm_rejects_bad_input(tmp_path):
    path = tmp_path / "never.pgm"
    with pytest.raises(ValueError):
        write_pgm(np.array([[np.nan, 0.0]]), path)
    with pytest.raises(ValueError):
        write_pgm(np.zeros(4), path)
    with pytest.raises(ValueError):
        write_pgm(np.zeros((0, 3)), path)
    with pytest.raises(PnmHeaderError):
        write_pgm(np.zeros((2, 2)), path, maxval=0)
    assert not path.exists()


# ------------------------------------------------------------------- PPM

def test_ppm_header_and_payload_length(tmp_path):
    rgb = np.zeros((3, 5, 3))
    rgb[..., 0] = 1.0
    path = tmp_path / "red.ppm"
    write_ppm(rgb, path)
    data = path.read_bytes()
    assert data.startswith(b"P6\n5 3\n255\n")
    raster = data[len(b"P6\n5 3\n255\n"):]
    assert len(raster) == 3 * 5 * 3
    assert raster[:3] == bytes([255, 0, 0])


def test_ppm_rejects_wrong_rank(tmp_path):
    with pytest.raises(ValueError):
        write_ppm(np.zeros((3, 5)), tmp_path / "no.ppm")
    with pytest.raises(ValueError):
        write_ppm(np.zeros((3, 5, 4)), tmp_path / "no.ppm")


# ------------------------------------------------------------ atomic writes

def test_atomic_write_replaces_existing_content(tmp_path):
    path = tmp_path / "file.bin"
    path.write_bytes(b"old")
    write_bytes_atomic(path, b"new content")
    assert path.read_bytes() == b"new content"
    leftovers = [p for p in os.listdir(tmp_path) if p != "file.bin"]
    assert leftovers == []


def test_failed_write_leaves_no_trace(tmp_path):
    target = tmp_path / "adir"
    target.mkdir()  # renaming a file over a directory fails on every OS
    with pytest.raises(OSError):
        write_bytes_atomic(target, b"payload")
    assert target.is_dir()
    assert os.listdir(tmp_path) == ["adir"]
    assert os.listdir(target) == []


# -------------------------------------------------------- scan-order files

def test_scan_order_file_round_trip(tmp_path):
    order = make_order("hilbert", (8, 8))
    path = tmp_path / "order.scan"
    write_scan_order(order, path)
    loaded = read_scan_order(path)
    assert loaded.family == order.family
    assert tuple(loaded.shape) == tuple(order.shape)
    assert np.array_equal(loaded.cells, order.cells)
    write_scan_order(loaded, tmp_path / "again.scan")
    assert path.read_bytes() == (tmp_path / "again.scan").read_bytes()
