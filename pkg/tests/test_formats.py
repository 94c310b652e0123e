import numpy as np
import pytest

from dtvar import formats


def test_dtvg_roundtrip_2d(tmp_path):
    grid = np.arange(12.0).reshape(3, 4) * np.pi
    path = tmp_path / "g.dtvg"
    formats.write_dtvg(path, grid)
    back = formats.read_dtvg(path)
    assert back.shape == (3, 4)
    assert np.array_equal(back, grid)  # lossless


def test_dtvg_roundtrip_3d(tmp_path):
    rng = np.random.default_rng(0)
    stack = rng.random((5, 6, 3))
    path = tmp_path / "s.dtvg"
    formats.write_dtvg(path, stack)
    assert np.array_equal(formats.read_dtvg(path), stack)


def test_dtvg_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.dtvg"
    path.write_bytes(b"NOPE" + b"\0" * 16)
    with pytest.raises(ValueError, match="not a DTVG"):
        formats.read_dtvg(path)


def test_dtvg_rejects_truncation(tmp_path):
    path = tmp_path / "t.dtvg"
    formats.write_dtvg(path, np.ones((4, 4)))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="truncated"):
        formats.read_dtvg(path)


@pytest.mark.parametrize("ascii_format", [False, True])
def test_pgm_roundtrip_8bit(tmp_path, ascii_format):
    grid = np.arange(20.0).reshape(4, 5) * 13 % 256
    path = tmp_path / "g.pgm"
    formats.write_pgm(path, grid, maxval=255, ascii_format=ascii_format)
    assert np.array_equal(formats.read_pgm(path), grid)


def test_pgm_roundtrip_16bit(tmp_path):
    grid = (np.arange(12.0).reshape(3, 4) * 5000) % 65536
    path = tmp_path / "g16.pgm"
    formats.write_pgm(path, grid, maxval=65535)
    assert np.array_equal(formats.read_pgm(path), grid)


def test_pgm_rejects_out_of_range(tmp_path):
    with pytest.raises(ValueError):
        formats.write_pgm(tmp_path / "x.pgm", np.full((2, 2), 300.0), maxval=255)


def test_pgm_reads_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_text("P2\n# a comment\n3 2\n255\n1 2 3\n4 5 6\n")
    assert np.array_equal(formats.read_pgm(path), [[1, 2, 3], [4, 5, 6]])


def test_ppm_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    img = np.rint(rng.random((4, 6, 3)) * 255) / 255.0
    path = tmp_path / "img.ppm"
    formats.write_ppm(path, img)
    assert np.allclose(formats.read_ppm(path), img, atol=1e-12)


@pytest.mark.parametrize("ascii_format", [False, True])
def test_pbm_roundtrip(tmp_path, ascii_format):
    rng = np.random.default_rng(2)
    mask = (rng.random((5, 11)) < 0.4).astype(np.uint8)  # width not a byte multiple
    path = tmp_path / "m.pbm"
    formats.write_pbm(path, mask, ascii_format=ascii_format)
    assert np.array_equal(formats.read_pbm(path), mask)


def test_load_mask_from_grid(tmp_path):
    grid = np.array([[0.0, 2.0], [0.5, 0.0]])
    path = tmp_path / "g.dtvg"
    formats.write_dtvg(path, grid)
    assert np.array_equal(formats.load_mask(path), [[0, 1], [1, 0]])


def test_load_grid_rejects_unknown_extension(tmp_path):
    with pytest.raises(ValueError):
        formats.load_grid(tmp_path / "weird.xyz")
