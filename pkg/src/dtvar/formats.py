"""File formats for grids, masks and images.

Supported formats:

- PGM (P2 ascii / P5 binary), 8- or 16-bit, for integer scalar grids.
- PPM (P6 binary), 8-bit, for RGB images scaled to [0, 1].
- PBM (P1 ascii / P4 binary) for binary masks; a set mask pixel is
  written as a 1 bit.
- DTVG, a little-endian lossless grid container:

      magic "DTVG" | u32 height | u32 width | u32 channels | f64 data

  Data is row-major with the channel index fastest (numpy (H, W, C)
  order); single-channel grids are stored with channels = 1.

Readers dispatch on file content, writers on the requested format.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .validation import check_binary_mask, check_image, check_scalar_grid

DTVG_MAGIC = b"DTVG"


# -- DTVG -------------------------------------------------------------------

def write_dtvg(path, data) -> None:
    """Write a (H, W) grid or (H, W, C) stack losslessly."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"DTVG data must be 2-d or 3-d, got shape {arr.shape}")
    h, w, c = arr.shape
    with open(path, "wb") as fh:
        fh.write(DTVG_MAGIC)
        fh.write(struct.pack("<III", h, w, c))
        fh.write(arr.astype("<f8").tobytes(order="C"))


def read_dtvg(path) -> np.ndarray:
    """Read a DTVG file; single-channel data comes back as (H, W)."""
    raw = Path(path).read_bytes()
    if raw[:4] != DTVG_MAGIC:
        raise ValueError(f"{path}: not a DTVG file")
    h, w, c = struct.unpack("<III", raw[4:16])
    expected = 16 + h * w * c * 8
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated DTVG payload")
    arr = np.frombuffer(raw[16:], dtype="<f8").reshape(h, w, c).copy()
    return arr[:, :, 0] if c == 1 else arr


# -- netpbm helpers ---------------------------------------------------------

def _read_pnm_header(raw: bytes):
    """Parse a netpbm header, skipping comments; returns (magic, fields, offset)."""
    magic = raw[:2].decode("ascii")
    nfields = 2 if magic in ("P1", "P4") else 3
    fields = []
    pos = 2
    while len(fields) < nfields:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(raw[start:pos]))
    return magic, fields, pos + 1


def write_pgm(path, grid, maxval: int = 255, ascii_format: bool = False) -> None:
    """Write an integer-valued grid as 8- or 16-bit PGM.

    Values must already lie in [0, maxval]; no rescaling is applied.
    """
    arr = check_scalar_grid(grid)
    if maxval not in (255, 65535):
        raise ValueError("maxval must be 255 or 65535")
    ints = np.rint(arr).astype(np.int64)
    if ints.min() < 0 or ints.max() > maxval:
        raise ValueError(f"grid values outside [0, {maxval}]")
    h, w = arr.shape
    if ascii_format:
        lines = [f"P2\n{w} {h}\n{maxval}\n"]
        lines += [" ".join(str(v) for v in row) + "\n" for row in ints]
        Path(path).write_text("".join(lines))
        return
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        dtype = ">u2" if maxval == 65535 else "u1"
        fh.write(ints.astype(dtype).tobytes(order="C"))


def read_pgm(path) -> np.ndarray:
    """Read a P2/P5 PGM into a float64 grid of raw sample values."""
    raw = Path(path).read_bytes()
    magic, (w, h, maxval), offset = _read_pnm_header(raw)
    if magic == "P2":
        vals = np.array(raw[offset - 1 :].split(), dtype=np.float64)
        return vals.reshape(h, w)
    if magic == "P5":
        dtype = ">u2" if maxval > 255 else "u1"
        count = h * w
        arr = np.frombuffer(raw, dtype=dtype, count=count, offset=offset)
        return arr.astype(np.float64).reshape(h, w)
    raise ValueError(f"{path}: unsupported PGM magic {magic}")


def write_ppm(path, image) -> None:
    """Write a (H, W, 3) image in [0, 1] as binary 8-bit PPM."""
    img = check_image(image)
    if img.shape[2] != 3:
        raise ValueError(f"PPM requires 3 channels, got {img.shape[2]}")
    h, w, _ = img.shape
    bytes8 = np.rint(img * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(bytes8.tobytes(order="C"))


def read_ppm(path) -> np.ndarray:
    """Read a P6 PPM into a float64 (H, W, 3) image in [0, 1]."""
    raw = Path(path).read_bytes()
    magic, (w, h, maxval), offset = _read_pnm_header(raw)
    if magic != "P6":
        raise ValueError(f"{path}: unsupported PPM magic {magic}")
    arr = np.frombuffer(raw, dtype="u1", count=h * w * 3, offset=offset)
    return arr.astype(np.float64).reshape(h, w, 3) / float(maxval)


def write_pbm(path, mask, ascii_format: bool = False) -> None:
    """Write a binary mask as PBM; set pixels map to 1 bits."""
    m = check_binary_mask(mask)
    h, w = m.shape
    if ascii_format:
        lines = [f"P1\n{w} {h}\n"]
        lines += [" ".join(str(v) for v in row) + "\n" for row in m]
        Path(path).write_text("".join(lines))
        return
    with open(path, "wb") as fh:
        fh.write(f"P4\n{w} {h}\n".encode("ascii"))
        fh.write(np.packbits(m, axis=1).tobytes(order="C"))


def read_pbm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    magic, (w, h), offset = _read_pnm_header(raw)
    if magic == "P1":
        vals = np.array(raw[offset - 1 :].split(), dtype=np.uint8)
        return vals.reshape(h, w)
    if magic == "P4":
        row_bytes = (w + 7) // 8
        arr = np.frombuffer(raw, dtype="u1", count=h * row_bytes, offset=offset)
        bits = np.unpackbits(arr.reshape(h, row_bytes), axis=1)[:, :w]
        return bits.astype(np.uint8)
    raise ValueError(f"{path}: unsupported PBM magic {magic}")


# -- extension-based dispatch used by the CLI --------------------------------

def load_grid(path) -> np.ndarray:
    """Load a scalar grid from .dtvg or .pgm by extension."""
    suffix = Path(path).suffix.lower()
    if suffix == ".dtvg":
        return read_dtvg(path)
    if suffix == ".pgm":
        return read_pgm(path)
    raise ValueError(f"{path}: expected a .dtvg or .pgm grid file")


def load_mask(path) -> np.ndarray:
    """Load a binary mask from .pbm, or from .pgm/.dtvg with nonzero = set."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pbm":
        return read_pbm(path)
    return (load_grid(path) > 0).astype(np.uint8)
