"""Depth exchange formats shared with the benchmark harness.

The harness contract: 16-bit grayscale PNG with ``depth_mm = pixel / 256``
and pixel 0 = invalid (representable range (0, 255.996] mm, round-trip
error at most 1/512 mm), or 32-bit float PFM (grayscale, little-endian,
bottom-up rows), which round-trips float32 exactly.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

PNG16_SCALE = 256.0
PNG16_MAX_DEPTH = 65535 / PNG16_SCALE

FORMATS = ("png16", "pfm")


class FormatError(ValueError):
    """A depth grid cannot be represented in the requested format."""


def _checked(depth: np.ndarray) -> np.ndarray:
    arr = np.asarray(depth, dtype=np.float32)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError(f"expected a nonempty 2-D grid, got shape {arr.shape}")
    return arr


def write_png16(path: Path, depth: np.ndarray) -> None:
    arr = _checked(depth)
    valid = np.isfinite(arr) & (arr > 0)
    if np.any(arr[valid] > PNG16_MAX_DEPTH):
        raise FormatError(
            f"depth exceeds png16 range ({PNG16_MAX_DEPTH:.3f} mm); use pfm")
    scaled = np.where(valid, np.rint(arr * PNG16_SCALE), 0.0)
    scaled = np.where(valid & (scaled < 1), 1.0, scaled)
    Image.fromarray(scaled.astype(np.uint16)).save(path, format="PNG")


def read_png16(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        raw = np.asarray(img, dtype=np.uint16)
    return raw.astype(np.float32) / PNG16_SCALE


def write_pfm(path: Path, depth: np.ndarray) -> None:
    arr = _checked(depth)
    arr = np.where(np.isfinite(arr) & (arr > 0), arr, 0.0).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{arr.shape[1]} {arr.shape[0]}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(arr[::-1].tobytes())


def read_pfm(path: Path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Pf":
            raise FormatError(f"{path}: not a grayscale PFM")
        width, height = (int(v) for v in fh.readline().split())
        endian = "<" if float(fh.readline()) < 0 else ">"
        data = fh.read(width * height * 4)
    grid = np.frombuffer(data, dtype=f"{endian}f4").reshape(height, width)
    return np.ascontiguousarray(grid[::-1]).astype(np.float32)


def suffix_for(fmt: str) -> str:
    if fmt == "png16":
        return ".png"
    if fmt == "pfm":
        return ".pfm"
    raise FormatError(f"unknown format {fmt!r}")


def write_depth_atomic(path: Path, depth: np.ndarray, fmt: str) -> None:
    """Write via a temp file + rename so readers never see partial files."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=path.suffix)
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        if fmt == "png16":
            write_png16(tmp, depth)
        elif fmt == "pfm":
            write_pfm(tmp, depth)
        else:
            raise FormatError(f"unknown format {fmt!r}")
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def verify_roundtrip(depth: np.ndarray, fmt: str) -> float:
    """Write-then-read a grid; returns the max absolute error in mm.

    png16 is bounded by half a quantization step (1/512 mm); pfm is exact
    beyond float32 representation.

    Raises:
        FormatError: out-of-range values for png16, or an unknown format.
    """
    arr = _checked(depth)
    with tempfile.TemporaryDirectory() as tmpdir:
        target = Path(tmpdir) / f"grid{suffix_for(fmt)}"
        if fmt == "png16":
            write_png16(target, arr)
            back = read_png16(target)
        else:
            write_pfm(target, arr)
            back = read_pfm(target)
    valid = np.isfinite(arr) & (arr > 0)
    if not valid.any():
        return 0.0
    return float(np.abs(back[valid] - arr[valid]).max())
