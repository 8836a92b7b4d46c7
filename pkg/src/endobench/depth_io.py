"""Depth-map exchange formats.

Two bit-exact contracts:

* 16-bit grayscale PNG with ``depth_mm = pixel / 256.0`` and pixel 0
  reserved for invalid cells (so the representable range is
  (0, 255.996] mm and write/read round-trip error is at most 1/512 mm).
* PFM, 32-bit float little-endian, bottom-up row order per convention;
  lossless for float32 grids. Invalid cells are stored as 0.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ShapeError

PNG16_SCALE = 256.0
PNG16_MAX_DEPTH = 65535 / PNG16_SCALE  # 255.996 mm


def _check_grid(depth: np.ndarray) -> np.ndarray:
    arr = np.asarray(depth, dtype=np.float32)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a 2-D depth grid, got shape {arr.shape}")
    return arr


def write_depth_png16(path: str | Path, depth: np.ndarray) -> None:
    """Write a depth grid in millimeters as 16-bit PNG.

    Non-finite and non-positive cells are stored as 0 (invalid).

    Raises:
        ValueError: a valid depth exceeds the representable 255.996 mm.
    """
    arr = _check_grid(depth)
    valid = np.isfinite(arr) & (arr > 0)
    if np.any(arr[valid] > PNG16_MAX_DEPTH):
        raise ValueError(
            f"depth exceeds png16 range ({PNG16_MAX_DEPTH:.3f} mm); use pfm")
    scaled = np.where(valid, np.rint(arr * PNG16_SCALE), 0.0)
    # values that round to 0 would alias with the invalid marker
    scaled = np.where(valid & (scaled < 1), 1.0, scaled)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(scaled.astype(np.uint16)).save(path, format="PNG")


def read_depth_png16(path: str | Path) -> np.ndarray:
    """Read a 16-bit PNG depth map; invalid cells come back as 0.0 mm."""
    with Image.open(path) as img:
        raw = np.asarray(img, dtype=np.uint16)
    if raw.ndim != 2:
        raise ShapeError(f"{path}: expected single-channel 16-bit PNG")
    return raw.astype(np.float32) / PNG16_SCALE


def write_depth_pfm(path: str | Path, depth: np.ndarray) -> None:
    """Write a depth grid as grayscale PFM (little-endian, bottom-up)."""
    arr = _check_grid(depth)
    arr = np.where(np.isfinite(arr) & (arr > 0), arr, 0.0).astype("<f4")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{arr.shape[1]} {arr.shape[0]}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(arr[::-1].tobytes())


def read_depth_pfm(path: str | Path) -> np.ndarray:
    """Read a grayscale PFM depth map."""
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Pf":
            raise ValueError(f"{path}: not a grayscale PFM file")
        dims = fh.readline().split()
        if len(dims) != 2:
            raise ValueError(f"{path}: malformed PFM dimension header")
        width, height = int(dims[0]), int(dims[1])
        scale = float(fh.readline().strip())
        endian = "<" if scale < 0 else ">"
        data = fh.read(width * height * 4)
    if len(data) != width * height * 4:
        raise ValueError(f"{path}: truncated PFM payload")
    grid = np.frombuffer(data, dtype=f"{endian}f4").reshape(height, width)
    return np.ascontiguousarray(grid[::-1]).astype(np.float32)


def write_depth(path: str | Path, depth: np.ndarray, fmt: str = "png16") -> None:
    if fmt == "png16":
        write_depth_png16(path, depth)
    elif fmt == "pfm":
        write_depth_pfm(path, depth)
    else:
        raise ValueError(f"unknown depth format {fmt!r}")


def read_depth(path: str | Path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pfm":
        return read_depth_pfm(path)
    return read_depth_png16(path)
