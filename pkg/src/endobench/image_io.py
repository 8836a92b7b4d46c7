"""8-bit RGB image loading, saving, and validation.

Images are plain ``uint8`` numpy arrays of shape ``(height, width, 3)``.
Grayscale inputs are expanded to RGB on load; alpha channels are dropped.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ShapeError


def ensure_rgb(image: np.ndarray) -> np.ndarray:
    """Validate that *image* is an (H, W, 3) uint8 array and return it.

    Raises:
        ShapeError: wrong rank, channel count, dtype, or empty dimensions.
    """
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"expected (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"image dimensions must be >= 1, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ShapeError(f"expected uint8 pixels, got dtype {arr.dtype}")
    return arr


def load_rgb(path: str | Path) -> np.ndarray:
    """Load a PNG (or any PIL-readable image) as an (H, W, 3) uint8 array."""
    with Image.open(path) as img:
        if img.mode != "RGB":
            img = img.convert("RGB")
        return np.array(img, dtype=np.uint8)


def save_rgb(path: str | Path, image: np.ndarray) -> None:
    """Write an RGB array as PNG."""
    arr = ensure_rgb(image)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def to_float(image: np.ndarray) -> np.ndarray:
    """uint8 [0, 255] -> float32 [0, 1]."""
    return image.astype(np.float32) / 255.0


def to_uint8(image: np.ndarray) -> np.ndarray:
    """float [0, 1] -> uint8 with round-half-even then saturation."""
    scaled = np.asarray(image, dtype=np.float32) * 255.0
    return np.clip(np.rint(scaled), 0.0, 255.0).astype(np.uint8)
