"""The sixteen corruption transforms and the deterministic apply() entry point.

All transforms work on float32 arrays in [0, 1]; the engine converts from
and to uint8 with round-half-even and saturation. Stochastic transforms
draw exclusively from a counter-based generator keyed by the spec seed, so
apply() is a pure function of (image, spec, params): two invocations agree
byte for byte, and the nine seed-independent types ignore the seed
entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from io import BytesIO

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import InvalidSpecError, ShapeError
from .image_io import ensure_rgb, to_float, to_uint8
from .seeding import make_rng
from .severity_params import SeverityParamTable
from .taxonomy import CORRUPTION_TYPES


@dataclass(frozen=True)
class CorruptionSpec:
    """One corruption request: type tag, severity 0-5, and a 64-bit seed."""

    ctype: str
    severity: int
    seed: int = 0


# --------------------------------------------------------------------------
# shared helpers


def _resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize of an (H, W, C) float array, half-pixel centers."""
    h, w = img.shape[:2]
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = (ys - y0).astype(np.float32)
    fx = (xs - x0).astype(np.float32)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = img[y0c][:, x0c] * (1 - fx) + img[y0c][:, x1c] * fx
    bot = img[y1c][:, x0c] * (1 - fx) + img[y1c][:, x1c] * fx
    return (top * (1 - fy) + bot * fy).astype(np.float32)


def _convolve_rgb(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = np.empty_like(img)
    for c in range(3):
        out[:, :, c] = ndimage.convolve(img[:, :, c], kernel, mode="mirror")
    return out


def _disk_kernel(radius: float, alias_blur: float) -> np.ndarray:
    if radius <= 8:
        coords = np.arange(-8, 9)
        smooth_radius = 1
    else:
        coords = np.arange(-radius, radius + 1)
        smooth_radius = 2
    xx, yy = np.meshgrid(coords, coords)
    disk = (xx**2 + yy**2 <= radius**2).astype(np.float32)
    disk /= disk.sum()
    disk = ndimage.gaussian_filter(disk, sigma=alias_blur, mode="constant",
                                   radius=smooth_radius)
    return disk / disk.sum()


def _line_kernel(radius: int, sigma: float, angle_deg: float) -> np.ndarray:
    """Gaussian-weighted line kernel: 1-D profile laid along a direction."""
    size = 2 * radius + 1
    kernel = np.zeros((size, size), dtype=np.float64)
    theta = math.radians(angle_deg)
    dx, dy = math.cos(theta), math.sin(theta)
    for t in range(-radius, radius + 1):
        weight = math.exp(-(t * t) / (2.0 * sigma * sigma))
        px = radius + t * dx
        py = radius + t * dy
        x0, y0 = int(math.floor(px)), int(math.floor(py))
        fx, fy = px - x0, py - y0
        for ix, wx in ((x0, 1 - fx), (x0 + 1, fx)):
            for iy, wy in ((y0, 1 - fy), (y0 + 1, fy)):
                if 0 <= ix < size and 0 <= iy < size:
                    kernel[iy, ix] += weight * wx * wy
    return (kernel / kernel.sum()).astype(np.float32)


def _plasma_fractal(mapsize: int, wibbledecay: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Diamond-square heightmap in [0, 1]; mapsize must be a power of two."""
    maparray = np.empty((mapsize, mapsize), dtype=np.float64)
    maparray[0, 0] = 0
    stepsize = mapsize
    wibble = 100.0

    def wibbledmean(array):
        return array / 4 + wibble * rng.uniform(-wibble, wibble, array.shape)

    def fillsquares():
        cornerref = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        squareaccum = cornerref + np.roll(cornerref, shift=-1, axis=0)
        squareaccum += np.roll(squareaccum, shift=-1, axis=1)
        maparray[stepsize // 2:mapsize:stepsize,
                 stepsize // 2:mapsize:stepsize] = wibbledmean(squareaccum)

    def filldiamonds():
        drgrid = maparray[stepsize // 2:mapsize:stepsize,
                          stepsize // 2:mapsize:stepsize]
        ulgrid = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        ldrsum = drgrid + np.roll(drgrid, 1, axis=0)
        lulsum = ulgrid + np.roll(ulgrid, -1, axis=1)
        maparray[0:mapsize:stepsize,
                 stepsize // 2:mapsize:stepsize] = wibbledmean(ldrsum + lulsum)
        tdrsum = drgrid + np.roll(drgrid, 1, axis=1)
        tulsum = ulgrid + np.roll(ulgrid, -1, axis=0)
        maparray[stepsize // 2:mapsize:stepsize,
                 0:mapsize:stepsize] = wibbledmean(tdrsum + tulsum)

    while stepsize >= 2:
        fillsquares()
        filldiamonds()
        stepsize //= 2
        wibble /= wibbledecay

    maparray -= maparray.min()
    return maparray / maparray.max()


_YCBCR = np.array([[0.299, 0.587, 0.114],
                   [-0.299 * 0.564, -0.587 * 0.564, (1 - 0.114) * 0.564],
                   [(1 - 0.299) * 0.713, -0.587 * 0.713, -0.114 * 0.713]],
                  dtype=np.float64)
_YCBCR_INV = np.linalg.inv(_YCBCR)


# --------------------------------------------------------------------------
# the sixteen transforms (float [0,1] in, float out; clipping is central)


def _brightness(x, p, rng):
    shift = float(p["shift"])
    value = x.max(axis=2)
    target = np.clip(value + shift, 0.0, 1.0)
    ratio = np.divide(target, value, out=np.zeros_like(value), where=value > 0)
    out = x * ratio[:, :, None]
    # pure-black pixels have no hue/saturation: lift them to gray directly
    out[value == 0] = min(shift, 1.0)
    return out


def _dark(x, p, rng):
    return np.power(x, float(p["gamma"])) * float(p["scale"])


def _contrast(x, p, rng):
    scale = 1.0 - float(p["strength"])
    means = x.mean(axis=(0, 1), keepdims=True)
    return (x - means) * scale + means


def _defocus_blur(x, p, rng):
    kernel = _disk_kernel(float(p["radius"]), float(p["alias_blur"]))
    return _convolve_rgb(x, kernel)


def _motion_blur(x, p, rng):
    angle = rng.uniform(-45.0, 45.0)
    kernel = _line_kernel(int(p["radius"]), float(p["sigma"]), angle)
    return _convolve_rgb(x, kernel)


def _zoom_blur(x, p, rng):
    h, w = x.shape[:2]
    factors = np.arange(1.0, float(p["max_zoom"]), float(p["step"]))
    acc = x.astype(np.float64).copy()
    for z in factors:
        ch = int(np.ceil(h / z))
        cw = int(np.ceil(w / z))
        top = (h - ch) // 2
        left = (w - cw) // 2
        acc += _resize_bilinear(x[top:top + ch, left:left + cw], h, w)
    return (acc / (len(factors) + 1)).astype(np.float32)


def _gaussian_blur(x, p, rng):
    sigma = float(p["sigma"])
    out = np.empty_like(x)
    for c in range(3):
        out[:, :, c] = ndimage.gaussian_filter(x[:, :, c], sigma, mode="nearest")
    return out


def _smoke(x, p, rng):
    h, w = x.shape[:2]
    mapsize = 2 ** int(np.ceil(np.log2(max(h, w, 32))))
    plasma = _plasma_fractal(mapsize, float(p["decay"]), rng)[:h, :w]
    alpha = np.clip(float(p["intensity"]) * plasma, 0.0, 1.0)[:, :, None]
    alpha = alpha.astype(np.float32)
    return x * (1.0 - alpha) + float(p["gray"]) * alpha


_WATER_COLOR = np.array([175, 238, 238], dtype=np.float32) / 255.0
_MUD_COLOR = np.array([63, 42, 20], dtype=np.float32) / 255.0


def _spatter(x, p, rng):
    h, w = x.shape[:2]
    field = float(p["loc"]) + float(p["scale"]) * rng.standard_normal((h, w))
    blurred = ndimage.gaussian_filter(field, float(p["sigma"]), mode="nearest")
    thresh = float(p["thresh"])
    strength = float(p["strength"])
    opacity = float(p["intensity_scale"])
    if p["mode"] == "water":
        layer = np.clip((blurred - thresh) * float(p["gain"]), 0.0, 1.0)
        m = np.clip(layer * strength * opacity, 0.0, 1.0).astype(np.float32)
        color = _WATER_COLOR
    elif p["mode"] == "mud":
        mask = (blurred >= thresh).astype(np.float64)
        m = ndimage.gaussian_filter(mask, strength, mode="nearest")
        m[m < 0.8] = 0.0
        m = np.clip(m * opacity, 0.0, 1.0).astype(np.float32)
        color = _MUD_COLOR
    else:
        raise InvalidSpecError(f"unknown spatter mode {p['mode']!r}")
    m = m[:, :, None]
    return x * (1.0 - m) + color * m


def _gaussian_noise(x, p, rng):
    return x + rng.standard_normal(x.shape).astype(np.float32) * float(p["sigma"])


def _impulse_noise(x, p, rng):
    amount = float(p["amount"])
    r = rng.random(x.shape)
    out = x.copy()
    out[r < amount / 2] = 1.0
    out[r > 1.0 - amount / 2] = 0.0
    return out


def _shot_noise(x, p, rng):
    ns = float(p["noise_scale"])
    return (rng.poisson(x / ns) * ns).astype(np.float32)


def _iso_noise(x, p, rng):
    ns = float(p["noise_scale"])
    chroma = float(p["chroma_sigma"])
    ycc = x.astype(np.float64) @ _YCBCR.T
    luma = np.clip(ycc[:, :, 0], 0.0, None)
    ycc[:, :, 0] = rng.poisson(luma / ns) * ns
    ycc[:, :, 1] += rng.standard_normal(luma.shape) * chroma
    ycc[:, :, 2] += rng.standard_normal(luma.shape) * chroma
    return (ycc @ _YCBCR_INV.T).astype(np.float32)


def jpeg_roundtrip(image_u8: np.ndarray, quality: int) -> tuple[np.ndarray, bytes]:
    """Encode to baseline 4:2:0 JPEG and decode; returns (pixels, jpeg bytes)."""
    buf = BytesIO()
    Image.fromarray(image_u8, mode="RGB").save(
        buf, format="JPEG", quality=int(quality), subsampling=2)
    data = buf.getvalue()
    with Image.open(BytesIO(data)) as img:
        decoded = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return decoded, data


def _jpeg_compression(x, p, rng):
    decoded, _ = jpeg_roundtrip(to_uint8(x), int(p["quality"]))
    return to_float(decoded)


def _pixelate(x, p, rng):
    factor = float(p["factor"])
    img = Image.fromarray(to_uint8(x), mode="RGB")
    w, h = img.size
    small = img.resize((max(1, round(w / factor)), max(1, round(h / factor))),
                       Image.BOX)
    return to_float(np.asarray(small.resize((w, h), Image.NEAREST), dtype=np.uint8))


def _color_quant(x, p, rng):
    step = int(p["step"])
    if step < 1 or step & (step - 1):
        raise InvalidSpecError(f"color_quant step must be a power of two, got {step}")
    shift = step.bit_length() - 1
    u8 = to_uint8(x)
    return to_float((u8 >> shift) << shift)


_TRANSFORMS = {
    "brightness": _brightness,
    "dark": _dark,
    "contrast": _contrast,
    "defocus_blur": _defocus_blur,
    "motion_blur": _motion_blur,
    "zoom_blur": _zoom_blur,
    "gaussian_blur": _gaussian_blur,
    "smoke": _smoke,
    "spatter": _spatter,
    "gaussian_noise": _gaussian_noise,
    "impulse_noise": _impulse_noise,
    "shot_noise": _shot_noise,
    "iso_noise": _iso_noise,
    "jpeg_compression": _jpeg_compression,
    "pixelate": _pixelate,
    "color_quant": _color_quant,
}

assert set(_TRANSFORMS) == set(CORRUPTION_TYPES)


def apply(image: np.ndarray, spec: CorruptionSpec,
          params: SeverityParamTable) -> np.ndarray:
    """Apply one corruption at one severity to an RGB image.

    Severity 0 returns a bit-identical copy for every type and seed. Output
    always matches the input's shape and dtype, with channels saturated to
    [0, 255].

    Raises:
        InvalidSpecError: unknown type tag or severity outside 0-5.
        ConfigError: the parameter table lacks the (type, severity) row.
    """
    arr = ensure_rgb(image)
    if spec.ctype not in _TRANSFORMS:
        raise InvalidSpecError(f"unknown corruption type {spec.ctype!r}")
    if not 0 <= int(spec.severity) <= 5:
        raise InvalidSpecError(f"severity must be in [0, 5], got {spec.severity}")
    if spec.severity == 0:
        return arr.copy()
    p = params.get(spec.ctype, int(spec.severity))
    rng = make_rng(spec.seed)
    out = _TRANSFORMS[spec.ctype](to_float(arr), p, rng)
    return to_uint8(np.clip(out, 0.0, 1.0))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB over all channels, peak 255.

    Returns +inf for identical images.

    Raises:
        ShapeError: operand dimensions differ.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"psnr operands differ in shape: {a.shape} vs {b.shape}")
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)
