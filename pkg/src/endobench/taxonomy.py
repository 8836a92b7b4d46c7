"""The 16 corruption types, their five categories, and per-type metadata."""

from __future__ import annotations

CATEGORY_ILLUMINATION = "Illumination Variability"
CATEGORY_OPTICS = "Optic Distortions"
CATEGORY_OBSTRUCTION = "Visual Obstructions"
CATEGORY_NOISE = "Sensor and Electronic Noise"
CATEGORY_DIGITAL = "Data Compression and Digital Artifacts"

CATEGORIES: dict[str, str] = {
    "brightness": CATEGORY_ILLUMINATION,
    "dark": CATEGORY_ILLUMINATION,
    "contrast": CATEGORY_ILLUMINATION,
    "defocus_blur": CATEGORY_OPTICS,
    "motion_blur": CATEGORY_OPTICS,
    "zoom_blur": CATEGORY_OPTICS,
    "gaussian_blur": CATEGORY_OPTICS,
    "smoke": CATEGORY_OBSTRUCTION,
    "spatter": CATEGORY_OBSTRUCTION,
    "gaussian_noise": CATEGORY_NOISE,
    "impulse_noise": CATEGORY_NOISE,
    "shot_noise": CATEGORY_NOISE,
    "iso_noise": CATEGORY_NOISE,
    "jpeg_compression": CATEGORY_DIGITAL,
    "pixelate": CATEGORY_DIGITAL,
    "color_quant": CATEGORY_DIGITAL,
}

CORRUPTION_TYPES: tuple[str, ...] = tuple(CATEGORIES)

SEVERITY_LEVELS: tuple[int, ...] = (1, 2, 3, 4, 5)

# Types whose output is a pure function of (image, severity, params); the
# seed never enters. The other seven draw from the per-frame generator.
DETERMINISTIC_TYPES: frozenset[str] = frozenset({
    "brightness",
    "dark",
    "contrast",
    "defocus_blur",
    "zoom_blur",
    "gaussian_blur",
    "jpeg_compression",
    "pixelate",
    "color_quant",
})

# Designated magnitude parameter per type and whether the severity schedule
# must be non-decreasing ("up") or non-increasing ("down") in it. JPEG
# quality is the one sanctioned "down" schedule.
MAGNITUDE_PARAMS: dict[str, tuple[str, str]] = {
    "brightness": ("shift", "up"),
    "dark": ("gamma", "up"),
    "contrast": ("strength", "up"),
    "defocus_blur": ("radius", "up"),
    "motion_blur": ("sigma", "up"),
    "zoom_blur": ("max_zoom", "up"),
    "gaussian_blur": ("sigma", "up"),
    "smoke": ("intensity", "up"),
    "spatter": ("loc", "up"),
    "gaussian_noise": ("sigma", "up"),
    "impulse_noise": ("amount", "up"),
    "shot_noise": ("noise_scale", "up"),
    "iso_noise": ("noise_scale", "up"),
    "jpeg_compression": ("quality", "down"),
    "pixelate": ("factor", "up"),
    "color_quant": ("step", "up"),
}
