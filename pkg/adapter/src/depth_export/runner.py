"""Export run: drive a depth model over clean and corrupted frames.

The model is named either as an import path ``pkg.module:callable`` or as
a command template. An imported callable receives a uint8 image batch of
shape (N, H, W, 3) and returns an (N, H, W) float array; callables that
accept a second parameter also receive the source paths (useful for
stubs and models that need per-frame context). A command template is a
shell-style string containing ``{batch}``; the adapter substitutes the
path of a JSON file ``{"inputs": [...], "outputs": [...]}`` and expects
the command to write one float32 ``.npy`` per output path.

Model outputs declared as inverse depth or disparity are converted to
metric depth before writing, so the harness only ever sees depth.
"""

from __future__ import annotations

import importlib
import inspect
import json
import logging
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .formats import FORMATS, FormatError, suffix_for, write_depth_atomic

log = logging.getLogger(__name__)

CONVERSIONS = ("depth", "inverse_depth", "disparity")


class ExportError(Exception):
    """Configuration or model-loading failure that prevents the run."""


@dataclass(frozen=True)
class ExportConfig:
    manifest: Path
    output_root: Path
    corrupted_root: Path | None = None
    model: str = ""            # "pkg.module:callable" or a command template
    fmt: str = "png16"
    conversion: str = "depth"
    conversion_scale: float = 1.0
    batch_size: int = 8
    device: str = "cpu"        # hint forwarded to imported models via attribute
    types: tuple[str, ...] | None = None       # None = every type found on disk
    severities: tuple[int, ...] = (1, 2, 3, 4, 5)

    def __post_init__(self):
        object.__setattr__(self, "manifest", Path(self.manifest))
        object.__setattr__(self, "output_root", Path(self.output_root))
        if self.corrupted_root is not None:
            object.__setattr__(self, "corrupted_root", Path(self.corrupted_root))
        if self.fmt not in FORMATS:
            raise ExportError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        if self.conversion not in CONVERSIONS:
            raise ExportError(
                f"conversion must be one of {CONVERSIONS}, got {self.conversion!r}")
        if self.batch_size < 1:
            raise ExportError("batch_size must be >= 1")
        if not self.model:
            raise ExportError("a model entry point or command template is required")


@dataclass
class ExportReport:
    attempted: int = 0
    succeeded: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)
    frame_seconds: dict[str, float] = field(default_factory=dict)

    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class _Unit:
    """One prediction to produce: a source image and its output slot."""

    key: str                  # "<ctype>/<severity>/<frame_id>" or "clean/<frame_id>"
    image_path: Path
    out_path: Path


def load_model(spec: str, device: str = "cpu"):
    """Resolve an import-path model; command templates pass through as-is.

    Raises:
        ExportError: the import path cannot be resolved.
    """
    if ":" not in spec or "{batch}" in spec:
        return spec  # command template, handled at batch time
    module_name, _, attr = spec.partition(":")
    try:
        module = importlib.import_module(module_name)
        fn = getattr(module, attr)
    except (ImportError, AttributeError) as exc:
        raise ExportError(f"cannot load model {spec!r}: {exc}") from exc
    if hasattr(fn, "device"):
        try:
            fn.device = device
        except Exception:  # read-only attribute: the hint is best-effort
            pass
    return fn


def _read_manifest(path: Path) -> tuple[Path, list[dict]]:
    if not path.is_file():
        raise ExportError(f"manifest not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    root = Path(data["root"])
    if not root.is_absolute():
        root = (path.parent / root).resolve()
    return root, list(data["frames"])


def _collect_units(config: ExportConfig) -> list[_Unit]:
    root, frames = _read_manifest(config.manifest)
    suffix = suffix_for(config.fmt)
    units = [
        _Unit(key=f"clean/{rec['frame_id']}",
              image_path=root / rec["rgb"],
              out_path=config.output_root / "clean" / f"{rec['frame_id']}{suffix}")
        for rec in frames
    ]
    if config.corrupted_root is not None:
        if config.types is None:
            types = sorted(p.name for p in config.corrupted_root.iterdir()
                           if p.is_dir())
        else:
            types = list(config.types)
        for ctype in types:
            for severity in config.severities:
                cell = config.corrupted_root / ctype / str(severity)
                for rec in frames:
                    units.append(_Unit(
                        key=f"{ctype}/{severity}/{rec['frame_id']}",
                        image_path=cell / f"{rec['frame_id']}.png",
                        out_path=(config.output_root / ctype / str(severity)
                                  / f"{rec['frame_id']}{suffix}")))
    return units


def _to_depth(raw: np.ndarray, config: ExportConfig) -> np.ndarray:
    out = np.asarray(raw, dtype=np.float32)
    if config.conversion == "depth":
        return out
    # inverse depth / disparity: positive outputs map to scale / x
    safe = np.where(out > 1e-12, out, np.nan)
    return (config.conversion_scale / safe).astype(np.float32)


def _run_command_batch(template: str, images: list[Path],
                       out_dir: Path) -> list[np.ndarray]:
    out_paths = [out_dir / f"pred_{i:05d}.npy" for i in range(len(images))]
    batch_file = out_dir / "batch.json"
    batch_file.write_text(json.dumps({
        "inputs": [str(p) for p in images],
        "outputs": [str(p) for p in out_paths],
    }), encoding="utf-8")
    argv = [arg.replace("{batch}", str(batch_file))
            for arg in shlex.split(template)]
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(
            f"model command failed ({proc.returncode}): {proc.stderr.strip()}")
    return [np.load(p) for p in out_paths]


def _predict(model, images: list[np.ndarray], paths: list[Path],
             workdir: Path) -> list[np.ndarray]:
    if isinstance(model, str):
        return _run_command_batch(model, paths, workdir)
    batch = np.stack(images)
    try:
        n_params = len(inspect.signature(model).parameters)
    except (TypeError, ValueError):
        n_params = 1
    preds = model(batch, [str(p) for p in paths]) if n_params >= 2 else model(batch)
    return [np.asarray(p) for p in preds]


def export_run(config: ExportConfig) -> ExportReport:
    """Produce predictions for every clean and corrupted frame.

    Inputs are read-only; outputs are written atomically. Per-unit
    failures (missing input, inference error, format overflow) are
    recorded and the run continues. A ``resolutions.jsonl`` sidecar
    records each prediction's native grid size.
    """
    model = load_model(config.model, config.device)
    units = _collect_units(config)
    report = ExportReport()
    config.output_root.mkdir(parents=True, exist_ok=True)
    sidecar = open(config.output_root / "resolutions.jsonl", "w",
                   encoding="utf-8")
    try:
        with tempfile.TemporaryDirectory() as tmp:
            workdir = Path(tmp)
            for lo in range(0, len(units), config.batch_size):
                chunk = units[lo:lo + config.batch_size]
                report.attempted += len(chunk)
                images, live = [], []
                for unit in chunk:
                    try:
                        with Image.open(unit.image_path) as img:
                            images.append(np.array(img.convert("RGB"),
                                                   dtype=np.uint8))
                        live.append(unit)
                    except OSError as exc:
                        report.failures.append((unit.key, f"unreadable input: {exc}"))
                if not live:
                    continue
                started = time.perf_counter()
                try:
                    preds = _predict(model, images,
                                     [u.image_path for u in live], workdir)
                except Exception as exc:
                    for unit in live:
                        report.failures.append((unit.key, f"inference: {exc}"))
                    continue
                per_unit = (time.perf_counter() - started) / len(live)
                if len(preds) != len(live):
                    for unit in live:
                        report.failures.append(
                            (unit.key, f"model returned {len(preds)} predictions "
                                       f"for {len(live)} inputs"))
                    continue
                for unit, raw in zip(live, preds):
                    try:
                        depth = _to_depth(raw, config)
                        write_depth_atomic(unit.out_path, depth, config.fmt)
                    except (FormatError, ValueError) as exc:
                        report.failures.append((unit.key, str(exc)))
                        continue
                    report.succeeded += 1
                    report.frame_seconds[unit.key] = per_unit
                    sidecar.write(json.dumps(
                        {"key": unit.key, "width": int(depth.shape[1]),
                         "height": int(depth.shape[0])}, sort_keys=True) + "\n")
    finally:
        sidecar.close()
    assert report.attempted == report.succeeded + len(report.failures)
    log.info("export: %d/%d predictions written, %d failures",
             report.succeeded, report.attempted, len(report.failures))
    return report
