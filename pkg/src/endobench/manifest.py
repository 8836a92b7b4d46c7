"""Dataset manifests: a frame inventory binding RGB and ground-truth paths.

Manifest files are JSON::

    {"root": ".", "split": "test",
     "frames": [{"frame_id": "...", "rgb": "...", "gt_depth": "...",
                 "sequence": "..."}]}

Paths are relative to ``root``; a relative ``root`` is resolved against the
manifest file's directory. Every referenced file must exist at load time.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError

log = logging.getLogger(__name__)

_SAFE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass(frozen=True)
class FrameEntry:
    frame_id: str
    rgb_path: Path
    gt_depth_path: Path | None
    sequence_id: str


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    split: str
    frames: tuple[FrameEntry, ...]

    def __len__(self) -> int:
        return len(self.frames)

    def frame_ids(self) -> list[str]:
        return [f.frame_id for f in self.frames]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a manifest file.

    Raises:
        ManifestError: missing file, malformed JSON, duplicate or unsafe
            frame ids, or a referenced file that does not exist (the error
            names the offending path).
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ManifestError(f"cannot parse manifest {path}: {exc}") from exc

    for key in ("root", "frames"):
        if key not in data:
            raise ManifestError(f"{path}: manifest lacks '{key}'")
    root = Path(data["root"])
    if not root.is_absolute():
        root = (path.parent / root).resolve()
    if not root.is_dir():
        raise ManifestError(f"{path}: manifest root is not a directory: {root}")

    split = str(data.get("split", ""))
    frames: list[FrameEntry] = []
    seen: set[str] = set()
    for i, rec in enumerate(data["frames"]):
        frame_id = str(rec.get("frame_id", ""))
        if not _SAFE_ID.match(frame_id):
            raise ManifestError(
                f"{path}: frame {i} has unsafe or empty frame_id {frame_id!r}")
        if frame_id in seen:
            raise ManifestError(f"{path}: duplicate frame_id {frame_id!r}")
        seen.add(frame_id)
        rgb = root / rec["rgb"]
        if not rgb.is_file():
            raise ManifestError(f"{path}: frame {frame_id!r} references "
                                f"missing file {rgb}")
        gt = rec.get("gt_depth")
        gt_path = None
        if gt is not None:
            gt_path = root / gt
            if not gt_path.is_file():
                raise ManifestError(f"{path}: frame {frame_id!r} references "
                                    f"missing file {gt_path}")
        frames.append(FrameEntry(frame_id=frame_id, rgb_path=rgb,
                                 gt_depth_path=gt_path,
                                 sequence_id=str(rec.get("sequence", ""))))

    manifest = DatasetManifest(root=root, split=split, frames=tuple(frames))
    if not frames:
        log.warning("manifest %s has an empty frame list", path)
    log.info("loaded manifest %s: %d frames (split=%s)", path, len(frames), split)
    return manifest


def write_manifest(path: str | Path, root: str | Path, frames: list[dict],
                   split: str = "test") -> None:
    """Write a manifest file (paths in *frames* are relative to *root*)."""
    payload = {"root": str(root), "split": split, "frames": frames}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
