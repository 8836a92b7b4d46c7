"""Corrupted-tree generation and reproducibility auditing.

Output layout is ``<output_root>/<ctype>/<severity>/<frame_id>.png``. Every
written file is journaled to ``<output_root>/index.jsonl`` (append-only) with
a SHA-256 over its decoded pixel bytes, so a rerun skips completed entries
and verification is immune to PNG encoder differences.

Generation parallelizes over frames; randomness is keyed per
(frame, type, severity) through the seed-derivation contract, so hashes are
identical for any worker count or completion order. The journal has a
single writer (the coordinating thread).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corruptions import CorruptionSpec, apply, jpeg_roundtrip
from .errors import BenchmarkError, InvalidSpecError
from .image_io import load_rgb, save_rgb
from .manifest import DatasetManifest, FrameEntry
from .seeding import derive_seed
from .severity_params import SeverityParamTable
from .taxonomy import CORRUPTION_TYPES, SEVERITY_LEVELS

log = logging.getLogger(__name__)

INDEX_NAME = "index.jsonl"


@dataclass(frozen=True)
class CorruptionRun:
    """One generation request over a manifest."""

    global_seed: int
    output_root: Path
    types: tuple[str, ...] = CORRUPTION_TYPES
    severities: tuple[int, ...] = SEVERITY_LEVELS
    workers: int | None = None
    debug_jpeg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "output_root", Path(self.output_root))
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "severities", tuple(int(s) for s in self.severities))
        unknown = set(self.types) - set(CORRUPTION_TYPES)
        if unknown:
            raise InvalidSpecError(f"unknown corruption types: {sorted(unknown)}")
        bad = set(self.severities) - set(SEVERITY_LEVELS)
        if bad:
            raise InvalidSpecError(
                f"severities must be within 1..5 (clean frames are referenced, "
                f"never duplicated); got {sorted(bad)}")
        if not self.types or not self.severities:
            raise InvalidSpecError("run needs at least one type and one severity")


@dataclass(frozen=True)
class IndexEntry:
    frame_id: str
    ctype: str
    severity: int
    path: str  # relative to the output root
    pixel_sha256: str
    params_version: str

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.frame_id, self.ctype, self.severity)


@dataclass
class OutputIndex:
    """Map (frame_id, ctype, severity) -> journaled output entry."""

    entries: dict[tuple[str, str, int], IndexEntry] = field(default_factory=dict)

    def add(self, entry: IndexEntry) -> None:
        self.entries[entry.key] = entry

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(self.entries):
                fh.write(_entry_line(self.entries[key]))

    @classmethod
    def load(cls, path: str | Path) -> "OutputIndex":
        index = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                index.add(IndexEntry(
                    frame_id=rec["frame_id"], ctype=rec["ctype"],
                    severity=int(rec["severity"]), path=rec["path"],
                    pixel_sha256=rec["pixel_sha256"],
                    params_version=rec["params_version"]))
        return index


def _entry_line(entry: IndexEntry) -> str:
    rec = {"frame_id": entry.frame_id, "ctype": entry.ctype,
           "severity": entry.severity, "path": entry.path,
           "pixel_sha256": entry.pixel_sha256,
           "params_version": entry.params_version}
    return json.dumps(rec, sort_keys=True) + "\n"


def pixel_hash(image: np.ndarray) -> str:
    """SHA-256 over raw row-major pixel bytes (codec-independent)."""
    return hashlib.sha256(np.ascontiguousarray(image).tobytes()).hexdigest()


def _corrupt_frame(frame: FrameEntry, run: CorruptionRun,
                   params: SeverityParamTable,
                   todo: list[tuple[str, int]]) -> list[IndexEntry]:
    image = load_rgb(frame.rgb_path)
    entries = []
    for ctype, severity in todo:
        seed = derive_seed(run.global_seed, frame.frame_id, ctype, severity)
        out = apply(image, CorruptionSpec(ctype, severity, seed), params)
        rel = Path(ctype) / str(severity) / f"{frame.frame_id}.png"
        target = run.output_root / rel
        save_rgb(target, out)
        if run.debug_jpeg and ctype == "jpeg_compression":
            quality = int(params.get(ctype, severity)["quality"])
            _, data = jpeg_roundtrip(image, quality)
            target.with_suffix(".jpg").write_bytes(data)
        entries.append(IndexEntry(
            frame_id=frame.frame_id, ctype=ctype, severity=severity,
            path=str(rel), pixel_sha256=pixel_hash(out),
            params_version=params.version))
    return entries


def generate_corrupted_tree(manifest: DatasetManifest, run: CorruptionRun,
                            params: SeverityParamTable,
                            progress=None) -> OutputIndex:
    """Generate the corrupted tree for a run; returns its complete index.

    Resumable: entries already journaled (with their file present) are
    skipped. Rerunning with identical inputs reproduces identical hashes.

    Raises:
        BenchmarkError: output root equals the manifest root.
    """
    out_root = Path(run.output_root)
    if out_root.resolve() == manifest.root.resolve():
        raise BenchmarkError(
            f"output root must differ from the manifest root ({manifest.root})")
    out_root.mkdir(parents=True, exist_ok=True)

    journal_path = out_root / INDEX_NAME
    existing = OutputIndex.load(journal_path) if journal_path.is_file() else OutputIndex()

    severities = tuple(sorted(run.severities))
    index = OutputIndex()
    plan: list[tuple[FrameEntry, list[tuple[str, int]]]] = []
    for frame in manifest.frames:
        todo = []
        for ctype in run.types:
            for severity in severities:
                key = (frame.frame_id, ctype, severity)
                prior = existing.entries.get(key)
                if prior is not None and (out_root / prior.path).is_file():
                    index.add(prior)
                else:
                    todo.append((ctype, severity))
        if todo:
            plan.append((frame, todo))

    done = len(index)
    total = len(manifest.frames) * len(run.types) * len(severities)
    if done:
        log.info("resuming run: %d/%d entries already journaled", done, total)

    workers = run.workers or os.cpu_count() or 1
    with open(journal_path, "a", encoding="utf-8") as journal:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_corrupt_frame, frame, run, params, todo)
                       for frame, todo in plan]
            for future in futures:
                for entry in future.result():
                    index.add(entry)
                    journal.write(_entry_line(entry))
                    done += 1
                journal.flush()
                if progress is not None:
                    progress(done, total)

    assert len(index) == total
    return index


@dataclass
class IndexVerification:
    """verify_index result: discrepancies are content, not failures."""

    matched: list[tuple[str, str, int]] = field(default_factory=list)
    mismatched: list[tuple[str, str, int]] = field(default_factory=list)
    missing: list[tuple[str, str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatched and not self.missing


def verify_index(index: OutputIndex, root: str | Path) -> IndexVerification:
    """Re-hash every indexed file and report matches/mismatches/missing."""
    root = Path(root)
    result = IndexVerification()
    for key in sorted(index.entries):
        entry = index.entries[key]
        target = root / entry.path
        if not target.is_file():
            result.missing.append(key)
            continue
        try:
            digest = pixel_hash(load_rgb(target))
        except Exception:
            result.mismatched.append(key)
            continue
        if digest == entry.pixel_sha256:
            result.matched.append(key)
        else:
            result.mismatched.append(key)
    return result
