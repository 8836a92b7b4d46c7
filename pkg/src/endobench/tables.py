"""Severity-table CSV blocks: parsing, emission, and bundled fixtures.

A block is one corruption's results for one model: a header plus six rows
(severity 0..5) of the seven metrics. Leading ``# key: value`` comment
lines carry block metadata (model, corruption, the published score, and
any erratum annotation). The bundled fixtures ship one file per
(model, corruption) under ``fixtures/<model>/``, transcribed from the
published result tables.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .depth_metrics import METRIC_NAMES
from .ders import SeveritySeries
from .errors import TableError

_HEADER = ("severity",) + METRIC_NAMES

FIXTURES_ENV = "ENDOBENCH_FIXTURES"


def from_table(text: str) -> SeveritySeries:
    """Parse a severity-table block into a SeveritySeries.

    Raises:
        TableError: wrong header, wrong row count, non-numeric cells, or
            invariant violations (negative errors, accuracies outside [0, 1]).
    """
    rows: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    if not rows:
        raise TableError("empty table block")
    header = tuple(cell.lower() for cell in rows[0])
    if header != _HEADER:
        raise TableError(f"unexpected header {rows[0]!r}, want {list(_HEADER)}")
    body = rows[1:]
    if len(body) != 6:
        raise TableError(f"expected 6 severity rows, got {len(body)}")
    values = np.empty((7, 6), dtype=np.float64)
    for j, row in enumerate(body):
        if len(row) != 8:
            raise TableError(f"severity row {j} has {len(row)} cells, want 8")
        try:
            severity = int(row[0])
            cells = [float(c) for c in row[1:]]
        except ValueError as exc:
            raise TableError(f"non-numeric cell in severity row {j}: {exc}") from exc
        if severity != j:
            raise TableError(f"severity rows out of order: row {j} says {severity}")
        values[:, j] = cells
    return SeveritySeries(values)


def parse_metadata(text: str) -> dict[str, str]:
    """Read ``# key: value`` comment lines from a block."""
    meta: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line.startswith("#"):
            continue
        payload = line.lstrip("#").strip()
        if ":" in payload:
            key, value = payload.split(":", 1)
            meta[key.strip()] = value.strip()
    return meta


def emit_table(series: SeveritySeries, metadata: dict[str, str] | None = None) -> str:
    """Render a series back to the block format (6 significant digits)."""
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}: {value}")
    lines.append(",".join(_HEADER))
    for j in range(6):
        cells = [str(j)] + [f"{series.values[i, j]:.6g}" for i in range(7)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_block(path: str | Path) -> tuple[SeveritySeries, dict[str, str]]:
    """Load one block file: (series, metadata)."""
    text = Path(path).read_text(encoding="utf-8")
    return from_table(text), parse_metadata(text)


def fixtures_root(override: str | Path | None = None) -> Path:
    """Bundled fixture directory, unless overridden by argument or env var."""
    if override is not None:
        return Path(override)
    env = os.environ.get(FIXTURES_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("endobench").joinpath("fixtures")))


def list_models(root: Path) -> list[str]:
    if not root.is_dir():
        raise TableError(f"fixtures directory not found: {root}")
    return sorted(p.name for p in root.iterdir()
                  if p.is_dir() and (p / "model.json").is_file())


def load_model_meta(root: Path, model: str) -> dict:
    meta_path = root / model / "model.json"
    if not meta_path.is_file():
        raise TableError(f"missing model metadata: {meta_path}")
    return json.loads(meta_path.read_text(encoding="utf-8"))


def load_model_blocks(root: Path, model: str) -> dict[str, tuple[SeveritySeries, dict]]:
    """All corruption blocks for one model, keyed by corruption tag."""
    model_dir = root / model
    if not model_dir.is_dir():
        raise TableError(f"fixtures directory not found: {model_dir}")
    blocks = {}
    for path in sorted(model_dir.glob("*.csv")):
        series, meta = load_block(path)
        tag = meta.get("corruption", path.stem)
        blocks[tag] = (series, meta)
    if not blocks:
        raise TableError(f"no fixture blocks under {model_dir}")
    return blocks
