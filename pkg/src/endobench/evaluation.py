"""Evaluate prediction trees against a manifest's ground truth.

Predictions mirror the corrupted-tree layout
(``<pred_root>/<ctype>/<severity>/<frame_id>.png|.pfm``); severity-0
predictions come from a dedicated clean directory. Each (corruption,
severity) cell aggregates per-frame metrics into one record; a complete
corruption yields a 7x6 severity series ready for scoring. Missing
predictions and degenerate frames are collected into an exceptions report
and the run continues unless strict mode is on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .depth_io import read_depth
from .depth_metrics import (EvalProtocol, MetricRecord, aggregate_frames,
                            frame_metrics, resample_pred)
from .ders import SeveritySeries
from .errors import EvaluationError
from .manifest import DatasetManifest
from .taxonomy import CORRUPTION_TYPES, SEVERITY_LEVELS

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalException:
    frame_id: str
    ctype: str
    severity: int
    reason: str


@dataclass
class EvaluationResult:
    """Aggregated metrics per (corruption, severity), plus an exceptions report."""

    cells: dict[tuple[str, int], MetricRecord] = field(default_factory=dict)
    per_frame: dict[tuple[str, int], dict[str, MetricRecord]] = field(default_factory=dict)
    exceptions: list[EvalException] = field(default_factory=list)

    def series_for(self, ctype: str, severities=SEVERITY_LEVELS) -> SeveritySeries | None:
        """7x6 series for one corruption, or None if any column is missing."""
        columns = []
        for severity in (0, *severities):
            rec = self.cells.get((ctype, severity))
            if rec is None:
                return None
            columns.append(rec.as_tuple())
        return SeveritySeries(np.asarray(columns, dtype=np.float64).T)

    def complete_series(self, types=CORRUPTION_TYPES,
                        severities=SEVERITY_LEVELS) -> dict[str, SeveritySeries]:
        out = {}
        for ctype in types:
            series = self.series_for(ctype, severities)
            if series is None:
                log.warning("incomplete severity coverage for %s; skipped", ctype)
            else:
                out[ctype] = series
        return out


def _find_prediction(directory: Path, frame_id: str) -> Path | None:
    for suffix in (".png", ".pfm"):
        candidate = directory / f"{frame_id}{suffix}"
        if candidate.is_file():
            return candidate
    return None


def _evaluate_cell(manifest: DatasetManifest, pred_dir: Path, ctype: str,
                   severity: int, protocol: EvalProtocol,
                   result: EvaluationResult, strict: bool) -> None:
    records: dict[str, MetricRecord] = {}
    for frame in manifest.frames:
        if frame.gt_depth_path is None:
            continue
        pred_path = _find_prediction(pred_dir, frame.frame_id)
        if pred_path is None:
            exc = EvalException(frame.frame_id, ctype, severity,
                                f"missing prediction under {pred_dir}")
            if strict:
                raise EvaluationError(f"{exc.reason} for frame {frame.frame_id}")
            result.exceptions.append(exc)
            continue
        gt = read_depth(frame.gt_depth_path)
        pred = read_depth(pred_path)
        if pred.shape != gt.shape:
            pred = resample_pred(pred, gt.shape[1], gt.shape[0])
        try:
            records[frame.frame_id] = frame_metrics(pred, gt, protocol)
        except EvaluationError as err:
            exc = EvalException(frame.frame_id, ctype, severity, str(err))
            if strict:
                raise
            log.warning("skipping frame %s (%s/%s): %s",
                        frame.frame_id, ctype, severity, err)
            result.exceptions.append(exc)
    if records:
        key = (ctype, severity)
        result.per_frame[key] = records
        result.cells[key] = aggregate_frames(list(records.values()))
    else:
        result.exceptions.append(EvalException(
            "*", ctype, severity, f"no predictions evaluated under {pred_dir}"))


def evaluate_tree(manifest: DatasetManifest, pred_root: str | Path,
                  clean_pred_dir: str | Path,
                  types=CORRUPTION_TYPES, severities=SEVERITY_LEVELS,
                  protocol: EvalProtocol | None = None,
                  strict: bool = False) -> EvaluationResult:
    """Evaluate corrupted-tree predictions plus the clean set.

    The clean (severity 0) record is computed once and shared across
    corruptions, mirroring how the severity tables repeat their clean row.
    """
    protocol = protocol or EvalProtocol()
    pred_root = Path(pred_root)
    clean_pred_dir = Path(clean_pred_dir)
    result = EvaluationResult()

    _evaluate_cell(manifest, clean_pred_dir, "clean", 0, protocol, result, strict)
    clean_key = ("clean", 0)
    for ctype in types:
        if clean_key in result.cells:
            result.cells[(ctype, 0)] = result.cells[clean_key]
            result.per_frame[(ctype, 0)] = result.per_frame[clean_key]
        for severity in severities:
            _evaluate_cell(manifest, pred_root / ctype / str(severity),
                           ctype, severity, protocol, result, strict)
    return result
