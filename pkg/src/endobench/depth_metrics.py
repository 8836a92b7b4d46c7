"""Per-frame depth metrics and dataset aggregation.

Implements the standard monocular evaluation protocol: a validity mask on
ground truth, optional per-frame median scaling, clamping, and the seven
metrics AbsRel, SqRel, RMSE, LogRMSE, a1, a2, a3 averaged over valid
pixels. Aggregation is the mean of per-frame metrics, accumulated with
compensated summation in canonical frame order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, ShapeError

log = logging.getLogger(__name__)

METRIC_NAMES = ("abs_rel", "sq_rel", "rmse", "log_rmse", "a1", "a2", "a3")
ERROR_METRICS = METRIC_NAMES[:4]
ACCURACY_METRICS = METRIC_NAMES[4:]


@dataclass(frozen=True)
class EvalProtocol:
    """Evaluation settings; defaults follow the endoscopic protocol."""

    min_depth: float = 0.1
    max_depth: float = 150.0
    scaling: str = "per-frame-median"  # or "none"
    threshold_base: float = 1.25
    threshold_powers: tuple[int, ...] = (1, 2, 3)
    clamp_before_scaling: bool = False
    clamp: bool = True

    def __post_init__(self):
        if not 0 < self.min_depth < self.max_depth:
            raise ValueError("require 0 < min_depth < max_depth")
        if self.threshold_base <= 1:
            raise ValueError("threshold_base must exceed 1")
        if self.scaling not in ("none", "per-frame-median"):
            raise ValueError(f"unknown scaling mode {self.scaling!r}")


@dataclass(frozen=True)
class MetricRecord:
    """One frame set's seven metrics, in the fixed row order."""

    abs_rel: float
    sq_rel: float
    rmse: float
    log_rmse: float
    a1: float
    a2: float
    a3: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in METRIC_NAMES)

    @classmethod
    def from_values(cls, values) -> "MetricRecord":
        values = tuple(float(v) for v in values)
        if len(values) != 7:
            raise ValueError(f"expected 7 metric values, got {len(values)}")
        return cls(*values)


def valid_mask(gt: np.ndarray, protocol: EvalProtocol) -> np.ndarray:
    """True exactly where gt is finite, positive, and within depth bounds."""
    gt = np.asarray(gt)
    with np.errstate(invalid="ignore"):
        return (np.isfinite(gt) & (gt > 0)
                & (gt >= protocol.min_depth) & (gt <= protocol.max_depth))


def median_scale(pred: np.ndarray, gt: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Rescale pred so its median over the mask matches gt's.

    Raises:
        EvaluationError: empty mask, or median(pred) is not positive.
    """
    if not np.any(mask):
        raise EvaluationError("median scaling needs at least one valid pixel")
    gt_med = float(np.median(gt[mask]))
    pred_med = float(np.median(pred[mask]))
    if pred_med <= 0:
        raise EvaluationError(
            f"degenerate prediction: median over valid pixels is {pred_med}")
    return pred * (gt_med / pred_med)


def frame_metrics(pred: np.ndarray, gt: np.ndarray,
                  protocol: EvalProtocol | None = None) -> MetricRecord:
    """Seven metrics for one frame, means taken over the valid gt mask.

    Expects pred already resampled to gt's grid. Applies the protocol's
    scaling and clamping before measuring.

    Raises:
        ShapeError: pred and gt grids differ.
        EvaluationError: no valid pixels.
    """
    protocol = protocol or EvalProtocol()
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ShapeError(f"pred shape {pred.shape} != gt shape {gt.shape}")

    mask = valid_mask(gt, protocol)
    if not np.any(mask):
        raise EvaluationError("no valid ground-truth pixels in frame")
    d_gt = gt[mask]
    d_pred = pred[mask]

    if protocol.clamp and protocol.clamp_before_scaling:
        d_pred = np.clip(d_pred, protocol.min_depth, protocol.max_depth)
    if protocol.scaling == "per-frame-median":
        pred_med = float(np.median(d_pred))
        if pred_med <= 0:
            raise EvaluationError(
                f"degenerate prediction: median over valid pixels is {pred_med}")
        d_pred = d_pred * (float(np.median(d_gt)) / pred_med)
    if protocol.clamp and not protocol.clamp_before_scaling:
        d_pred = np.clip(d_pred, protocol.min_depth, protocol.max_depth)

    diff = d_pred - d_gt
    abs_rel = float(np.mean(np.abs(diff) / d_gt))
    sq_rel = float(np.mean(diff**2 / d_gt))
    rmse = float(np.sqrt(np.mean(diff**2)))
    log_rmse = float(np.sqrt(np.mean((np.log(d_pred) - np.log(d_gt)) ** 2)))

    ratio = np.maximum(d_pred / d_gt, d_gt / d_pred)
    accs = [float(np.mean(ratio < protocol.threshold_base**k))
            for k in protocol.threshold_powers]
    return MetricRecord(abs_rel, sq_rel, rmse, log_rmse, *accs)


def resample_pred(pred: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Bilinear resample of a depth grid, excluding invalid cells.

    Invalid cells (non-finite or <= 0) contribute zero weight; output cells
    with no valid support come back as 0 (invalid).
    """
    pred = np.asarray(pred, dtype=np.float64)
    if pred.ndim != 2 or pred.size == 0:
        raise ShapeError(f"expected a nonempty 2-D grid, got shape {pred.shape}")
    if target_w < 1 or target_h < 1:
        raise ShapeError("target dimensions must be >= 1")
    h, w = pred.shape
    if (target_h, target_w) == (h, w):
        return pred.astype(np.float32)

    validity = (np.isfinite(pred) & (pred > 0)).astype(np.float64)
    values = np.where(validity > 0, pred, 0.0)

    ys = (np.arange(target_h) + 0.5) * (h / target_h) - 0.5
    xs = (np.arange(target_w) + 0.5) * (w / target_w) - 0.5
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    y0c, y1c = np.clip(y0, 0, h - 1), np.clip(y0 + 1, 0, h - 1)
    x0c, x1c = np.clip(x0, 0, w - 1), np.clip(x0 + 1, 0, w - 1)

    def blend(grid):
        top = grid[y0c][:, x0c] * (1 - fx) + grid[y0c][:, x1c] * fx
        bot = grid[y1c][:, x0c] * (1 - fx) + grid[y1c][:, x1c] * fx
        return top * (1 - fy) + bot * fy

    num = blend(values)
    den = blend(validity)
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 1e-12)
    return out.astype(np.float32)


def aggregate_frames(records: list[MetricRecord]) -> MetricRecord:
    """Arithmetic mean per metric with Kahan compensation, in list order."""
    if not records:
        raise EvaluationError("cannot aggregate an empty record list")
    total = [0.0] * 7
    comp = [0.0] * 7
    for rec in records:
        for i, v in enumerate(rec.as_tuple()):
            y = v - comp[i]
            t = total[i] + y
            comp[i] = (t - total[i]) - y
            total[i] = t
    n = len(records)
    return MetricRecord.from_values(t / n for t in total)


@dataclass
class FrameEvaluation:
    """Evaluation of an ordered frame set with per-frame records kept."""

    records: dict[str, MetricRecord] = field(default_factory=dict)
    skipped: list[str] = field(default_factory=list)

    def add(self, frame_id: str, record: MetricRecord) -> None:
        self.records[frame_id] = record

    def skip(self, frame_id: str, reason: str) -> None:
        log.warning("skipping frame %s: %s", frame_id, reason)
        self.skipped.append(frame_id)

    def aggregate(self) -> MetricRecord:
        return aggregate_frames(list(self.records.values()))
