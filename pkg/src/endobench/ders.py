"""Composite robustness score: error, accuracy, and robustness components.

A severity series is a 7x6 matrix: rows in the fixed metric order
[AbsRel, SqRel, RMSE, LogRMSE, a1, a2, a3], columns indexed 0..5 where
column 0 holds the clean (uncorrupted) result and columns 1..5 the five
corruption severities.

Components over a series M:

* error:      E = sum_{i in 4 error rows} (sum_{j=1..5} M_ij) / (5 * M_i0),
  the clean column enters only as the normalizer (floored at epsilon).
* accuracy:   A = sum_{k in 3 accuracy rows} (W_k / 6) * sum_{j=0..5} M_kj,
  the clean column is included.
* robustness: per metric, the RMS deviation of the five corrupted values
  from a reference, averaged over all 7 metrics and scaled by lambda. The
  default reference is the corrupted values' own mean (the population
  standard deviation) -- the definition that reproduces the published
  score tables. ``deviation="clean"`` instead measures deviation from the
  clean column. An optional flag normalizes each metric's deviation by its
  clean value for scale-free sensitivity studies.

The final score is (E / A) * exp(-R); lower is more robust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .depth_metrics import METRIC_NAMES
from .errors import TableError

NUM_METRICS = 7
NUM_ERROR_ROWS = 4
NUM_LEVELS = 5  # corruption severities 1..5; column 0 is clean


@dataclass(frozen=True)
class DersWeights:
    """Scoring knobs: accuracy weights, robustness factor, numeric floor."""

    w: tuple[float, float, float] = (0.5, 0.3, 0.2)
    lam: float = 1.0
    epsilon: float = 1e-9
    deviation: str = "mean"  # or "clean"
    normalize_robustness: bool = False

    def __post_init__(self):
        if len(self.w) != 3 or any(x < 0 for x in self.w):
            raise ValueError("w must be three non-negative weights")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.deviation not in ("mean", "clean"):
            raise ValueError(f"unknown deviation mode {self.deviation!r}")


@dataclass(frozen=True)
class DersBreakdown:
    """The three components and the composite score for one corruption."""

    error: float
    accuracy: float
    robustness: float
    score: float


class SeveritySeries:
    """Validated 7x6 metric-by-severity matrix."""

    def __init__(self, values: np.ndarray):
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (NUM_METRICS, NUM_LEVELS + 1):
            raise TableError(
                f"severity series must be 7x6, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise TableError("severity series contains non-finite cells")
        if np.any(arr[:NUM_ERROR_ROWS] < 0):
            raise TableError("error rows must be non-negative")
        acc = arr[NUM_ERROR_ROWS:]
        if np.any(acc < 0) or np.any(acc > 1):
            raise TableError("accuracy rows must lie in [0, 1]")
        self.values = arr

    def row(self, metric: str) -> np.ndarray:
        return self.values[METRIC_NAMES.index(metric)]

    def __eq__(self, other):
        return isinstance(other, SeveritySeries) and np.array_equal(
            self.values, other.values)


def error_component(series: SeveritySeries, weights: DersWeights | None = None) -> float:
    """Normalized corrupted-to-clean error ratio, summed over the 4 error rows."""
    weights = weights or DersWeights()
    m = series.values
    clean = np.maximum(m[:NUM_ERROR_ROWS, 0], weights.epsilon)
    corrupted = m[:NUM_ERROR_ROWS, 1:].sum(axis=1)
    return float(np.sum(corrupted / (NUM_LEVELS * clean)))


def accuracy_component(series: SeveritySeries, weights: DersWeights | None = None) -> float:
    """Weighted mean accuracy over all six severity columns, clean included."""
    weights = weights or DersWeights()
    acc = series.values[NUM_ERROR_ROWS:]
    per_threshold = acc.sum(axis=1) / (NUM_LEVELS + 1)
    return float(np.dot(weights.w, per_threshold))


def robustness_component(series: SeveritySeries, weights: DersWeights | None = None) -> float:
    """Mean per-metric RMS deviation of the corrupted columns, scaled by lambda."""
    weights = weights or DersWeights()
    m = series.values
    corrupted = m[:, 1:]
    if weights.deviation == "clean":
        ref = m[:, :1]
    else:
        ref = corrupted.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.mean((corrupted - ref) ** 2, axis=1))
    if weights.normalize_robustness:
        rms = rms / np.maximum(np.abs(m[:, 0]), weights.epsilon)
    return float(weights.lam / NUM_METRICS * rms.sum())


def ders(series: SeveritySeries, weights: DersWeights | None = None) -> DersBreakdown:
    """Full breakdown (E, A, R, score) for one corruption's severity series.

    Raises:
        TableError: the accuracy component is not positive.
    """
    weights = weights or DersWeights()
    e = error_component(series, weights)
    a = accuracy_component(series, weights)
    if a <= 0:
        raise TableError("degenerate accuracy component (A <= 0)")
    r = robustness_component(series, weights)
    return DersBreakdown(error=e, accuracy=a, robustness=r,
                         score=(e / a) * math.exp(-r))


def mean_ders(scores: dict[str, float]) -> float:
    """Arithmetic mean of per-corruption scores.

    Raises:
        ValueError: empty map.
    """
    if not scores:
        raise ValueError("mean_ders needs at least one score")
    return math.fsum(scores.values()) / len(scores)
