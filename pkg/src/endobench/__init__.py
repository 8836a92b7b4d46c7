"""Robustness benchmark toolkit for endoscopic monocular depth estimation.

Synthesizes corrupted image datasets (16 corruption types at 5 severity
levels), evaluates depth predictions with the standard seven-metric
protocol, and scores robustness with a composite error/accuracy/stability
index. Ships reference result tables for two published models and a
verify-paper command that recomputes them.
"""

from .corruptions import CorruptionSpec, apply, psnr
from .depth_metrics import EvalProtocol, MetricRecord, frame_metrics
from .ders import DersBreakdown, DersWeights, SeveritySeries, ders, mean_ders
from .errors import BenchmarkError
from .generation import CorruptionRun, OutputIndex, generate_corrupted_tree, verify_index
from .manifest import DatasetManifest, load_manifest
from .seeding import derive_seed
from .severity_params import SeverityParamTable, default_params, load_params
from .taxonomy import CATEGORIES, CORRUPTION_TYPES, DETERMINISTIC_TYPES

__all__ = [
    "BenchmarkError",
    "CATEGORIES",
    "CORRUPTION_TYPES",
    "CorruptionRun",
    "CorruptionSpec",
    "DETERMINISTIC_TYPES",
    "DatasetManifest",
    "DersBreakdown",
    "DersWeights",
    "EvalProtocol",
    "MetricRecord",
    "OutputIndex",
    "SeverityParamTable",
    "SeveritySeries",
    "apply",
    "default_params",
    "derive_seed",
    "ders",
    "frame_metrics",
    "generate_corrupted_tree",
    "load_manifest",
    "load_params",
    "mean_ders",
    "psnr",
    "verify_index",
]

__version__ = "0.1.0"
