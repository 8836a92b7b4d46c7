"""Prediction export adapter: bridges depth models to the benchmark harness."""

from .formats import (FormatError, read_pfm, read_png16, verify_roundtrip,
                      write_pfm, write_png16)
from .runner import ExportConfig, ExportError, ExportReport, export_run

__all__ = [
    "ExportConfig",
    "ExportError",
    "ExportReport",
    "FormatError",
    "export_run",
    "read_pfm",
    "read_png16",
    "verify_roundtrip",
    "write_pfm",
    "write_png16",
]

__version__ = "0.1.0"
