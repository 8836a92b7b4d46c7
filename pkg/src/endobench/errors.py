"""Exception types shared across the toolkit."""


class BenchmarkError(Exception):
    """Base class for all toolkit errors."""


class InvalidSpecError(BenchmarkError):
    """A corruption spec names an unknown type or an illegal severity."""


class ConfigError(BenchmarkError):
    """A configuration file is missing, malformed, or incomplete."""


class ShapeError(BenchmarkError):
    """Array operands have incompatible dimensions."""


class ManifestError(BenchmarkError):
    """A dataset manifest failed to load or validate."""


class EvaluationError(BenchmarkError):
    """Depth evaluation cannot proceed (empty mask, degenerate prediction)."""


class TableError(BenchmarkError):
    """A severity table block failed to parse or violates its invariants."""
