"""Severity parameter schedules: load, validate, and query.

The schedule is configuration, not ground truth: a versioned key tree
``<ctype>.<severity>.<param>`` loaded from JSON (or TOML), with a bundled
default mirroring the reference corruption settings. Validation enforces a
complete 16x5 grid and, per type, a monotone designated magnitude
parameter (non-decreasing, except JPEG quality which is non-increasing).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .taxonomy import CORRUPTION_TYPES, MAGNITUDE_PARAMS, SEVERITY_LEVELS

KNOWN_SCHEMA_VERSIONS = (1,)


class SeverityParamTable:
    """Immutable view over a validated parameter schedule."""

    def __init__(self, data: dict, source: str = "<memory>"):
        self._source = source
        self.schema_version = data.get("schema_version")
        if self.schema_version not in KNOWN_SCHEMA_VERSIONS:
            raise ConfigError(
                f"{source}: unknown schema_version {self.schema_version!r}, "
                f"expected one of {KNOWN_SCHEMA_VERSIONS}"
            )
        types = data.get("types")
        if not isinstance(types, dict):
            raise ConfigError(f"{source}: missing 'types' table")
        self._table: dict[str, dict[int, dict]] = {}
        for ctype, rows in types.items():
            self._table[ctype] = {int(sev): dict(params) for sev, params in rows.items()}
        self._validate()

    @property
    def version(self) -> str:
        return f"v{self.schema_version}"

    def _validate(self) -> None:
        for ctype in CORRUPTION_TYPES:
            if ctype not in self._table:
                raise ConfigError(f"{self._source}: no parameters for type '{ctype}'")
            rows = self._table[ctype]
            for sev in SEVERITY_LEVELS:
                if sev not in rows:
                    raise ConfigError(
                        f"{self._source}: no parameters for ('{ctype}', severity {sev})"
                    )
            magnitude, direction = MAGNITUDE_PARAMS[ctype]
            values = []
            for sev in SEVERITY_LEVELS:
                if magnitude not in rows[sev]:
                    raise ConfigError(
                        f"{self._source}: ('{ctype}', severity {sev}) lacks "
                        f"magnitude parameter '{magnitude}'"
                    )
                values.append(float(rows[sev][magnitude]))
            pairs = zip(values, values[1:])
            if direction == "up":
                ok = all(a <= b for a, b in pairs)
            else:
                ok = all(a >= b for a, b in pairs)
            if not ok:
                raise ConfigError(
                    f"{self._source}: '{ctype}.{magnitude}' must be monotone "
                    f"{'non-decreasing' if direction == 'up' else 'non-increasing'} "
                    f"in severity, got {values}"
                )

    def get(self, ctype: str, severity: int) -> dict:
        """Parameter dict for one (type, severity) cell."""
        try:
            return self._table[ctype][severity]
        except KeyError:
            raise ConfigError(
                f"{self._source}: no parameters for ('{ctype}', severity {severity})"
            ) from None


def load_params(path: str | Path) -> SeverityParamTable:
    """Load a schedule from a .json or .toml file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"parameter config not found: {path}")
    try:
        if path.suffix == ".toml":
            try:
                import tomllib
            except ImportError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"cannot parse parameter config {path}: {exc}") from exc
    return SeverityParamTable(data, source=str(path))


def default_params() -> SeverityParamTable:
    """The bundled schedule."""
    text = resources.files("endobench").joinpath("configs/severity_params.json").read_text()
    return SeverityParamTable(json.loads(text), source="<bundled severity_params.json>")
