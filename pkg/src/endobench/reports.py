"""Deterministic report emission: CSV severity tables, per-frame dumps,
score JSON, and plot TSV.

Formatting contract: metric cells at 6 significant digits, composite
scores at 2 decimals, JSON keys sorted. Identical inputs yield identical
bytes on any platform.
"""

from __future__ import annotations

import json

from .depth_metrics import METRIC_NAMES, MetricRecord
from .ders import DersBreakdown, mean_ders
from .tables import emit_table
from .verification import VerificationReport


def fmt_metric(x: float) -> str:
    return f"{x:.6g}"


def fmt_score(x: float) -> str:
    return f"{x:.2f}"


def severity_csv(series, ctype: str, extra_meta: dict | None = None) -> str:
    meta = {"corruption": ctype}
    meta.update(extra_meta or {})
    return emit_table(series, meta)


def per_frame_csv(records: dict[str, MetricRecord]) -> str:
    lines = ["frame_id," + ",".join(METRIC_NAMES)]
    for frame_id, rec in records.items():
        cells = [frame_id] + [fmt_metric(v) for v in rec.as_tuple()]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def score_json(breakdowns: dict[str, DersBreakdown]) -> str:
    records = []
    for ctype in sorted(breakdowns):
        b = breakdowns[ctype]
        records.append({
            "corruption": ctype,
            "E": float(fmt_metric(b.error)),
            "A": float(fmt_metric(b.accuracy)),
            "R": float(fmt_metric(b.robustness)),
            "ders": float(fmt_score(b.score)),
        })
    payload = {
        "scores": records,
        "mean_ders": float(fmt_score(
            mean_ders({c: b.score for c, b in breakdowns.items()}))),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def plot_tsv(breakdowns: dict[str, DersBreakdown]) -> str:
    lines = ["corruption\tders"]
    for ctype in sorted(breakdowns):
        lines.append(f"{ctype}\t{fmt_score(breakdowns[ctype].score)}")
    return "\n".join(lines) + "\n"


def score_csv(breakdowns: dict[str, DersBreakdown]) -> str:
    lines = ["corruption,E,A,R,ders"]
    for ctype in sorted(breakdowns):
        b = breakdowns[ctype]
        lines.append(f"{ctype},{fmt_metric(b.error)},{fmt_metric(b.accuracy)},"
                     f"{fmt_metric(b.robustness)},{fmt_score(b.score)}")
    return "\n".join(lines) + "\n"


def severity_tables_json(series_by_ctype: dict) -> str:
    payload = {}
    for ctype in sorted(series_by_ctype):
        values = series_by_ctype[ctype].values
        payload[ctype] = {name: [float(fmt_metric(v)) for v in values[i]]
                          for i, name in enumerate(METRIC_NAMES)}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def exceptions_json(exceptions) -> str:
    records = [{"frame_id": e.frame_id, "ctype": e.ctype,
                "severity": e.severity, "reason": e.reason}
               for e in exceptions]
    records.sort(key=lambda r: (r["ctype"], r["severity"], r["frame_id"]))
    return json.dumps(records, indent=2, sort_keys=True) + "\n"


def verification_json(report: VerificationReport) -> str:
    models = []
    for model in report.models:
        blocks = []
        for b in sorted(model.blocks, key=lambda x: x.corruption):
            rec = {
                "corruption": b.corruption,
                "computed": float(fmt_metric(b.breakdown.score)),
                "printed": b.printed,
                "delta_vs_printed": float(fmt_metric(b.printed_delta)),
                "within_tolerance": bool(abs(b.delta) <= report.tolerance),
            }
            if b.erratum is not None:
                rec["erratum_ders"] = b.erratum
                rec["delta_vs_erratum"] = float(fmt_metric(b.delta))
                rec["erratum_note"] = b.erratum_note
            blocks.append(rec)
        models.append({
            "model": model.model,
            "blocks": blocks,
            "recomputed_mean": float(fmt_metric(model.recomputed_mean)),
            "printed_mean": float(fmt_metric(model.printed_mean)),
            "prose_mean": model.prose_mean,
            "notes": model.notes,
        })
    payload = {"tolerance": report.tolerance, "ok": report.ok, "models": models}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def score_table_text(breakdowns: dict[str, DersBreakdown]) -> str:
    """Human-readable summary table used by the report subcommand."""
    lines = [f"{'corruption':<18} {'E':>9} {'A':>8} {'R':>9} {'DERS':>7}"]
    for ctype in sorted(breakdowns):
        b = breakdowns[ctype]
        lines.append(f"{ctype:<18} {b.error:>9.4f} {b.accuracy:>8.4f} "
                     f"{b.robustness:>9.4f} {b.score:>7.2f}")
    mean = mean_ders({c: b.score for c, b in breakdowns.items()})
    lines.append(f"{'mean':<18} {'':>9} {'':>8} {'':>9} {mean:>7.2f}")
    return "\n".join(lines) + "\n"
