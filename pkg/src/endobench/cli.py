"""Command-line front end: corrupt, evaluate, score, report, verify-paper.

A thin shell over the library: every subcommand's output is produced by
the same functions tests call directly. Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import reports
from .depth_metrics import EvalProtocol
from .ders import DersBreakdown, DersWeights, ders
from .errors import BenchmarkError, TableError
from .evaluation import evaluate_tree
from .generation import CorruptionRun, generate_corrupted_tree
from .manifest import load_manifest
from .severity_params import default_params, load_params
from .tables import load_block
from .taxonomy import CORRUPTION_TYPES, SEVERITY_LEVELS
from .verification import DEFAULT_TOLERANCE, verify_published

log = logging.getLogger(__name__)


def _parse_types(value: str | None) -> tuple[str, ...]:
    if not value:
        return CORRUPTION_TYPES
    return tuple(t.strip() for t in value.split(",") if t.strip())


def _parse_severities(value: str | None) -> tuple[int, ...]:
    if not value:
        return SEVERITY_LEVELS
    try:
        return tuple(int(s) for s in value.split(",") if s.strip())
    except ValueError as exc:
        raise click.UsageError(f"bad --severities value: {exc}")


def _load_protocol(path: str | None) -> EvalProtocol:
    if not path:
        return EvalProtocol()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return EvalProtocol(**data)


def _load_weights(path: str | None) -> DersWeights:
    if not path:
        return DersWeights()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "w" in data:
        data["w"] = tuple(data["w"])
    return DersWeights(**data)


def _params_table(path: str | None):
    return load_params(path) if path else default_params()


def _parse_formats(value: str, allowed: tuple[str, ...]) -> tuple[str, ...]:
    chosen = tuple(f.strip() for f in value.split(",") if f.strip())
    bad = set(chosen) - set(allowed)
    if bad:
        raise click.UsageError(
            f"--format supports {','.join(allowed)} here, got {sorted(bad)}")
    return chosen


class _Fail(click.ClickException):
    exit_code = 1


def _domain_errors(fn):
    """Map library errors to exit code 1 with a clean message."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BenchmarkError as err:
            raise _Fail(str(err))
        except OSError as err:
            raise _Fail(f"{err.__class__.__name__}: {err}")
    return wrapper


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable info logging.")
def main(verbose: bool) -> None:
    """Endoscopic depth-estimation robustness benchmark."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out", "out_root", required=True, type=click.Path())
@click.option("--types", default=None, help="Comma-separated corruption types.")
@click.option("--severities", default=None, help="Comma-separated severities (1-5).")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--workers", default=None, type=int)
@click.option("--params", "params_path", default=None, type=click.Path(),
              help="Severity parameter config (JSON/TOML).")
@click.option("--debug-jpeg", is_flag=True,
              help="Also keep the intermediate .jpg for jpeg_compression.")
@_domain_errors
def corrupt(manifest_path, out_root, types, severities, seed, workers,
            params_path, debug_jpeg) -> None:
    """Generate the corrupted tree for a manifest."""
    manifest = load_manifest(manifest_path)
    params = _params_table(params_path)
    type_list = _parse_types(types)
    severity_list = _parse_severities(severities)
    total = 0
    for ctype in type_list:
        run = CorruptionRun(global_seed=seed, output_root=Path(out_root),
                            types=(ctype,), severities=severity_list,
                            workers=workers, debug_jpeg=debug_jpeg)
        index = generate_corrupted_tree(manifest, run, params)
        total += len(index)
        click.echo(f"{ctype}: {len(index)} files")
    click.echo(f"done: {total} files under {out_root}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--pred-dir", required=True, type=click.Path(),
              help="Corrupted-tree predictions (<ctype>/<severity>/<frame_id>).")
@click.option("--clean-pred-dir", required=True, type=click.Path(),
              help="Severity-0 predictions.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--types", default=None)
@click.option("--severities", default=None)
@click.option("--protocol", "protocol_path", default=None, type=click.Path())
@click.option("--strict", is_flag=True, help="Fail on the first missing prediction.")
@click.option("--per-frame", is_flag=True, help="Also dump per-frame CSVs.")
@click.option("--format", "formats", default="csv", show_default=True,
              help="Comma list of output formats: csv, json.")
@_domain_errors
def evaluate(manifest_path, pred_dir, clean_pred_dir, out_dir, types,
             severities, protocol_path, strict, per_frame, formats) -> None:
    """Score predictions into one severity-table CSV per corruption."""
    chosen = _parse_formats(formats, ("csv", "json"))
    manifest = load_manifest(manifest_path)
    protocol = _load_protocol(protocol_path)
    type_list = _parse_types(types)
    severity_list = _parse_severities(severities)
    result = evaluate_tree(manifest, pred_dir, clean_pred_dir,
                           types=type_list, severities=severity_list,
                           protocol=protocol, strict=strict)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    complete = result.complete_series(type_list, severity_list)
    written = 0
    if "csv" in chosen:
        for ctype, series in complete.items():
            (out / f"{ctype}.csv").write_text(
                reports.severity_csv(series, ctype), encoding="utf-8")
            written += 1
    if "json" in chosen:
        (out / "severity_tables.json").write_text(
            reports.severity_tables_json(complete), encoding="utf-8")
    if per_frame:
        pf_dir = out / "per_frame"
        pf_dir.mkdir(exist_ok=True)
        for (ctype, severity), records in sorted(result.per_frame.items()):
            (pf_dir / f"{ctype}_s{severity}.csv").write_text(
                reports.per_frame_csv(records), encoding="utf-8")
    (out / "exceptions.json").write_text(
        reports.exceptions_json(result.exceptions), encoding="utf-8")
    click.echo(f"wrote {written} severity tables to {out} "
               f"({len(result.exceptions)} exceptions)")


@main.command()
@click.option("--eval-dir", required=True, type=click.Path(),
              help="Directory of severity-table CSVs from evaluate.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--weights", "weights_path", default=None, type=click.Path())
@click.option("--format", "formats", default="json,tsv", show_default=True,
              help="Comma list of output formats: json, tsv, csv.")
@_domain_errors
def score(eval_dir, out_dir, weights_path, formats) -> None:
    """Compute per-corruption robustness breakdowns and the mean score."""
    chosen = _parse_formats(formats, ("json", "tsv", "csv"))
    weights = _load_weights(weights_path)
    eval_dir = Path(eval_dir)
    breakdowns: dict[str, DersBreakdown] = {}
    for path in sorted(eval_dir.glob("*.csv")):
        try:
            series, meta = load_block(path)
        except TableError as err:
            log.warning("skipping %s: %s", path.name, err)
            click.echo(f"warning: skipping {path.name}: {err}", err=True)
            continue
        ctype = meta.get("corruption", path.stem)
        breakdowns[ctype] = ders(series, weights)
    if not breakdowns:
        raise _Fail(f"no severity tables found under {eval_dir}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if "json" in chosen:
        (out / "scores.json").write_text(reports.score_json(breakdowns),
                                         encoding="utf-8")
    if "tsv" in chosen:
        (out / "scores.tsv").write_text(reports.plot_tsv(breakdowns),
                                        encoding="utf-8")
    if "csv" in chosen:
        (out / "scores.csv").write_text(reports.score_csv(breakdowns),
                                        encoding="utf-8")
    click.echo(reports.score_table_text(breakdowns), nl=False)


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(),
              help="scores.json produced by the score subcommand.")
@_domain_errors
def report(scores_path) -> None:
    """Print a readable summary of a score file."""
    data = json.loads(Path(scores_path).read_text(encoding="utf-8"))
    breakdowns = {
        rec["corruption"]: DersBreakdown(
            error=rec["E"], accuracy=rec["A"], robustness=rec["R"],
            score=rec["ders"])
        for rec in data["scores"]
    }
    if not breakdowns:
        raise _Fail(f"{scores_path} holds no score records")
    click.echo(reports.score_table_text(breakdowns), nl=False)


@main.command("verify-paper")
@click.option("--fixtures", "fixtures_dir", default=None, type=click.Path(),
              help="Override the bundled reference tables "
                   "(or set ENDOBENCH_FIXTURES).")
@click.option("--tolerance", default=DEFAULT_TOLERANCE, show_default=True,
              type=float)
@click.option("--weights", "weights_path", default=None, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Also write the full JSON report here.")
@_domain_errors
def verify_paper(fixtures_dir, tolerance, weights_path, out_path) -> None:
    """Recompute the bundled published score tables and compare."""
    weights = _load_weights(weights_path)
    result = verify_published(root=fixtures_dir, weights=weights,
                              tolerance=tolerance)
    ok_count = 0
    for block in result.all_blocks:
        status = "ok" if abs(block.delta) <= tolerance else "FAIL"
        ok_count += status == "ok"
        line = (f"{status:4} {block.model}/{block.corruption}: "
                f"computed {block.breakdown.score:.2f} vs printed "
                f"{block.printed:.2f} (delta {block.printed_delta:+.3f})")
        if block.erratum is not None:
            line += (f" [erratum: target {block.erratum:.2f}, "
                     f"delta {block.delta:+.3f}]")
        click.echo(line)
    for model in result.models:
        click.echo(f"{model.model}: recomputed mean "
                   f"{model.recomputed_mean:.2f}, printed-caption mean "
                   f"{model.printed_mean:.2f}, prose mean {model.prose_mean}")
        for note in model.notes:
            click.echo(f"  note: {note}")
    click.echo(f"{ok_count}/{len(result.all_blocks)} blocks within "
               f"tolerance {tolerance}")
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(reports.verification_json(result),
                                  encoding="utf-8")
    if not result.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
