"""Recompute the bundled published score tables and compare block by block.

Each fixture block carries the score printed alongside it in the source
tables (``printed_ders``). Three blocks additionally carry an
``erratum_ders``: cases where the printed caption provably does not belong
to its own severity data (two swapped captions and one digit misprint,
evidenced in the block's ``erratum`` note). Verification compares the
recomputed score against the erratum-corrected target where present and
reports both deltas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .ders import DersBreakdown, DersWeights, ders, mean_ders
from .tables import fixtures_root, list_models, load_model_blocks, load_model_meta

DEFAULT_TOLERANCE = 0.1


@dataclass(frozen=True)
class BlockResult:
    model: str
    corruption: str
    breakdown: DersBreakdown
    printed: float
    erratum: float | None
    erratum_note: str | None

    @property
    def target(self) -> float:
        return self.printed if self.erratum is None else self.erratum

    @property
    def delta(self) -> float:
        return self.breakdown.score - self.target

    @property
    def printed_delta(self) -> float:
        return self.breakdown.score - self.printed


@dataclass
class ModelResult:
    model: str
    blocks: list[BlockResult] = field(default_factory=list)
    recomputed_mean: float = 0.0
    printed_mean: float = 0.0
    prose_mean: float | None = None
    notes: list[str] = field(default_factory=list)


@dataclass
class VerificationReport:
    tolerance: float
    models: list[ModelResult] = field(default_factory=list)

    @property
    def all_blocks(self) -> list[BlockResult]:
        return [b for m in self.models for b in m.blocks]

    @property
    def ok(self) -> bool:
        return all(abs(b.delta) <= self.tolerance for b in self.all_blocks)


def verify_published(root: str | Path | None = None,
                     weights: DersWeights | None = None,
                     tolerance: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Recompute every bundled (model, corruption) block and compare."""
    weights = weights or DersWeights()
    base = fixtures_root(root)
    report = VerificationReport(tolerance=tolerance)
    for model in list_models(base):
        meta = load_model_meta(base, model)
        result = ModelResult(model=model, prose_mean=meta.get("prose_mean_ders"))
        scores = {}
        printed = {}
        for tag, (series, block_meta) in load_model_blocks(base, model).items():
            breakdown = ders(series, weights)
            scores[tag] = breakdown.score
            printed[tag] = float(block_meta["printed_ders"])
            erratum = block_meta.get("erratum_ders")
            result.blocks.append(BlockResult(
                model=model,
                corruption=tag,
                breakdown=breakdown,
                printed=printed[tag],
                erratum=None if erratum is None else float(erratum),
                erratum_note=block_meta.get("erratum"),
            ))
        result.recomputed_mean = mean_ders(scores)
        result.printed_mean = mean_ders(printed)
        if result.prose_mean is not None and \
                abs(result.recomputed_mean - result.prose_mean) > 0.05:
            result.notes.append(
                f"recomputed mean {result.recomputed_mean:.2f} differs from the "
                f"published prose mean {result.prose_mean:.2f}")
        if abs(result.printed_mean - result.recomputed_mean) > 0.05:
            result.notes.append(
                f"mean of printed per-corruption scores ({result.printed_mean:.2f}) "
                f"differs from the recomputed mean ({result.recomputed_mean:.2f}); "
                "see per-block erratum notes")
        report.models.append(result)
    return report
