"""Composition strategies over re-ranking and fusion, plus parameter sweeps."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from enum import Enum

from .arr import ArrConfig, adaptive_rerank
from .dff import DffConfig, fuse
from .distances import DistanceMatrix, euclidean_distances
from .evaluation import EvalReport, evaluate
from .features import FeatureSet, split_features

SWEEP_CSV_HEADER = ["strategy", "S", "k", "c", "iters", "rank1", "mAP", "seed"]


class Strategy(str, Enum):
    BASELINE = "baseline"
    ARR_ONLY = "arr_only"
    DFF_ONLY = "dff_only"
    DFF_ARR = "dff_arr"
    ARR_DFF = "arr_dff"


@dataclass(frozen=True)
class PipelineSpec:
    """A strategy plus the re-ranking and fusion configs it draws from.

    ``baseline`` and ``arr_only`` ignore the fusion config entirely.
    """

    strategy: Strategy
    arr: ArrConfig = field(default_factory=ArrConfig)
    dff: DffConfig = field(default_factory=DffConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy(self.strategy))


def run_pipeline(fs: FeatureSet, spec: PipelineSpec) -> DistanceMatrix:
    """Produce the strategy's final distance matrix for a feature set.

    baseline: plain squared-euclidean metric.
    arr_only: iterated re-ranking of the baseline metric.
    dff_only: diffusion fusion of the per-sub-feature metrics.
    dff_arr:  fuse first, then re-rank the fused metric.
    arr_dff:  re-rank every sub-feature metric, then fuse the results.

    Both combined strategies split columns identically for a given
    sub-feature count.
    """
    strategy = spec.strategy
    if strategy is Strategy.BASELINE:
        return euclidean_distances(fs)
    if strategy is Strategy.ARR_ONLY:
        return adaptive_rerank(euclidean_distances(fs), spec.arr)

    sub_metrics = [euclidean_distances(p) for p in split_features(fs, spec.dff.subfeatures).parts]
    if strategy is Strategy.DFF_ONLY:
        return fuse(sub_metrics, spec.dff)
    if strategy is Strategy.DFF_ARR:
        return adaptive_rerank(fuse(sub_metrics, spec.dff), spec.arr)
    if strategy is Strategy.ARR_DFF:
        return fuse([adaptive_rerank(m, spec.arr) for m in sub_metrics], spec.dff)
    raise ValueError(f"no pipeline path for strategy {strategy!r}")


@dataclass(frozen=True)
class SweepCell:
    """One sweep grid point: its settings plus metrics, or an error message."""

    strategy: Strategy
    subfeatures: int
    k: int
    increment: int
    iterations: int
    rank1: float | None
    map_score: float | None
    seed: int
    error: str | None = None
    report: EvalReport | None = None


def sweep(
    fs: FeatureSet,
    base: PipelineSpec,
    s_values: list[int],
    k_values: list[int],
    seed: int = 0,
    r_max: int = 50,
) -> list[SweepCell]:
    """Evaluate the Cartesian product of sub-feature counts and neighborhood
    budgets around a base spec.

    Each cell replaces the sub-feature count and sets both the re-ranking k0
    and the fusion k_local to the cell's k (the local kernel tracks the
    neighborhood budget in force).  A failing cell becomes an error row
    instead of aborting the sweep.
    """
    cells: list[SweepCell] = []
    for s in s_values:
        for k in k_values:
            try:
                spec = PipelineSpec(
                    base.strategy,
                    replace(base.arr, k0=k),
                    replace(base.dff, subfeatures=s, k_local=k),
                )
                report = evaluate(run_pipeline(fs, spec), fs, r_max=r_max)
                cells.append(
                    SweepCell(
                        base.strategy, s, k, base.arr.increment, base.arr.iterations,
                        report.rank1, report.map_score, seed, report=report,
                    )
                )
            except (ValueError, ArithmeticError) as exc:
                cells.append(
                    SweepCell(
                        base.strategy, s, k, base.arr.increment, base.arr.iterations,
                        None, None, seed, error=str(exc),
                    )
                )
    return cells


def sweep_csv(cells: list[SweepCell]) -> str:
    """Render sweep results as CSV; error cells keep their settings with
    empty metric fields."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for cell in cells:
        writer.writerow(
            [
                cell.strategy.value,
                cell.subfeatures,
                cell.k,
                cell.increment,
                cell.iterations,
                "" if cell.rank1 is None else f"{cell.rank1:.6f}",
                "" if cell.map_score is None else f"{cell.map_score:.6f}",
                cell.seed,
            ]
        )
    return buffer.getvalue()
