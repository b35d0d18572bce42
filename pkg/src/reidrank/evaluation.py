"""Single-query CMC and mAP under the cross-camera protocol, plus
intra/inter identity distance histograms."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distances import DistanceMatrix
from .features import FeatureSet


@dataclass(frozen=True)
class HistogramPair:
    """Normalized densities of same-identity vs different-identity distances,
    binned over one shared range."""

    intra: np.ndarray
    inter: np.ndarray
    bin_edges: np.ndarray

    def overlap(self) -> float:
        """Overlap coefficient of the two densities (0 = separated, 1 = identical)."""
        widths = np.diff(self.bin_edges)
        return float(np.sum(np.minimum(self.intra, self.inter) * widths))


@dataclass(frozen=True)
class EvalReport:
    """CMC curve, mAP, and per-query APs for one configuration.

    ``cmc[r-1]`` is the probability that a true match appears within the top
    r gallery ranks.  Queries with no valid cross-camera match are dropped
    from both metrics and counted in ``num_skipped_queries``.
    """

    cmc: np.ndarray
    map_score: float
    per_query_ap: np.ndarray
    num_valid_queries: int
    num_skipped_queries: int
    histograms: HistogramPair | None = None

    @property
    def rank1(self) -> float:
        return float(self.cmc[0])

    def to_dict(self) -> dict:
        payload = {
            "rank1": self.rank1,
            "mAP": self.map_score,
            "cmc": [float(v) for v in self.cmc],
            "num_valid_queries": self.num_valid_queries,
            "num_skipped_queries": self.num_skipped_queries,
            "histograms": None,
        }
        if self.histograms is not None:
            payload["histograms"] = {
                "intra": [float(v) for v in self.histograms.intra],
                "inter": [float(v) for v in self.histograms.inter],
                "bin_edges": [float(v) for v in self.histograms.bin_edges],
            }
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def write_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(report.to_json(), encoding="utf-8")


def evaluate(d: DistanceMatrix, fs: FeatureSet, r_max: int = 50, bins: int | None = None) -> EvalReport:
    """Score a distance matrix against the labels of its feature set.

    For each probe the gallery is sorted ascending by distance (ties to the
    lower index).  Gallery rows sharing both the probe's person and camera
    are excluded; negative person ids stay ranked but never count as true
    matches.  AP averages the precision at each true match's rank; the CMC
    entry at r is 1 when any true match lands in the top r.
    """
    if d.n != fs.n:
        raise ValueError(f"feature count {fs.n} ≠ distance order {d.n}")
    if r_max < 1:
        raise ValueError("r_max must be positive")
    probes = fs.probe_indices
    gallery = fs.gallery_indices
    if probes.size == 0 or gallery.size == 0:
        raise ValueError("evaluation needs at least one probe and one gallery row")

    g_pid = fs.person_ids[gallery]
    g_cam = fs.camera_ids[gallery]
    aps: list[float] = []
    cmc_rows: list[np.ndarray] = []
    skipped = 0
    for q in probes:
        q_pid = fs.person_ids[q]
        q_cam = fs.camera_ids[q]
        keep = ~((g_pid == q_pid) & (g_cam == q_cam))
        if not keep.any():
            skipped += 1
            continue
        cand = gallery[keep]
        order = np.argsort(d.values[q, cand], kind="stable")
        pid_sorted = g_pid[keep][order]
        truth = (pid_sorted == q_pid) & (pid_sorted >= 0)
        num_rel = int(truth.sum())
        if num_rel == 0:
            skipped += 1
            continue
        hits = np.cumsum(truth)
        ranks = np.arange(1, truth.size + 1)
        aps.append(float(np.mean(hits[truth] / ranks[truth])))
        found = hits >= 1
        if found.size >= r_max:
            cmc_rows.append(found[:r_max].astype(np.float64))
        else:
            pad = np.full(r_max - found.size, found[-1])
            cmc_rows.append(np.concatenate([found, pad]).astype(np.float64))
    if not aps:
        raise ValueError("no probe has a valid cross-camera match")

    histograms = distance_histograms(d, fs, bins) if bins is not None else None
    return EvalReport(
        cmc=np.mean(np.stack(cmc_rows), axis=0),
        map_score=float(np.mean(aps)),
        per_query_ap=np.asarray(aps),
        num_valid_queries=len(aps),
        num_skipped_queries=skipped,
        histograms=histograms,
    )


def distance_histograms(d: DistanceMatrix, fs: FeatureSet, bins: int) -> HistogramPair:
    """Bin all cross-camera probe-gallery distances into same-identity and
    different-identity densities over one shared min-max range.

    Pairs involving a distractor (negative person id) land in the
    different-identity population.  Each density integrates to 1.
    """
    if d.n != fs.n:
        raise ValueError(f"feature count {fs.n} ≠ distance order {d.n}")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    probes = fs.probe_indices
    gallery = fs.gallery_indices
    if probes.size == 0 or gallery.size == 0:
        raise ValueError("histograms need at least one probe and one gallery row")

    values = d.values[np.ix_(probes, gallery)]
    cross = fs.camera_ids[probes][:, None] != fs.camera_ids[gallery][None, :]
    same_id = (fs.person_ids[probes][:, None] == fs.person_ids[gallery][None, :]) & (
        fs.person_ids[probes][:, None] >= 0
    )
    intra = values[cross & same_id]
    inter = values[cross & ~same_id]
    if intra.size == 0:
        raise ValueError("no same-identity cross-camera pair exists")
    if inter.size == 0:
        raise ValueError("no different-identity cross-camera pair exists")

    lo = float(min(intra.min(), inter.min()))
    hi = float(max(intra.max(), inter.max()))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    intra_density, _ = np.histogram(intra, bins=edges, density=True)
    inter_density, _ = np.histogram(inter, bins=edges, density=True)
    return HistogramPair(intra_density, inter_density, edges)
