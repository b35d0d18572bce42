"""Contextual re-ranking toolkit for feature-based retrieval: k-reciprocal
re-ranking with a growing neighborhood budget (ARR), diffusion fusion of
sub-feature metrics (DFF), composition strategies, a CMC/mAP evaluation
harness, and a seeded synthetic benchmark."""

from .arr import ArrConfig, adaptive_rerank, arr_schedule
from .dff import DffConfig, DiffusionState, TransitionMatrix, affinity, diffuse, fuse, localize, row_stochastic
from .distances import (
    DistanceKind,
    DistanceMatrix,
    euclidean_distances,
    format_distances,
    load_distances,
    minmax_normalize,
    write_distances,
)
from .evaluation import EvalReport, HistogramPair, distance_histograms, evaluate, write_report
from .features import (
    FeatureSet,
    FormatError,
    SubFeatureSplit,
    format_features,
    l2_normalize,
    load_features,
    split_features,
    write_features,
)
from .pipeline import PipelineSpec, Strategy, SweepCell, run_pipeline, sweep, sweep_csv
from .ranking import (
    RankList,
    ReciprocalNeighborhood,
    combine_final,
    jaccard_distances,
    rank_lists,
    reciprocal_sets,
    rerank_once,
)
from .synth import SynthSpec, benchmark_spec, generate

__version__ = "0.1.0"

__all__ = [
    "ArrConfig",
    "DffConfig",
    "DiffusionState",
    "DistanceKind",
    "DistanceMatrix",
    "EvalReport",
    "FeatureSet",
    "FormatError",
    "HistogramPair",
    "PipelineSpec",
    "RankList",
    "ReciprocalNeighborhood",
    "Strategy",
    "SubFeatureSplit",
    "SweepCell",
    "SynthSpec",
    "TransitionMatrix",
    "adaptive_rerank",
    "affinity",
    "arr_schedule",
    "benchmark_spec",
    "combine_final",
    "diffuse",
    "distance_histograms",
    "euclidean_distances",
    "evaluate",
    "format_distances",
    "format_features",
    "fuse",
    "generate",
    "jaccard_distances",
    "l2_normalize",
    "load_distances",
    "load_features",
    "localize",
    "minmax_normalize",
    "rank_lists",
    "reciprocal_sets",
    "rerank_once",
    "row_stochastic",
    "run_pipeline",
    "split_features",
    "sweep",
    "sweep_csv",
    "write_distances",
    "write_features",
    "write_report",
]
