"""Diffusion fusion of sub-feature metrics: per-metric affinity graphs, a
mixture Markov chain walked across the graphs, and distance recovery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceKind, DistanceMatrix


@dataclass(frozen=True)
class DffConfig:
    """Knobs for the multi-graph fusion.

    ``subfeatures`` is the number of metrics fused (at least 2: each graph
    averages over the others).  ``k_local`` truncates the transition kernel
    to each row's most probable neighbors.  ``renormalize_local=False``
    keeps the truncated kernel literally as cut, without rescaling rows back
    to probability mass 1.  ``epsilon`` floors the overall status before
    inversion so unreachable pairs map to one large finite distance.
    """

    subfeatures: int = 4
    k_local: int = 15
    t_iters: int = 1
    epsilon: float = 1e-12
    renormalize_local: bool = True

    def __post_init__(self) -> None:
        if self.subfeatures < 2:
            raise ValueError("fusion needs at least 2 sub-feature metrics")
        if self.k_local < 1:
            raise ValueError("k_local must be positive")
        if self.t_iters < 1:
            raise ValueError("t_iters must be positive")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class TransitionMatrix:
    """Markov transition kernel over the image graph.

    ``stochastic=True`` rows sum to 1; ``stochastic=False`` marks a locally
    truncated kernel (row mass may be below 1 when renormalization is off).
    """

    values: np.ndarray
    stochastic: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("transition matrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValueError("transition entries must be finite")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("transition entries must lie in [0, 1]")
        if self.stochastic and np.any(np.abs(v.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("stochastic rows must sum to 1")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class DiffusionState:
    """Status matrices of every graph after t walk generations.

    ``status[s]`` starts as the full stochastic kernel of metric s and loses
    row normalization as generations advance (the update only preserves
    nonnegativity); ``local[s]`` is the truncated kernel doing the walking.
    """

    status: tuple[np.ndarray, ...]
    local: tuple[TransitionMatrix, ...]
    t: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "status", tuple(np.asarray(p, dtype=np.float64) for p in self.status))
        if len(self.status) < 2 or len(self.status) != len(self.local):
            raise ValueError("need matching status/local kernels for at least 2 graphs")
        if self.t < 0:
            raise ValueError("iteration counter must be nonnegative")
        n = self.local[0].n
        for p in self.status:
            if p.shape != (n, n):
                raise ValueError("all matrices must share one size")
            if not np.all(np.isfinite(p)) or np.any(p < 0.0):
                raise ValueError("status entries must be finite and nonnegative")
        for kernel in self.local:
            if kernel.n != n:
                raise ValueError("all matrices must share one size")

    @property
    def s(self) -> int:
        return len(self.status)


def affinity(d: DistanceMatrix) -> np.ndarray:
    """Edge weights exp(-distance): 1 at distance 0, underflowing to 0 for
    huge distances (accepted; such pairs carry no mass anyway)."""
    return np.exp(-d.values)


def row_stochastic(weights: np.ndarray) -> TransitionMatrix:
    """Normalize affinity rows by vertex degree into transition probabilities."""
    sums = weights.sum(axis=1, keepdims=True)
    if np.any(sums <= 0.0):
        raise ValueError("affinity row with zero mass")
    return TransitionMatrix(weights / sums, stochastic=True)


def localize(p: TransitionMatrix, k_local: int, renormalize: bool = True) -> TransitionMatrix:
    """Keep each row's k_local most probable transitions, zero the rest.

    Ties go to the lower index.  By default the surviving entries are
    rescaled so each row remains a probability distribution.
    """
    n = p.n
    if not 1 <= k_local <= n:
        raise ValueError(f"k_local must be in [1, {n}], got {k_local}")
    order = np.argsort(-p.values, axis=1, kind="stable")
    keep = np.zeros((n, n), dtype=bool)
    np.put_along_axis(keep, order[:, :k_local], True, axis=1)
    values = np.where(keep, p.values, 0.0)
    if renormalize:
        values = values / values.sum(axis=1, keepdims=True)
    return TransitionMatrix(values, stochastic=False)


def diffuse(state: DiffusionState) -> DiffusionState:
    """One synchronous walk generation across all graphs.

    Every graph's new status is its truncated kernel conjugated with the
    average of the *other* graphs' generation-t statuses, so information
    crosses graphs while staying within close neighborhoods.
    """
    s = state.s
    total = np.sum(np.stack(state.status), axis=0)
    updated = []
    for i, kernel in enumerate(state.local):
        others = (total - state.status[i]) / (s - 1)
        updated.append(kernel.values @ others @ kernel.values.T)
    return DiffusionState(tuple(updated), state.local, state.t + 1)


def fuse(metrics: list[DistanceMatrix], cfg: DffConfig) -> DistanceMatrix:
    """Fuse sub-feature metrics into one by multi-graph diffusion.

    Builds per-metric stochastic kernels, walks ``t_iters`` generations from
    the full kernels, averages the final statuses, and inverts (with the
    ``epsilon`` floor) back into a distance matrix.  The output is asymmetric
    in general and is consumed row-wise downstream.
    """
    if len(metrics) != cfg.subfeatures:
        raise ValueError(f"expected {cfg.subfeatures} metrics, got {len(metrics)}")
    n = metrics[0].n
    if any(m.n != n for m in metrics):
        raise ValueError("all metrics must share one size")
    full = [row_stochastic(affinity(m)) for m in metrics]
    local = tuple(localize(p, cfg.k_local, cfg.renormalize_local) for p in full)
    state = DiffusionState(tuple(p.values for p in full), local, 0)
    for _ in range(cfg.t_iters):
        state = diffuse(state)
    overall = np.mean(np.stack(state.status), axis=0)
    return DistanceMatrix(1.0 / np.maximum(overall, cfg.epsilon), DistanceKind.FUSED)
