"""One round of k-reciprocal re-ranking: rank lists, mutual neighborhoods,
generalized Jaccard distances, and the additive combination step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceKind, DistanceMatrix, minmax_normalize


@dataclass(frozen=True)
class RankList:
    """Per-point orderings: row i lists all indices by ascending distance from i.

    Ties are broken by ascending index, so rankings are deterministic.
    """

    order: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", np.asarray(self.order, dtype=np.int64))
        n = self.order.shape[0]
        if self.order.ndim != 2 or self.order.shape != (n, n):
            raise ValueError("rank list must be a square index matrix")
        expected = np.arange(n)
        if not np.array_equal(np.sort(self.order, axis=1), np.broadcast_to(expected, (n, n))):
            raise ValueError("every rank-list row must be a permutation of 0..N-1")

    @property
    def n(self) -> int:
        return self.order.shape[0]


@dataclass(frozen=True)
class ReciprocalNeighborhood:
    """Mutual top-k membership: member[q, j] is True when j is in R(q).

    Membership is symmetric and every point belongs to its own set, which
    keeps the Jaccard distance well defined on the diagonal.
    """

    k: int
    member: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "member", np.asarray(self.member, dtype=bool))
        if self.k < 1:
            raise ValueError("k must be positive")
        m = self.member
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("membership must be a square matrix")
        if not np.array_equal(m, m.T):
            raise ValueError("reciprocal membership must be symmetric")
        if not np.all(np.diag(m)):
            raise ValueError("every point must belong to its own set")

    @property
    def n(self) -> int:
        return self.member.shape[0]

    def indices(self, q: int) -> np.ndarray:
        """The set R(q) as a sorted index array."""
        return np.flatnonzero(self.member[q])


def rank_lists(d: DistanceMatrix) -> RankList:
    """Sort every row ascending; equal distances keep ascending index order."""
    return RankList(np.argsort(d.values, axis=1, kind="stable"))


def reciprocal_sets(d: DistanceMatrix, k: int) -> ReciprocalNeighborhood:
    """Mutual membership of the k nearest neighbors (self counts as a neighbor).

    R(i) holds every j that is within i's top-k while i is within j's top-k.
    The self entry is forced in so R(i) is never empty, even when exact
    distance ties push i out of its own first k list positions.
    """
    n = d.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    order = rank_lists(d).order
    top = np.zeros((n, n), dtype=bool)
    np.put_along_axis(top, order[:, :k], True, axis=1)
    np.fill_diagonal(top, True)
    return ReciprocalNeighborhood(k, top & top.T)


def jaccard_distances(r: ReciprocalNeighborhood) -> DistanceMatrix:
    """1 - |R(i) ∩ R(j)| / |R(i) ∪ R(j)| for every pair; zero diagonal, range [0, 1]."""
    m = r.member.astype(np.float64)
    inter = m @ m.T
    sizes = m.sum(axis=1)
    union = sizes[:, None] + sizes[None, :] - inter
    return DistanceMatrix(1.0 - inter / union, DistanceKind.JACCARD)


def combine_final(d_base: DistanceMatrix, d_jaccard: DistanceMatrix) -> DistanceMatrix:
    """Entrywise sum of the min-max scaled base metric and the Jaccard term.

    Scaling the base to [0, 1] gives both terms equal weight regardless of
    feature scale; the result lives in [0, 2].
    """
    if d_base.n != d_jaccard.n:
        raise ValueError(f"size mismatch: base {d_base.n} vs jaccard {d_jaccard.n}")
    return DistanceMatrix(minmax_normalize(d_base.values) + d_jaccard.values, DistanceKind.FINAL)


def rerank_once(d: DistanceMatrix, k: int) -> DistanceMatrix:
    """One full contextual re-ranking round of the input metric.

    Not idempotent: applying it twice keeps refining the metric, which is
    what the iterated schedule relies on.
    """
    return combine_final(d, jaccard_distances(reciprocal_sets(d, k)))
