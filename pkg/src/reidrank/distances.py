"""N x N distance matrices: construction, min-max scaling, text-v1 round trip."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .features import FeatureSet, FormatError

_MAGIC = "reid-dist"
_VERSION = "v1"


class DistanceKind(str, Enum):
    """Provenance tag for a distance matrix."""

    EUCLIDEAN = "euclidean"
    JACCARD = "jaccard"
    FINAL = "final"
    FUSED = "fused"
    COMPOSED = "composed"


@dataclass(frozen=True)
class DistanceMatrix:
    """Nonnegative N x N matrix of pairwise distances, tagged by provenance.

    Euclidean and Jaccard matrices carry a zero diagonal; euclidean ones are
    additionally symmetric.  Fused and composed matrices promise only finite
    nonnegative entries (diffusion output is asymmetric in general).
    """

    values: np.ndarray
    kind: DistanceKind

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "kind", DistanceKind(self.kind))
        self.validate()

    def validate(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if v.shape[0] < 2:
            raise ValueError("distance matrix needs at least 2 rows")
        if not np.all(np.isfinite(v)):
            raise ValueError("distance entries must be finite")
        if np.any(v < 0.0):
            raise ValueError("distance entries must be nonnegative")
        if self.kind in (DistanceKind.EUCLIDEAN, DistanceKind.JACCARD):
            if np.any(np.diag(v) != 0.0):
                raise ValueError(f"{self.kind.value} matrix must have a zero diagonal")
        if self.kind is DistanceKind.EUCLIDEAN:
            if not np.allclose(v, v.T, rtol=1e-9, atol=0.0):
                raise ValueError("euclidean matrix must be symmetric")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def euclidean_distances(fs: FeatureSet) -> DistanceMatrix:
    """Squared L2 distance between every pair of rows."""
    return DistanceMatrix(cdist(fs.vectors, fs.vectors, "sqeuclidean"), DistanceKind.EUCLIDEAN)


def minmax_normalize(values: np.ndarray) -> np.ndarray:
    """Rescale entries to [0, 1]; an all-equal matrix maps to zeros with a warning."""
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        warnings.warn(
            "degenerate distance matrix (all entries equal); normalized to zeros",
            RuntimeWarning,
            stacklevel=2,
        )
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def format_distances(d: DistanceMatrix) -> str:
    """Render in text-v1 form: header then N rows of N floats, 17 significant digits."""
    lines = [f"{_MAGIC} {_VERSION} {d.n}"]
    for row in d.values:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_distances(d: DistanceMatrix, path: str | Path) -> None:
    Path(path).write_text(format_distances(d), encoding="utf-8")


def load_distances(path: str | Path, kind: DistanceKind = DistanceKind.COMPOSED) -> DistanceMatrix:
    """Read a ``reid-dist`` text-v1 file.

    The format does not record provenance, so loaded matrices default to the
    unconstrained ``composed`` kind; pass ``kind`` to assert a stricter one.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError("line 1: missing header")
    head = lines[0].split()
    if len(head) != 3 or head[0] != _MAGIC or head[1] != _VERSION:
        raise FormatError("line 1: expected header 'reid-dist v1 <N>'")
    try:
        n = int(head[2])
    except ValueError:
        raise FormatError("line 1: N must be an integer") from None
    if n < 2:
        raise FormatError(f"line 1: need N >= 2, got {n}")
    if len(lines) - 1 != n:
        raise FormatError(f"expected {n} data rows, found {len(lines) - 1}")
    values = np.empty((n, n), dtype=np.float64)
    for row, line in enumerate(lines[1:], start=1):
        tokens = line.split()
        if len(tokens) != n:
            raise FormatError(f"row {row}: expected {n} values")
        try:
            parsed = [float(t) for t in tokens]
        except ValueError:
            raise FormatError(f"row {row}: invalid value") from None
        if not all(math.isfinite(v) for v in parsed):
            raise FormatError(f"row {row}: non-finite value")
        values[row - 1] = parsed
    return DistanceMatrix(values, kind)
