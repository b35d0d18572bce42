"""Labeled feature sets: text-v1 ingestion, validation, and even column splitting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ROLE_PROBE = "probe"
ROLE_GALLERY = "gallery"

_MAGIC = "reid-features"
_VERSION = "v1"


class FormatError(ValueError):
    """A feature or distance file does not conform to its text-v1 format."""


@dataclass(frozen=True)
class FeatureSet:
    """N feature vectors with person/camera labels and a probe/gallery split.

    ``probe_mask[i]`` is True for probe (query) rows and False for gallery
    rows; the two roles partition the set.  Negative person ids mark
    distractors: they are ranked like any other row but never count as a
    true match.  Instances are immutable; every operation returns new data.
    """

    vectors: np.ndarray
    person_ids: np.ndarray
    camera_ids: np.ndarray
    probe_mask: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "vectors", np.asarray(self.vectors, dtype=np.float64))
        object.__setattr__(self, "person_ids", np.asarray(self.person_ids, dtype=np.int64))
        object.__setattr__(self, "camera_ids", np.asarray(self.camera_ids, dtype=np.int64))
        object.__setattr__(self, "probe_mask", np.asarray(self.probe_mask, dtype=bool))
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array")
        n, d = self.vectors.shape
        if n < 2:
            raise ValueError(f"need at least 2 rows, got {n}")
        if d < 1:
            raise ValueError("feature dimension must be >= 1")
        for name in ("person_ids", "camera_ids", "probe_mask"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have length {n}")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("feature values must be finite")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def probe_indices(self) -> np.ndarray:
        return np.flatnonzero(self.probe_mask)

    @property
    def gallery_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.probe_mask)


@dataclass(frozen=True)
class SubFeatureSplit:
    """Column-contiguous partition of one feature set into label-identical parts.

    Part ``i`` covers columns ``offsets[i]:offsets[i+1]`` of the original
    matrix; widths differ by at most one column.
    """

    parts: tuple[FeatureSet, ...]
    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("a split needs at least 2 parts")
        if len(self.offsets) != len(self.parts) + 1 or self.offsets[0] != 0:
            raise ValueError("offsets must have one more entry than parts and start at 0")
        widths = [b - a for a, b in zip(self.offsets, self.offsets[1:])]
        if any(w < 1 for w in widths):
            raise ValueError("every part must keep at least one column")
        if max(widths) - min(widths) > 1:
            raise ValueError("part widths may differ by at most 1")
        for part, width in zip(self.parts, widths):
            if part.dim != width:
                raise ValueError("part dimensions do not match offsets")

    @property
    def s(self) -> int:
        return len(self.parts)


def load_features(path: str | Path, format: str = "text-v1") -> FeatureSet:
    """Read a ``reid-features`` text-v1 file.

    Format: line 1 is ``reid-features v1 <N> <d>``; each of the N following
    lines is ``<person_id> <camera_id> <probe|gallery> <v1> ... <vd>``,
    whitespace separated, UTF-8.  Malformed content raises
    :class:`FormatError` naming the offending row.
    """
    if format != "text-v1":
        raise ValueError(f"unknown feature format {format!r}")
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError("line 1: missing header")
    head = lines[0].split()
    if len(head) != 4 or head[0] != _MAGIC or head[1] != _VERSION:
        raise FormatError("line 1: expected header 'reid-features v1 <N> <d>'")
    try:
        n, d = int(head[2]), int(head[3])
    except ValueError:
        raise FormatError("line 1: N and d must be integers") from None
    if n < 2:
        raise FormatError(f"line 1: need N >= 2, got {n}")
    if d < 1:
        raise FormatError(f"line 1: need d >= 1, got {d}")
    if len(lines) - 1 != n:
        raise FormatError(f"expected {n} data rows, found {len(lines) - 1}")

    vectors = np.empty((n, d), dtype=np.float64)
    person_ids = np.empty(n, dtype=np.int64)
    camera_ids = np.empty(n, dtype=np.int64)
    probe_mask = np.empty(n, dtype=bool)
    for row, line in enumerate(lines[1:], start=1):
        tokens = line.split()
        if len(tokens) != 3 + d:
            raise FormatError(f"row {row}: expected {d} values")
        try:
            person_ids[row - 1] = int(tokens[0])
            camera_ids[row - 1] = int(tokens[1])
        except ValueError:
            raise FormatError(f"row {row}: invalid integer label") from None
        if tokens[2] == ROLE_PROBE:
            probe_mask[row - 1] = True
        elif tokens[2] == ROLE_GALLERY:
            probe_mask[row - 1] = False
        else:
            raise FormatError(f"row {row}: role must be 'probe' or 'gallery'")
        try:
            values = [float(t) for t in tokens[3:]]
        except ValueError:
            raise FormatError(f"row {row}: invalid feature value") from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError(f"row {row}: non-finite value")
        vectors[row - 1] = values
    return FeatureSet(vectors, person_ids, camera_ids, probe_mask)


def format_features(fs: FeatureSet) -> str:
    """Render a feature set in canonical text-v1 form (17 significant digits)."""
    lines = [f"{_MAGIC} {_VERSION} {fs.n} {fs.dim}"]
    for i in range(fs.n):
        role = ROLE_PROBE if fs.probe_mask[i] else ROLE_GALLERY
        values = " ".join(f"{v:.17g}" for v in fs.vectors[i])
        lines.append(f"{fs.person_ids[i]} {fs.camera_ids[i]} {role} {values}")
    return "\n".join(lines) + "\n"


def write_features(fs: FeatureSet, path: str | Path) -> None:
    Path(path).write_text(format_features(fs), encoding="utf-8")


def split_features(fs: FeatureSet, s: int) -> SubFeatureSplit:
    """Split columns evenly into ``s`` parts; leading parts take the remainder.

    With ``d = q*s + r`` the first ``r`` parts get ``q + 1`` columns and the
    rest get ``q``.  Labels and roles are shared unchanged by every part.
    """
    if s < 2:
        raise ValueError(f"need at least 2 sub-features, got {s}")
    if s > fs.dim:
        raise ValueError(f"cannot split {fs.dim} columns into {s} non-empty parts")
    base, rem = divmod(fs.dim, s)
    offsets = [0]
    for i in range(s):
        offsets.append(offsets[-1] + base + (1 if i < rem else 0))
    parts = tuple(
        FeatureSet(
            fs.vectors[:, offsets[i] : offsets[i + 1]].copy(),
            fs.person_ids,
            fs.camera_ids,
            fs.probe_mask,
        )
        for i in range(s)
    )
    return SubFeatureSplit(parts, tuple(offsets))


def l2_normalize(fs: FeatureSet) -> FeatureSet:
    """Scale every row to unit L2 norm; all-zero rows pass through unchanged."""
    norms = np.linalg.norm(fs.vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return FeatureSet(fs.vectors / norms, fs.person_ids, fs.camera_ids, fs.probe_mask)
