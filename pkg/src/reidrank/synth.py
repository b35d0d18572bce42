"""Deterministic synthetic benchmark: clustered identities with a per-camera
offset and structured per-image corruption, for desk-scale verification runs."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .features import FeatureSet

# Within-identity noise is split between an isotropic floor and one
# contiguous corrupted coordinate block per image (a partial occlusion of
# the descriptor): the floor carries BACKGROUND_FRACTION of the noise scale,
# the block covers BLOCK_FRACTION of the coordinates at a random position
# and absorbs the remaining power.  Total noise power matches an isotropic
# draw of the same intra_sigma.
BACKGROUND_FRACTION = 0.3
BLOCK_FRACTION = 0.25

# Stock benchmark scales, located with scripts/calibrate_benchmark.py so the
# euclidean baseline lands mid-range (median mAP ~0.68 over 20 seeds,
# inside [0.5, 0.8]) at the stock layout below.
CALIBRATED_INTRA_SIGMA = 1.0
CALIBRATED_CAM_SHIFT_SIGMA = 0.5


@dataclass(frozen=True)
class SynthSpec:
    """Generator layout: identities x cameras x images per camera.

    Every image is identity centroid + camera offset + per-image noise.
    Camera 1 supplies the probes, all other cameras the gallery.  Output is
    a pure function of the spec: the 64-bit ``seed`` feeds numpy's PCG64
    generator, so equal specs give bit-identical feature sets.
    """

    num_identities: int
    cams: int = 2
    per_cam: int = 5
    dim: int = 32
    intra_sigma: float = CALIBRATED_INTRA_SIGMA
    cam_shift_sigma: float = CALIBRATED_CAM_SHIFT_SIGMA
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_identities < 1 or self.per_cam < 1 or self.dim < 1:
            raise ValueError("counts and dimension must be positive")
        if self.cams < 2:
            raise ValueError("need at least 2 cameras for a cross-camera split")
        if self.intra_sigma < 0.0 or self.cam_shift_sigma < 0.0:
            raise ValueError("noise scales must be nonnegative")
        if self.n < 4:
            raise ValueError("total image count must be at least 4")

    @property
    def n(self) -> int:
        return self.num_identities * self.cams * self.per_cam


def generate(spec: SynthSpec) -> FeatureSet:
    """Draw the feature set described by the spec.

    Identity centroids are standard normal; each camera gets a single offset
    vector of scale ``cam_shift_sigma`` shared by all its images.  Per-image
    noise of total scale ``intra_sigma`` is an isotropic floor plus one
    corrupted contiguous block (see the module constants), so an image is
    far from its identity in some coordinates but clean in the rest.  Rows
    are ordered identity-major, then camera (1-based), then image.
    """
    rng = np.random.default_rng(spec.seed)
    ids, cams, per, dim = spec.num_identities, spec.cams, spec.per_cam, spec.dim
    n = spec.n
    centroids = rng.standard_normal((ids, dim))
    offsets = rng.standard_normal((cams, dim)) * spec.cam_shift_sigma

    noise = rng.standard_normal((n, dim)) * (spec.intra_sigma * BACKGROUND_FRACTION)
    width = max(1, int(round(dim * BLOCK_FRACTION)))
    starts = rng.integers(0, dim - width + 1, size=n)
    block_sigma = spec.intra_sigma * np.sqrt(1.0 - BACKGROUND_FRACTION**2) * np.sqrt(dim / width)
    blocks = rng.standard_normal((n, width)) * block_sigma
    columns = starts[:, None] + np.arange(width)[None, :]
    noise[np.arange(n)[:, None], columns] += blocks

    clean = (centroids[:, None, None, :] + offsets[None, :, None, :] + np.zeros((1, 1, per, 1))).reshape(n, dim)
    person_ids = np.repeat(np.arange(ids), cams * per)
    camera_ids = np.tile(np.repeat(np.arange(1, cams + 1), per), ids)
    return FeatureSet(clean + noise, person_ids, camera_ids, camera_ids == 1)


def benchmark_spec(seed: int = 0, **overrides) -> SynthSpec:
    """The calibrated stock benchmark: 25 identities x 2 cameras x 8 images
    per camera (N=400, 16 images per identity), d=32.

    The 16-image identity groups keep the documented neighborhood-budget
    schedules (k up to 14) and the local kernel size (10 or 15) inside one
    identity's support.  Pass field overrides to vary the layout.
    """
    return replace(SynthSpec(num_identities=25, per_cam=8, seed=seed), **overrides)
