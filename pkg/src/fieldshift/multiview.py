"""Multi-view ensembling: per-view conversion and voxelwise average fusion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .training import convert_volume
from .volumes import Axis, Volume


@dataclass
class ViewEnsemble:
    """One trained model per orthogonal view, sharing an architecture."""

    models: Mapping[Axis, object]
    architecture: str = "uconvert"

    def __post_init__(self):
        keys = {Axis.coerce(a) for a in self.models}
        if keys != set(Axis):
            missing = sorted(a.name.lower() for a in set(Axis) - keys)
            raise ValueError(f"ensemble needs all three views; missing {missing}")
        self.models = {Axis.coerce(a): m for a, m in self.models.items()}


def fuse(volumes: Sequence[Volume], weights=None) -> Volume:
    """Voxelwise (optionally weighted) mean of same-geometry volumes."""
    volumes = list(volumes)
    if not volumes:
        raise ValueError("no volumes to fuse")
    first = volumes[0]
    for v in volumes[1:]:
        if v.shape != first.shape or v.spacing != first.spacing:
            raise ValueError(
                f"geometry mismatch: {first.shape}/{first.spacing} vs "
                f"{v.shape}/{v.spacing}"
            )
    stacked = np.stack([v.data.astype(np.float64) for v in volumes])
    if weights is None:
        fused = stacked.mean(axis=0)
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(volumes),):
            raise ValueError(
                f"need one weight per volume, got {weights.shape} for {len(volumes)}"
            )
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {weights.sum()}")
        fused = np.tensordot(weights, stacked, axes=1)
    return Volume(
        fused.astype(np.float32),
        spacing=first.spacing,
        intensity_range=first.intensity_range,
    )


def multi_view_convert(ensemble: ViewEnsemble, source: Volume) -> tuple:
    """Convert along all three views and fuse; returns (fused, per-view dict)."""
    per_view = {}
    for axis in Axis:
        model = ensemble.models[axis]
        per_view[axis] = convert_volume(model, source, axis)
    fused = fuse([per_view[a] for a in Axis])
    return fused, per_view
