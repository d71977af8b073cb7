"""Exact Euclidean distance to the boundary and equidistant voxel bands.

The distance of an interior voxel is measured from its center to the
nearest exterior voxel center, in world units; exterior voxels carry 0.
Under this convention the smallest attainable interior distance is one
voxel (``h``), so bands are meaningful only for positive target distances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import ScalarField, VoxelVolume, require_valid


class EmptyBandError(ValueError):
    """No interior voxel falls inside the requested distance window."""


def distance_transform(volume: VoxelVolume) -> ScalarField:
    """Exact Euclidean distance transform of the interior.

    Computed from the exact nearest-exterior feature transform; squared
    distances are integer voxel counts, so results are bit-identical to a
    brute-force nearest-exterior search.
    """
    require_valid(volume)
    occ = volume.occupancy
    nearest = ndimage.distance_transform_edt(
        occ, return_distances=False, return_indices=True
    )
    coords = np.indices(occ.shape)
    sq = np.zeros(occ.shape, dtype=np.int64)
    for axis in range(volume.dim):
        delta = nearest[axis] - coords[axis]
        sq += delta * delta
    values = volume.spacing * np.sqrt(sq.astype(np.float64))
    values[~occ] = 0.0
    return ScalarField(volume.extents, volume.spacing, values, occ)


def max_thickness(dist: ScalarField) -> float:
    """Largest interior distance to the boundary (the shape's inradius)."""
    interior = dist.interior_values()
    if interior.size == 0:
        raise ValueError("distance field has no interior")
    return float(interior.max())


@dataclass(frozen=True)
class Band:
    """Interior voxels at a fixed distance from the boundary.

    ``indices`` are row-major flat voxel indices (x fastest), ascending;
    every one satisfies ``|d - delta| <= tolerance``. Bands are non-empty
    by construction.
    """

    delta: float
    tolerance: float
    indices: np.ndarray
    extents: tuple[int, ...]
    spacing: float

    def __post_init__(self) -> None:
        indices = np.asarray(self.indices, dtype=np.int64)
        if indices.size == 0:
            raise EmptyBandError(
                f"no interior voxel within {self.tolerance} of distance {self.delta}"
            )
        indices.flags.writeable = False
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "extents", tuple(int(n) for n in self.extents))

    def __len__(self) -> int:
        return int(self.indices.size)


def extract_band(dist: ScalarField, delta: float, tolerance: float | None = None) -> Band:
    """All interior voxels with ``|d - delta| <= tolerance``.

    ``tolerance`` defaults to half a voxel (``h / 2``), the discrete analog
    of a one-voxel-thick iso-distance layer.
    """
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if tolerance is None:
        tolerance = dist.spacing / 2.0
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    selected = dist.interior & (np.abs(dist.values - delta) <= tolerance)
    indices = np.flatnonzero(selected.ravel())
    if indices.size == 0:
        raise EmptyBandError(
            f"no interior voxel within {tolerance} of distance {delta} "
            f"(max thickness {max_thickness(dist)})"
        )
    return Band(float(delta), float(tolerance), indices, dist.extents, dist.spacing)
