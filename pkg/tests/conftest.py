"""Shared test helpers: random valid volumes and independent oracles.

The oracles here deliberately avoid the production code paths: the dense
solver assembles the stencil voxel by voxel through dictionary lookups and
solves with LAPACK; the distance oracle scans every exterior voxel for
every interior voxel.
"""
from __future__ import annotations

import numpy as np
import pytest

from congruity import VoxelVolume


def random_volume(rng: np.random.Generator, dim: int, min_extent: int = 4,
                  max_extent: int = 9, spacing: float = 1.0,
                  fill: float = 0.55) -> VoxelVolume:
    """Random occupancy with a guaranteed empty border and >= 1 interior voxel."""
    extents = tuple(int(rng.integers(min_extent, max_extent + 1)) for _ in range(dim))
    occ = rng.random(extents[::-1]) < fill
    for axis in range(dim):
        occ[tuple(0 if a == axis else slice(None) for a in range(dim))] = False
        occ[tuple(-1 if a == axis else slice(None) for a in range(dim))] = False
    if not occ.any():
        occ[tuple(n // 2 for n in occ.shape)] = True
    return VoxelVolume(extents, spacing, occ)


def rotate_quarter(volume: VoxelVolume) -> VoxelVolume:
    """Rotate the occupancy 90 degrees in the (x, y) plane."""
    occ = np.rot90(volume.occupancy, k=1, axes=(volume.dim - 2, volume.dim - 1))
    return VoxelVolume(occ.shape[::-1], volume.spacing, occ)


def translate_one(volume: VoxelVolume) -> VoxelVolume:
    """Shift the occupancy by +1 voxel along every axis.

    Needs two empty layers on the far faces so the result stays valid;
    the bundled generators pad by two.
    """
    occ = np.roll(volume.occupancy, 1, axis=tuple(range(volume.dim)))
    return volume.with_occupancy(occ)


def brute_force_distance(volume: VoxelVolume) -> np.ndarray:
    """O(n^2) nearest-exterior-center distance for every interior voxel."""
    occ = volume.occupancy
    exterior = np.argwhere(~occ)
    out = np.zeros(occ.shape)
    for p in np.argwhere(occ):
        sq = ((exterior - p) ** 2).sum(axis=1).min()
        out[tuple(p)] = volume.spacing * np.sqrt(sq)
    return out


def dense_oracle_solution(volume: VoxelVolume, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the screened stencil voxel by voxel and solve densely.

    Returns (values, positions); positions are (dim,)-index rows in the
    same row-major order the solver numbers its unknowns.
    """
    occ = volume.occupancy
    positions = np.argwhere(occ)
    index = {tuple(p): i for i, p in enumerate(positions)}
    n = len(positions)
    h = volume.spacing
    dim = volume.dim
    matrix = np.zeros((n, n))
    for i, p in enumerate(positions):
        matrix[i, i] = 2.0 * dim / h**2 + 1.0 / rho**2
        for axis in range(dim):
            for step in (-1, 1):
                q = list(p)
                q[axis] += step
                j = index.get(tuple(q))
                if j is not None:
                    matrix[i, j] = -1.0 / h**2
    return np.linalg.solve(matrix, np.ones(n)), positions


@pytest.fixture(scope="session")
def session_rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
