"""Voxel occupancy grids and scalar fields.

Grids are axis-aligned with uniform spacing ``h`` (world units per voxel
edge). Arrays are stored C-contiguous with spatial x as the fastest-varying
index, i.e. a 3D grid of extents ``(nx, ny, nz)`` is held in an array of
shape ``(nz, ny, nx)``. Flattened ("row-major") voxel indices therefore run
x first, then y, then z.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

AXIS_NAMES = "xyz"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class VoxelVolume:
    """Binary occupancy grid in 2 or 3 dimensions.

    Parameters
    ----------
    extents : tuple of int
        Voxel counts per spatial axis, ``(nx, ny)`` or ``(nx, ny, nz)``.
    spacing : float
        World units per voxel edge.
    occupancy : ndarray of bool
        Shape ``extents[::-1]``; True marks interior voxels.
    """

    extents: tuple[int, ...]
    spacing: float
    occupancy: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        extents = tuple(int(n) for n in self.extents)
        if len(extents) not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {len(extents)}")
        if any(n < 1 for n in extents):
            raise ValueError(f"extents must be positive, got {extents}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        occ = np.asarray(self.occupancy)
        if occ.shape != extents[::-1]:
            raise ValueError(
                f"occupancy shape {occ.shape} does not match extents "
                f"{extents} (expected {extents[::-1]})"
            )
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "occupancy", _freeze(occ.astype(bool)))

    @property
    def dim(self) -> int:
        return len(self.extents)

    @property
    def voxel_count(self) -> int:
        return int(np.prod(self.extents))

    @property
    def interior_count(self) -> int:
        return int(self.occupancy.sum())

    def with_occupancy(self, occupancy: np.ndarray) -> "VoxelVolume":
        """Same grid geometry, new occupancy pattern."""
        return VoxelVolume(self.extents, self.spacing, occupancy)


@dataclass(frozen=True)
class ScalarField:
    """One real value per voxel on the grid of a parent volume.

    Exterior voxels carry a fixed value (0 for distance fields and for
    Dirichlet solutions); ``interior`` mirrors the parent occupancy.
    """

    extents: tuple[int, ...]
    spacing: float
    values: np.ndarray = field(repr=False)
    interior: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        extents = tuple(int(n) for n in self.extents)
        values = np.asarray(self.values, dtype=np.float64)
        interior = np.asarray(self.interior, dtype=bool)
        if values.shape != extents[::-1]:
            raise ValueError(
                f"values shape {values.shape} does not match extents {extents}"
            )
        if interior.shape != values.shape:
            raise ValueError("interior mask shape does not match values")
        if not np.isfinite(values).all():
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "interior", _freeze(interior))

    @property
    def dim(self) -> int:
        return len(self.extents)

    def interior_values(self) -> np.ndarray:
        return self.values[self.interior]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`; empty ``problems`` means the volume is valid."""

    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self) -> str:
        return "valid" if self.ok else "; ".join(self.problems)


def validate(volume: VoxelVolume) -> ValidationReport:
    """Check the occupancy invariants of a volume.

    A valid volume has at least one interior and one exterior voxel, and
    every voxel on a face of the grid box is exterior (one full layer of
    exterior padding), so a zero Dirichlet boundary is always imposable.
    """
    problems: list[str] = []
    occ = volume.occupancy
    if not occ.any():
        problems.append("no interior voxel")
    if occ.all():
        problems.append("no exterior voxel")
    for axis in range(volume.dim):
        # array axis 0 is the last spatial axis
        name = AXIS_NAMES[volume.dim - 1 - axis]
        first = occ.take(0, axis=axis)
        last = occ.take(-1, axis=axis)
        if first.any():
            problems.append(f"missing exterior padding on -{name} face")
        if last.any():
            problems.append(f"missing exterior padding on +{name} face")
    return ValidationReport(tuple(problems))


def require_valid(volume: VoxelVolume) -> VoxelVolume:
    """Raise ``ValueError`` if the volume fails :func:`validate`."""
    report = validate(volume)
    if not report.ok:
        raise ValueError(f"invalid volume: {report}")
    return volume


def interior_measure(volume: VoxelVolume) -> float:
    """Interior volume (3D) or area (2D) in world units: count times h^dim."""
    return volume.interior_count * volume.spacing**volume.dim
