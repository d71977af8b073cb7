"""Deterministic voxel shape generators.

Sizes (side lengths, radii, depths) are given in voxel units; ``spacing``
only rescales world units. All generators return volumes that pass
:func:`congruity.grid.validate`, with the shape centered in a grid that
keeps at least ``padding`` exterior voxels on every side.

Two bundled shape families drive the reference experiments:

* :func:`composite_cube_set` - a base cube with 0 to 6 identical cubic
  attachments centered on its faces, in arrangements of increasing count.
* :func:`deviation_set` - ball, cube, cube with one attachment, and the
  same with one face carved concave, at matched interior volume for the
  first two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import VoxelVolume

FACES_3D = ("+x", "-x", "+y", "-y", "+z", "-z")
FACES_2D = ("+x", "-x", "+y", "-y")

DEFAULT_BASE_SIDE = 36
DEFAULT_ATTACH_SIDE = 12
DEFAULT_PADDING = 2


def _face_axis(face: str, dim: int) -> tuple[int, int]:
    """Map a face token like '+x' to (array axis, sign)."""
    faces = FACES_3D if dim == 3 else FACES_2D
    if face not in faces:
        raise ValueError(f"unknown face {face!r} for dim {dim} (choose from {faces})")
    sign = 1 if face[0] == "+" else -1
    spatial = "xyz".index(face[1])
    return dim - 1 - spatial, sign


def make_cube(side: int, padding: int = DEFAULT_PADDING, dim: int = 3,
              spacing: float = 1.0) -> VoxelVolume:
    """Solid axis-aligned cube (square in 2D) of ``side**dim`` interior voxels."""
    if side < 1:
        raise ValueError(f"side must be >= 1, got {side}")
    if padding < 1:
        raise ValueError(f"padding must be >= 1, got {padding}")
    n = side + 2 * padding
    occ = np.zeros((n,) * dim, dtype=bool)
    box = tuple(slice(padding, padding + side) for _ in range(dim))
    occ[box] = True
    return VoxelVolume((n,) * dim, spacing, occ)


def make_sphere(radius: float, padding: int = DEFAULT_PADDING, dim: int = 3,
                spacing: float = 1.0) -> VoxelVolume:
    """Discretized ball: a voxel is interior iff its center lies within
    ``radius`` (voxel units) of the grid center."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if padding < 1:
        raise ValueError(f"padding must be >= 1, got {padding}")
    n = 2 * (math.ceil(radius) + padding) + 1
    center = n // 2
    coords = np.indices((n,) * dim)
    sq = ((coords - center) ** 2).sum(axis=0)
    occ = sq <= radius * radius
    return VoxelVolume((n,) * dim, spacing, occ)


def matched_ball_radius(side: int, dim: int = 3) -> float:
    """Radius whose continuum ball volume equals a cube of the given side."""
    if dim == 3:
        return (3.0 * side**3 / (4.0 * math.pi)) ** (1.0 / 3.0)
    return side / math.sqrt(math.pi)


@dataclass(frozen=True)
class CompositeCubeSpec:
    """Base cube with identical cubic attachments centered on chosen faces.

    ``base_side`` and ``attach_side`` must have equal parity so each
    attachment centers exactly on its face; attachments sit flush against
    the base and cannot overlap one another.
    """

    base_side: int
    attach_side: int
    faces: tuple[str, ...] = ()
    dim: int = 3
    padding: int = DEFAULT_PADDING
    spacing: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "faces", tuple(self.faces))
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.base_side < 1:
            raise ValueError(f"base_side must be >= 1, got {self.base_side}")
        if not 0 < self.attach_side < self.base_side:
            raise ValueError(
                f"attach_side must be in (0, base_side), got {self.attach_side}"
            )
        if (self.base_side - self.attach_side) % 2:
            raise ValueError(
                "base_side and attach_side must have equal parity so "
                "attachments center exactly on their face"
            )
        if self.padding < 1:
            raise ValueError(f"padding must be >= 1, got {self.padding}")
        if len(set(self.faces)) != len(self.faces):
            raise ValueError(f"duplicate faces in {self.faces}")
        for face in self.faces:
            _face_axis(face, self.dim)


def make_composite_cube(spec: CompositeCubeSpec) -> VoxelVolume:
    """Base cube plus one centered attachment per listed face."""
    base, attach = spec.base_side, spec.attach_side
    n = base + 2 * (attach + spec.padding)
    occ = np.zeros((n,) * spec.dim, dtype=bool)
    lo = spec.padding + attach
    occ[tuple(slice(lo, lo + base) for _ in range(spec.dim))] = True
    centered = slice(lo + (base - attach) // 2, lo + (base + attach) // 2)
    for face in spec.faces:
        axis, sign = _face_axis(face, spec.dim)
        box = [centered] * spec.dim
        box[axis] = slice(lo + base, lo + base + attach) if sign > 0 else slice(lo - attach, lo)
        region = tuple(box)
        if occ[region].any():
            raise ValueError(f"attachment on face {face} overlaps existing interior")
        occ[region] = True
    return VoxelVolume((n,) * spec.dim, spec.spacing, occ)


def make_cube_with_attachment(base_side: int, attach_side: int, face: str = "+x",
                              dim: int = 3, padding: int = DEFAULT_PADDING,
                              spacing: float = 1.0) -> VoxelVolume:
    """Base cube with a single centered cubic attachment on one face."""
    spec = CompositeCubeSpec(base_side, attach_side, (face,), dim=dim,
                             padding=padding, spacing=spacing)
    return make_composite_cube(spec)


def make_concave_face(volume: VoxelVolume, face: str, depth: float) -> VoxelVolume:
    """Carve a half-ball dish of radius ``depth`` (voxel units) into a face.

    The named face of the interior bounding box must be planar (a filled
    rectangle); the half-ball is centered on that rectangle's center, on
    the boundary plane, so only voxel centers strictly inside the dish are
    removed. Depths below half a voxel remove nothing.
    """
    if not depth > 0:
        raise ValueError(f"depth must be positive, got {depth}")
    occ = volume.occupancy
    idx = np.argwhere(occ)
    if idx.size == 0:
        raise ValueError("volume has no interior")
    lo, hi = idx.min(axis=0), idx.max(axis=0)
    axis, sign = _face_axis(face, volume.dim)
    extent_along = hi[axis] - lo[axis] + 1
    if depth >= extent_along / 2:
        raise ValueError(
            f"depth {depth} must be below half the shape extent "
            f"({extent_along}) along {face[1]}"
        )

    plane_index = hi[axis] if sign > 0 else lo[axis]
    face_slice = occ.take(plane_index, axis=axis)
    fidx = np.argwhere(face_slice)
    flo, fhi = fidx.min(axis=0), fidx.max(axis=0)
    rect = tuple(slice(a, b + 1) for a, b in zip(flo, fhi))
    if face_slice[rect].size != len(fidx) or not face_slice[rect].all():
        raise ValueError(f"face {face} of the interior bounding box is not planar")

    center = np.empty(volume.dim)
    lateral = [a for a in range(volume.dim) if a != axis]
    for a, c in zip(lateral, (flo + fhi) / 2.0):
        center[a] = c
    center[axis] = plane_index + 0.5 * sign

    coords = np.indices(occ.shape)
    sq = sum((coords[a] - center[a]) ** 2 for a in range(volume.dim))
    carved = occ & ~(sq <= depth * depth)
    if not carved.any():
        raise ValueError("carving removed the entire interior")
    return volume.with_occupancy(carved)


def composite_cube_set(base_side: int = DEFAULT_BASE_SIDE,
                       attach_side: int = DEFAULT_ATTACH_SIDE,
                       padding: int = DEFAULT_PADDING) -> list[tuple[str, VoxelVolume]]:
    """The attachment-count family: 0..6 attachments, with both facing and
    non-facing two-attachment arrangements."""
    arrangements = [
        ("attach0", ()),
        ("attach1", ("+x",)),
        ("attach2_facing", ("+x", "-x")),
        ("attach2_nonfacing", ("+x", "+y")),
        ("attach3", ("+x", "+y", "+z")),
        ("attach4", ("+x", "-x", "+y", "-y")),
        ("attach5", ("+x", "-x", "+y", "-y", "+z")),
        ("attach6", FACES_3D),
    ]
    return [
        (name, make_composite_cube(CompositeCubeSpec(base_side, attach_side, faces,
                                                     padding=padding)))
        for name, faces in arrangements
    ]


def deviation_set(base_side: int = DEFAULT_BASE_SIDE,
                  attach_side: int = DEFAULT_ATTACH_SIDE,
                  padding: int = DEFAULT_PADDING) -> list[tuple[str, VoxelVolume]]:
    """Shapes of increasing deviation from the ball, at matched volume.

    Ball radius matches the cube's interior volume (within a fraction of a
    percent after discretization); the concave variant carves a dish of
    depth ``base_side / 5`` into the face opposite the attachment.
    """
    with_attachment = make_cube_with_attachment(base_side, attach_side, "+x",
                                                padding=padding)
    return [
        ("ball", make_sphere(matched_ball_radius(base_side), padding=padding)),
        ("cube", make_cube(base_side, padding=padding)),
        ("cube_attachment", with_attachment),
        ("cube_attachment_concave",
         make_concave_face(with_attachment, "-x", base_side / 5.0)),
    ]
