"""Reading and writing the VOXL occupancy-grid format.

A VOXL file starts with four newline-terminated ASCII header lines::

    VOXL 1
    dim <2|3>
    size <nx> <ny> [<nz>]
    spacing <decimal h>

followed by exactly ``nx*ny(*nz)`` payload bytes, one per voxel
(0x00 exterior, 0x01 interior), row-major with x fastest, then y, then z.
No trailing bytes are allowed. ``read_voxl(write_voxl(v))`` reproduces the
volume exactly; writing re-reads to the same bytes when the header is in
the canonical form produced here (spacing formatted with ``repr``).
"""
from __future__ import annotations

import os

import numpy as np

from .grid import VoxelVolume

MAGIC = b"VOXL"
VERSION = 1


class VoxlFormatError(ValueError):
    """Raised on malformed VOXL data."""


def write_voxl(volume: VoxelVolume) -> bytes:
    """Serialize a volume to VOXL bytes."""
    size = " ".join(str(n) for n in volume.extents)
    header = (
        f"VOXL {VERSION}\n"
        f"dim {volume.dim}\n"
        f"size {size}\n"
        f"spacing {volume.spacing!r}\n"
    )
    return header.encode("ascii") + volume.occupancy.tobytes()


def read_voxl(data: bytes) -> VoxelVolume:
    """Parse VOXL bytes into a volume."""
    lines, payload = _split_header(data)
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MAGIC:
        raise VoxlFormatError(f"malformed header: expected 'VOXL <version>', got {lines[0]!r}")
    if magic[1] != str(VERSION).encode():
        raise VoxlFormatError(f"unsupported VOXL version {magic[1].decode(errors='replace')!r}")

    dim = _header_ints(lines[1], b"dim", 1)[0]
    if dim not in (2, 3):
        raise VoxlFormatError(f"dim must be 2 or 3, got {dim}")
    extents = tuple(_header_ints(lines[2], b"size", dim))
    if any(n < 1 for n in extents):
        raise VoxlFormatError(f"size entries must be positive, got {extents}")

    key, _, value = lines[3].partition(b" ")
    if key != b"spacing":
        raise VoxlFormatError(f"malformed header: expected 'spacing', got {lines[3]!r}")
    try:
        spacing = float(value)
    except ValueError as exc:
        raise VoxlFormatError(f"malformed spacing value {value!r}") from exc
    if not spacing > 0:
        raise VoxlFormatError(f"spacing must be positive, got {spacing}")

    expected = int(np.prod(extents))
    if len(payload) != expected:
        raise VoxlFormatError(
            f"size mismatch: header declares {expected} voxels, payload has {len(payload)} bytes"
        )
    raw = np.frombuffer(payload, dtype=np.uint8)
    if not np.isin(raw, (0, 1)).all():
        bad = int(raw[~np.isin(raw, (0, 1))][0])
        raise VoxlFormatError(f"invalid occupancy byte 0x{bad:02x} (must be 0x00 or 0x01)")
    occupancy = raw.astype(bool).reshape(extents[::-1])
    return VoxelVolume(extents, spacing, occupancy)


def save_voxl(volume: VoxelVolume, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(write_voxl(volume))


def load_voxl(path: str | os.PathLike) -> VoxelVolume:
    with open(path, "rb") as fh:
        return read_voxl(fh.read())


def _split_header(data: bytes) -> tuple[list[bytes], bytes]:
    lines = []
    pos = 0
    for _ in range(4):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise VoxlFormatError("malformed header: fewer than four header lines")
        lines.append(data[pos:nl])
        pos = nl + 1
    return lines, data[pos:]


def _header_ints(line: bytes, key: bytes, count: int) -> list[int]:
    parts = line.split()
    if not parts or parts[0] != key:
        raise VoxlFormatError(f"malformed header: expected {key.decode()!r} line, got {line!r}")
    if len(parts) != count + 1:
        raise VoxlFormatError(
            f"malformed header: {key.decode()!r} expects {count} value(s), got {line!r}"
        )
    try:
        return [int(p) for p in parts[1:]]
    except ValueError as exc:
        raise VoxlFormatError(f"malformed header line {line!r}") from exc
