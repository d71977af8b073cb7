from __future__ import annotations

import numpy as np
import pytest

from congruity import VoxelVolume, VoxlFormatError, load_voxl, read_voxl, save_voxl, write_voxl
from congruity.shapes import make_cube

from conftest import random_volume


def _single_voxel_volume():
    occ = np.zeros((3, 3, 3), dtype=bool)
    occ[1, 1, 1] = True
    return VoxelVolume((3, 3, 3), 1.0, occ)


def _assert_volumes_equal(a, b):
    assert a.extents == b.extents
    assert a.spacing == b.spacing
    assert np.array_equal(a.occupancy, b.occupancy)


def test_round_trip_single_voxel():
    vol = _single_voxel_volume()
    _assert_volumes_equal(vol, read_voxl(write_voxl(vol)))


def test_header_is_canonical():
    data = write_voxl(_single_voxel_volume())
    assert data.startswith(b"VOXL 1\ndim 3\nsize 3 3 3\nspacing 1.0\n")
    assert len(data) == len(b"VOXL 1\ndim 3\nsize 3 3 3\nspacing 1.0\n") + 27


def test_round_trip_random_volumes(session_rng):
    for _ in range(25):
        dim = int(session_rng.integers(2, 4))
        spacing = float(session_rng.choice([0.25, 0.5, 1.0, 2.75]))
        vol = random_volume(session_rng, dim, spacing=spacing)
        back = read_voxl(write_voxl(vol))
        _assert_volumes_equal(vol, back)


def test_canonical_bytes_round_trip_exactly(session_rng):
    for _ in range(10):
        vol = random_volume(session_rng, int(session_rng.integers(2, 4)))
        data = write_voxl(vol)
        assert write_voxl(read_voxl(data)) == data


def test_payload_truncated_by_one_byte():
    data = write_voxl(_single_voxel_volume())
    with pytest.raises(VoxlFormatError, match="size mismatch"):
        read_voxl(data[:-1])


def test_trailing_bytes_rejected():
    data = write_voxl(_single_voxel_volume())
    with pytest.raises(VoxlFormatError, match="size mismatch"):
        read_voxl(data + b"\x00")


def test_unsupported_version_rejected():
    data = write_voxl(_single_voxel_volume()).replace(b"VOXL 1", b"VOXL 2", 1)
    with pytest.raises(VoxlFormatError, match="unsupported VOXL version"):
        read_voxl(data)


def test_bad_magic_rejected():
    data = write_voxl(_single_voxel_volume()).replace(b"VOXL 1", b"LXOV 1", 1)
    with pytest.raises(VoxlFormatError, match="malformed header"):
        read_voxl(data)


def test_occupancy_byte_outside_01_rejected():
    data = bytearray(write_voxl(_single_voxel_volume()))
    data[-1] = 0x02
    with pytest.raises(VoxlFormatError, match="invalid occupancy byte 0x02"):
        read_voxl(bytes(data))


def test_missing_header_lines_rejected():
    with pytest.raises(VoxlFormatError, match="fewer than four header lines"):
        read_voxl(b"VOXL 1\ndim 3\n")


def test_wrong_size_entry_count_rejected():
    data = b"VOXL 1\ndim 3\nsize 3 3\nspacing 1.0\n" + b"\x00" * 9
    with pytest.raises(VoxlFormatError, match="size"):
        read_voxl(data)


def test_non_numeric_spacing_rejected():
    data = b"VOXL 1\ndim 2\nsize 3 3\nspacing fast\n" + b"\x00" * 9
    with pytest.raises(VoxlFormatError, match="malformed spacing"):
        read_voxl(data)


def test_negative_spacing_rejected():
    data = b"VOXL 1\ndim 2\nsize 3 3\nspacing -1.0\n" + b"\x00" * 9
    with pytest.raises(VoxlFormatError, match="spacing must be positive"):
        read_voxl(data)


def test_dim_must_be_2_or_3():
    data = b"VOXL 1\ndim 4\nsize 3 3 3 3\nspacing 1.0\n" + b"\x00" * 81
    with pytest.raises(VoxlFormatError, match="dim must be 2 or 3"):
        read_voxl(data)


def test_file_round_trip(tmp_path):
    vol = make_cube(4, spacing=0.5)
    path = tmp_path / "cube.voxl"
    save_voxl(vol, path)
    _assert_volumes_equal(vol, load_voxl(path))
