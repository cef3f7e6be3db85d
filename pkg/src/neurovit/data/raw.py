"""Raw volume container: the toolkit's own on-disk format.

Layout (little-endian):

=========  ======================================
bytes      field
=========  ======================================
4          magic ``VOL1``
4          u32 version (currently 1)
12         3 x u32 dims (nx, ny, nz)
12         3 x f32 spacing (mm per voxel)
rest       nx*ny*nz f32 values, x varying fastest
=========  ======================================

Write followed by read is bit-identical on dims, spacing, and data.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import MalformedHeaderError, TruncatedFileError
from .volume import Volume

MAGIC = b"VOL1"
VERSION = 1
_HEADER = struct.Struct("<4sI3I3f")


def write_raw(path, v: Volume) -> None:
    """Write a volume in the ``VOL1`` format."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, *v.dims, *v.spacing))
        fh.write(v.flat_x_fastest().astype("<f4").tobytes())


def read_raw(path) -> Volume:
    """Read a ``VOL1`` file written by :func:`write_raw`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise TruncatedFileError(f"{path}: shorter than the VOL1 header")
    magic, version, nx, ny, nz, sx, sy, sz = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise MalformedHeaderError(f"{path}: unsupported VOL1 version {version}")
    if min(nx, ny, nz) < 1:
        raise MalformedHeaderError(f"{path}: invalid dims {(nx, ny, nz)}")
    n_values = nx * ny * nz
    need = _HEADER.size + 4 * n_values
    if len(blob) != need:
        raise TruncatedFileError(
            f"{path}: payload length mismatch ({len(blob)} bytes, expected {need})"
        )
    flat = np.frombuffer(blob, dtype="<f4", count=n_values, offset=_HEADER.size)
    return Volume.from_flat(flat, (nx, ny, nz), (sx, sy, sz))
