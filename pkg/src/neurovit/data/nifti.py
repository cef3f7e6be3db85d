"""Minimal NIfTI-1 reader.

Supports exactly the subset needed to ingest pre-registered scans:
uncompressed single-file images (magic ``n+1``), datatypes uint8 / int16 /
float32 / float64, three spatial dimensions (trailing dims may be present
but must be 1).  Orientation and affine fields are ignored on purpose —
inputs are assumed already registered to a common template upstream.

Header fields read: sizeof_hdr, dim, datatype, pixdim, vox_offset,
scl_slope, scl_inter, magic.  Values are scaled by ``scl_slope`` /
``scl_inter`` when ``scl_slope != 0``.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import (
    CompressedNiftiError,
    MalformedHeaderError,
    TruncatedFileError,
    UnsupportedFormatError,
)
from .volume import Volume

HEADER_SIZE = 348
GZIP_MAGIC = b"\x1f\x8b"

# NIfTI-1 datatype code -> numpy dtype (little/big endian applied later)
_DTYPES = {
    2: "u1",   # uint8
    4: "i2",   # int16
    16: "f4",  # float32
    64: "f8",  # float64
}


def read_nifti(path) -> Volume:
    """Read an uncompressed single-file NIfTI-1 image as a :class:`Volume`."""
    with open(path, "rb") as fh:
        blob = fh.read()

    if blob[:2] == GZIP_MAGIC:
        raise CompressedNiftiError(
            f"{path}: compressed NIfTI (.nii.gz) unsupported; decompress first"
        )
    if len(blob) < HEADER_SIZE:
        raise MalformedHeaderError(
            f"{path}: file shorter than the {HEADER_SIZE}-byte NIfTI-1 header"
        )

    # Endianness is detected from sizeof_hdr, which must decode to 348.
    endian = "<"
    (sizeof_hdr,) = struct.unpack_from("<i", blob, 0)
    if sizeof_hdr != HEADER_SIZE:
        (sizeof_hdr,) = struct.unpack_from(">i", blob, 0)
        endian = ">"
    if sizeof_hdr != HEADER_SIZE:
        raise MalformedHeaderError(
            f"{path}: sizeof_hdr != {HEADER_SIZE}; not a NIfTI-1 file"
        )

    magic = blob[344:348]
    if magic[:3] != b"n+1":
        if magic[:3] == b"ni1":
            raise UnsupportedFormatError(
                f"{path}: two-file NIfTI ('ni1') unsupported; need single-file 'n+1'"
            )
        raise MalformedHeaderError(f"{path}: bad NIfTI magic {magic!r}")

    dim = struct.unpack_from(f"{endian}8h", blob, 40)
    datatype = struct.unpack_from(f"{endian}h", blob, 70)[0]
    pixdim = struct.unpack_from(f"{endian}8f", blob, 76)
    vox_offset = struct.unpack_from(f"{endian}f", blob, 108)[0]
    scl_slope = struct.unpack_from(f"{endian}f", blob, 112)[0]
    scl_inter = struct.unpack_from(f"{endian}f", blob, 116)[0]

    ndim = dim[0]
    if ndim < 3 or ndim > 7:
        raise MalformedHeaderError(f"{path}: dim[0] == {ndim}, expected 3..7")
    if any(dim[k] > 1 for k in range(4, ndim + 1)):
        raise UnsupportedFormatError(
            f"{path}: {ndim}-D image with non-singleton trailing dims unsupported"
        )
    dims = tuple(int(dim[k]) for k in (1, 2, 3))
    if any(d < 1 for d in dims):
        raise MalformedHeaderError(f"{path}: non-positive spatial dims {dims}")

    if datatype not in _DTYPES:
        raise UnsupportedFormatError(
            f"{path}: datatype code {datatype} unsupported "
            f"(supported: {sorted(_DTYPES)})"
        )
    dtype = np.dtype(endian + _DTYPES[datatype])

    offset = int(vox_offset) if vox_offset >= HEADER_SIZE else HEADER_SIZE + 4
    n_values = dims[0] * dims[1] * dims[2]
    need = offset + n_values * dtype.itemsize
    if len(blob) < need:
        raise TruncatedFileError(
            f"{path}: payload truncated ({len(blob)} bytes, need {need})"
        )

    flat = np.frombuffer(blob, dtype=dtype, count=n_values, offset=offset)
    flat = flat.astype(np.float32)
    if scl_slope != 0.0:
        flat = flat * np.float32(scl_slope) + np.float32(scl_inter)

    # Non-positive pixdim entries occur in the wild; fall back to 1 mm.
    spacing = tuple(float(pixdim[k]) if pixdim[k] > 0 else 1.0 for k in (1, 2, 3))
    return Volume.from_flat(flat, dims, spacing)
