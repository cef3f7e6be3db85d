"""Dense 3D scalar volumes: the unit of model input.

A :class:`Volume` stores one scan as a float32 grid indexed ``[x, y, z]``
plus per-axis voxel spacing in millimetres.  On disk (raw format, NIfTI
payloads) the same data is laid out x-fastest, which corresponds to
Fortran ravel order of the ``[x, y, z]`` array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ContractError, DegenerateInputError


@dataclass(frozen=True)
class Volume:
    """A 3D scalar grid with voxel spacing metadata.

    ``data`` has shape ``dims`` and dtype float32; values must be finite.
    Instances are immutable: construction takes ownership of the array and
    flags it read-only.
    """

    data: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ContractError(f"volume data must be 3-D, got shape {arr.shape}")
        if any(d < 1 for d in arr.shape):
            raise ContractError(f"volume dims must be positive, got {arr.shape}")
        if len(self.spacing) != 3 or any(s <= 0 for s in self.spacing):
            raise ContractError(f"spacing components must be > 0, got {self.spacing}")
        if not np.all(np.isfinite(arr)):
            raise ContractError("volume contains non-finite values")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        # Spacing is stored at float32 precision, matching the file formats,
        # so save -> load round-trips are exact.
        object.__setattr__(
            self, "spacing", tuple(float(np.float32(s)) for s in self.spacing)
        )

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    def flat_x_fastest(self) -> np.ndarray:
        """The on-disk layout: 1-D float32, x varying fastest."""
        return self.data.ravel(order="F")

    @staticmethod
    def from_flat(flat: np.ndarray, dims, spacing=(1.0, 1.0, 1.0)) -> "Volume":
        """Build a volume from x-fastest flat data."""
        dims = tuple(int(d) for d in dims)
        flat = np.asarray(flat, dtype=np.float32)
        if flat.size != int(np.prod(dims)):
            raise ContractError(
                f"flat data length {flat.size} != product of dims {dims}"
            )
        return Volume(flat.reshape(dims, order="F"), spacing)


def resize_trilinear(v: Volume, target_dims) -> Volume:
    """Resample a volume to ``target_dims`` with trilinear interpolation.

    Coordinate mapping is corner-aligned: target index ``i`` along an axis
    of source size ``S`` and target size ``T`` samples source coordinate
    ``i * (S - 1) / (T - 1)``; a size-1 target axis samples the source
    centre.  This makes ``target_dims == v.dims`` an exact identity.
    Spacing is rescaled by the dims ratio ``S / T`` per axis.
    """
    target_dims = tuple(int(d) for d in target_dims)
    if len(target_dims) != 3 or any(d < 1 for d in target_dims):
        raise ConfigError(f"target dims must be 3 positive integers, got {target_dims}")

    out = v.data.astype(np.float32)
    # Trilinear interpolation is separable: interpolate one axis at a time.
    for axis in range(3):
        src = out.shape[axis]
        tgt = target_dims[axis]
        if tgt == src:
            continue
        if tgt == 1:
            coords = np.array([(src - 1) / 2.0])
        elif src == 1:
            coords = np.zeros(tgt)
        else:
            coords = np.arange(tgt) * ((src - 1) / (tgt - 1))
        lo = np.clip(np.floor(coords).astype(np.int64), 0, src - 1)
        hi = np.minimum(lo + 1, src - 1)
        w = (coords - lo).astype(np.float32)
        shape = [1, 1, 1]
        shape[axis] = tgt
        w = w.reshape(shape)
        out = (1.0 - w) * np.take(out, lo, axis=axis) + w * np.take(out, hi, axis=axis)
    spacing = tuple(
        v.spacing[a] * (v.dims[a] / target_dims[a]) for a in range(3)
    )
    return Volume(out.astype(np.float32), spacing)


def normalize(v: Volume, mode: str = "zscore") -> Volume:
    """Normalize intensities per volume.

    ``zscore`` maps to mean 0 / std 1; ``minmax`` maps the value range to
    [0, 1].  A constant volume has no scale to normalize by and raises
    :class:`DegenerateInputError`.
    """
    data = v.data.astype(np.float64)
    if mode == "zscore":
        std = data.std()
        if std == 0.0:
            raise DegenerateInputError("constant volume: z-score undefined")
        out = (data - data.mean()) / std
    elif mode == "minmax":
        lo, hi = data.min(), data.max()
        if hi == lo:
            raise DegenerateInputError("constant volume: min-max undefined")
        out = (data - lo) / (hi - lo)
    else:
        raise ConfigError(f"unknown normalization mode {mode!r}")
    return Volume(out.astype(np.float32), v.spacing)
