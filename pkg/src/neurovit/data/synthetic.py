"""Synthetic volume generator: the desk-scale stand-in for clinical data.

Class 0 volumes are pure Gaussian noise.  Class 1 volumes carry the same
noise but are darkened by ``effect_size * noise_sigma`` inside a centred
ellipsoid with semi-axes ``dims / 4`` — a localized signal that a
patch-based classifier has to integrate spatially, loosely mimicking
disease-related atrophy.

Each volume gets its own Philox substream keyed by (seed, class, index),
so generation is bit-reproducible and order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import prng
from ..errors import ContractError
from .manifest import DatasetManifest, ManifestEntry
from .volume import Volume


@dataclass(frozen=True)
class SynthSpec:
    n_per_class: int
    dims: tuple[int, int, int] = (32, 32, 32)
    effect_size: float = 2.0
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_per_class < 1:
            raise ContractError(f"n_per_class must be >= 1, got {self.n_per_class}")
        if len(self.dims) != 3 or any(d < 1 for d in self.dims):
            raise ContractError(f"dims must be 3 positive integers, got {self.dims}")
        if self.effect_size < 0:
            raise ContractError(f"effect_size must be >= 0, got {self.effect_size}")
        if self.noise_sigma <= 0:
            raise ContractError(f"noise_sigma must be > 0, got {self.noise_sigma}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))


def ellipsoid_mask(dims: tuple[int, int, int]) -> np.ndarray:
    """Boolean mask of the centred ellipsoid with semi-axes dims/4."""
    centre = [(d - 1) / 2.0 for d in dims]
    semi = [d / 4.0 for d in dims]
    x, y, z = np.ogrid[: dims[0], : dims[1], : dims[2]]
    r2 = (
        ((x - centre[0]) / semi[0]) ** 2
        + ((y - centre[1]) / semi[1]) ** 2
        + ((z - centre[2]) / semi[2]) ** 2
    )
    return r2 <= 1.0


def generate_synthetic(
    spec: SynthSpec,
) -> tuple[list[Volume], DatasetManifest]:
    """Generate ``2 * n_per_class`` labelled volumes plus a manifest.

    Volumes are ordered class 0 first, then class 1; manifest entries are
    aligned with the returned list, one synthetic subject per volume, all
    marked ``train`` (re-split downstream as needed).  Paths are the
    canonical relative file names the ``synth`` CLI command writes.
    """
    mask = ellipsoid_mask(spec.dims)
    volumes: list[Volume] = []
    entries: list[ManifestEntry] = []
    for label in (0, 1):
        for idx in range(spec.n_per_class):
            rng = prng.stream(spec.seed, "synth", label, idx)
            data = rng.normal(0.0, spec.noise_sigma, size=spec.dims)
            if label == 1 and spec.effect_size > 0:
                data = data - mask * (spec.effect_size * spec.noise_sigma)
            volumes.append(Volume(data.astype(np.float32)))
            sid = f"synth-c{label}-{idx:05d}"
            entries.append(ManifestEntry(sid, f"{sid}.vol", label, "train"))
    return volumes, DatasetManifest(tuple(entries))
