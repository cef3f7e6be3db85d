"""Project-wide pseudo-random number generation.

All randomness in the toolkit flows through a single counter-based
generator: Philox 4x64 (10 rounds) as shipped by NumPy.  Philox is keyed,
not sequentially seeded, so independent streams can be derived for any
labelled purpose (one synthetic volume, one epoch shuffle, one tree of a
forest, ...) without coordination.  The stream for a given ``(seed,
labels...)`` pair is identical across runs, platforms, and thread counts,
which is what makes bit-reproducible datasets, splits, and training runs
possible.

Keys are derived by hashing the seed together with the stream labels
(BLAKE2b, 128-bit digest), so streams are order-independent: requesting
``stream(seed, "volume", 17)`` always yields the same generator no matter
what was drawn before.
"""

from __future__ import annotations

import hashlib

import numpy as np

#: Name of the fixed project generator (see module docstring).
GENERATOR_NAME = "philox4x64-10"


def _derive_key(seed: int, labels: tuple) -> int:
    parts = [f"seed:{int(seed)}"]
    for label in labels:
        if not isinstance(label, (str, int)):
            raise TypeError(f"stream labels must be str or int, got {type(label)!r}")
        parts.append(f"{type(label).__name__}:{label}")
    digest = hashlib.blake2b("|".join(parts).encode(), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, *labels: str | int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *labels)``.

    The same arguments always produce a generator positioned at the start
    of the same stream.
    """
    return np.random.Generator(np.random.Philox(key=_derive_key(seed, labels)))


def truncated_normal(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    std: float = 0.02,
    bound: float = 2.0,
) -> np.ndarray:
    """Sample a normal truncated to ``[-bound, bound]`` sigmas, scaled by ``std``.

    Uses the inverse-CDF transform of uniforms so the draw count per call
    is fixed (keeps streams aligned regardless of how often the tails
    would have been rejected).
    """
    from scipy.special import ndtr, ndtri

    lo, hi = float(ndtr(-bound)), float(ndtr(bound))
    u = rng.uniform(lo, hi, size=shape)
    return (ndtri(u) * std).astype(np.float32)
