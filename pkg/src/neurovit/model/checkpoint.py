"""Checkpoint serialization for model parameters.

Layout (little-endian):

=========  =====================================================
bytes      field
=========  =====================================================
4          magic ``VTCK``
4          u32 version (currently 1)
8          u64 metadata length M
M          UTF-8 JSON: {"config": {...}, "meta": {...}}
per tensor u16 name length, name bytes, u8 rank, u32 dims..., f32 payload
=========  =====================================================

Tensors appear in canonical parameter order.  Loading restores exact bit
patterns and validates names and shapes against the stored config.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..autodiff.tensor import Tensor
from ..errors import CorruptCheckpointError, HeadMismatchError
from .config import ModelConfig
from .vit import ParamStore, param_shapes

MAGIC = b"VTCK"
VERSION = 1


def save_checkpoint(path, cfg: ModelConfig, params: ParamStore, metadata: dict | None = None) -> None:
    """Write config, metadata, and parameters; canonical tensor order."""
    shapes = param_shapes(cfg)
    if params.names() != list(shapes):
        raise CorruptCheckpointError(
            "parameter names do not match the canonical set for this config"
        )
    header = json.dumps(
        {"config": cfg.to_dict(), "meta": metadata or {}}, sort_keys=True
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for name, t in params.items():
            nb = name.encode("utf-8")
            fh.write(struct.pack("<H", len(nb)))
            fh.write(nb)
            fh.write(struct.pack("<B", t.data.ndim))
            fh.write(struct.pack(f"<{t.data.ndim}I", *t.data.shape))
            fh.write(t.data.astype("<f4", copy=False).tobytes())


def load_checkpoint(path, expect_cfg: ModelConfig | None = None):
    """Read a checkpoint; returns ``(cfg, params, metadata)``.

    With ``expect_cfg`` given, the stored config must match it; a mismatch
    in ``n_classes`` alone raises :class:`HeadMismatchError` (the hook for
    fine-tuning head reinitialization), any other difference raises
    :class:`CorruptCheckpointError`.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    view = memoryview(blob)
    off = 0

    def need(n: int, what: str):
        nonlocal off
        if off + n > len(blob):
            raise CorruptCheckpointError(f"{path}: truncated {what}")
        chunk = view[off : off + n]
        off += n
        return chunk

    if bytes(need(4, "magic")) != MAGIC:
        raise CorruptCheckpointError(f"{path}: bad checkpoint magic")
    (version,) = struct.unpack("<I", need(4, "version"))
    if version != VERSION:
        raise CorruptCheckpointError(f"{path}: unsupported version {version}")
    (meta_len,) = struct.unpack("<Q", need(8, "metadata length"))
    try:
        header = json.loads(bytes(need(meta_len, "metadata")).decode("utf-8"))
        cfg = ModelConfig.from_dict(header["config"])
        metadata = header.get("meta", {})
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptCheckpointError(f"{path}: bad metadata block: {exc}") from exc

    if expect_cfg is not None and expect_cfg != cfg:
        only_head = cfg.to_dict() | {"n_classes": expect_cfg.n_classes}
        if only_head == expect_cfg.to_dict():
            raise HeadMismatchError(
                f"{path}: checkpoint has n_classes={cfg.n_classes}, "
                f"expected {expect_cfg.n_classes}; backbone is compatible"
            )
        raise CorruptCheckpointError(
            f"{path}: checkpoint config {cfg} incompatible with expected "
            f"{expect_cfg}"
        )

    shapes = param_shapes(cfg)
    tensors: dict[str, Tensor] = {}
    for name, shape in shapes.items():
        (name_len,) = struct.unpack("<H", need(2, "tensor name length"))
        stored = bytes(need(name_len, "tensor name")).decode("utf-8")
        if stored != name:
            raise CorruptCheckpointError(
                f"{path}: tensor {stored!r} out of canonical order "
                f"(expected {name!r})"
            )
        (rank,) = struct.unpack("<B", need(1, "tensor rank"))
        dims = struct.unpack(f"<{rank}I", need(4 * rank, "tensor dims"))
        if dims != shape:
            raise CorruptCheckpointError(
                f"{path}: tensor {name!r} has shape {dims}, expected {shape}"
            )
        count = int(np.prod(dims, dtype=np.int64))
        payload = need(4 * count, f"tensor {name!r} payload")
        data = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
        tensors[name] = Tensor(data, requires_grad=True, name=name)
    if off != len(blob):
        raise CorruptCheckpointError(f"{path}: {len(blob) - off} trailing bytes")
    return cfg, ParamStore(tensors), metadata
