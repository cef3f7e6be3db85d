"""The 3D-patch vision transformer.

Pipeline: cubic patches -> linear embedding + class token + learnable
position embeddings -> pre-norm encoder blocks (multi-head self-attention
alternating with an MLP, residual connections, final layer norm) ->
linear head on the class-token row.

Patch layout is fixed for checkpoint portability: within a patch, values
are flattened x-fastest; patches are ordered x-fastest across the grid.
"""

from __future__ import annotations

import math

import numpy as np

from .. import prng
from ..autodiff import tensor as T
from ..autodiff.tensor import Tensor
from ..errors import ConfigError, ContractError
from .config import ModelConfig

LN_EPS = 1e-5


# ---------------------------------------------------------------------------
# parameter store


class ParamStore:
    """Ordered map of canonical parameter name -> Tensor.

    Iteration order is the canonical order from :func:`param_shapes`; the
    names and shapes are a pure function of the model config.
    """

    def __init__(self, tensors: dict[str, Tensor]):
        self._tensors = dict(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __len__(self) -> int:
        return len(self._tensors)

    def __iter__(self):
        return iter(self._tensors)

    def names(self) -> list[str]:
        return list(self._tensors)

    def items(self):
        return self._tensors.items()

    def tensors(self) -> dict[str, Tensor]:
        return self._tensors

    def copy(self) -> "ParamStore":
        return ParamStore(
            {name: t.copy() for name, t in self._tensors.items()}
        )

    def total_params(self) -> int:
        return sum(t.size for t in self._tensors.values())

    def set_requires_grad(self, flag: bool) -> None:
        for t in self._tensors.values():
            t.requires_grad = flag

    def zero_grad(self) -> None:
        for t in self._tensors.values():
            t.grad = None

    def bit_equal(self, other: "ParamStore") -> bool:
        if self.names() != other.names():
            return False
        return all(
            np.array_equal(
                self[n].data.view(np.uint32), other[n].data.view(np.uint32)
            )
            for n in self.names()
        )


def param_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Canonical parameter names and shapes, in canonical order."""
    h = cfg.hidden_dim
    p3 = cfg.patch_size ** 3
    mh = cfg.mlp_hidden
    shapes: dict[str, tuple[int, ...]] = {
        "patch_embed.weight": (p3, h),
        "patch_embed.bias": (h,),
        "pos_embed": (cfg.seq_len, h),
        "cls_token": (h,),
    }
    for i in range(cfg.n_layers):
        b = f"block{i}"
        shapes[f"{b}.ln1.gain"] = (h,)
        shapes[f"{b}.ln1.bias"] = (h,)
        shapes[f"{b}.attn.qkv.weight"] = (h, 3 * h)
        shapes[f"{b}.attn.qkv.bias"] = (3 * h,)
        shapes[f"{b}.attn.out.weight"] = (h, h)
        shapes[f"{b}.attn.out.bias"] = (h,)
        shapes[f"{b}.ln2.gain"] = (h,)
        shapes[f"{b}.ln2.bias"] = (h,)
        shapes[f"{b}.mlp.fc1.weight"] = (h, mh)
        shapes[f"{b}.mlp.fc1.bias"] = (mh,)
        shapes[f"{b}.mlp.fc2.weight"] = (mh, h)
        shapes[f"{b}.mlp.fc2.bias"] = (h,)
    shapes["final_ln.gain"] = (h,)
    shapes["final_ln.bias"] = (h,)
    shapes["head.weight"] = (h, cfg.n_classes)
    shapes["head.bias"] = (cfg.n_classes,)
    return shapes


def init_params(cfg: ModelConfig, seed: int) -> ParamStore:
    """Initialize parameters.

    Projections and position embeddings draw from a truncated normal
    (std 0.02, clipped at 2 sigma); layer-norm gains start at one; the
    class token, all biases, and layer-norm biases start at zero.  Each
    parameter uses its own named substream, so initialization is
    independent of enumeration order.
    """
    store: dict[str, Tensor] = {}
    for name, shape in param_shapes(cfg).items():
        if name.endswith(".gain"):
            data = np.ones(shape, dtype=np.float32)
        elif name.endswith(".bias") or name == "cls_token":
            data = np.zeros(shape, dtype=np.float32)
        else:
            data = prng.truncated_normal(prng.stream(seed, "init", name), shape)
        store[name] = Tensor(data, requires_grad=True, name=name)
    return ParamStore(store)


def count_params(cfg: ModelConfig) -> int:
    """Closed-form learnable-parameter count.

    Computed from the architecture arithmetic, independently of
    :func:`param_shapes`; the two must agree exactly.
    """
    h = cfg.hidden_dim
    p3 = cfg.patch_size ** 3
    mh = cfg.mlp_hidden
    c = cfg.n_classes
    per_block = (
        (3 * h * h + 3 * h)      # qkv projection
        + (h * h + h)            # output projection
        + 4 * h                  # two layer norms
        + (2 * mh * h + mh + h)  # MLP
    )
    return (
        (p3 * h + h)             # patch projection
        + cfg.seq_len * h        # position embeddings
        + h                      # class token
        + cfg.n_layers * per_block
        + 2 * h                  # final layer norm
        + (h * c + c)            # head
    )


# ---------------------------------------------------------------------------
# forward passes


def extract_patches(batch: np.ndarray, patch_size: int) -> np.ndarray:
    """(B, D, D, D) volumes -> (B, N, p^3) flattened cubic patches.

    Within-patch flattening is x-fastest; patches are ordered x-fastest
    across the grid.  Runs outside the autodiff graph (inputs carry no
    gradient).
    """
    b, dx, dy, dz = batch.shape
    if not (dx == dy == dz):
        raise ContractError(f"expected cubic volumes, got {batch.shape[1:]}")
    if dx % patch_size != 0:
        raise ConfigError(f"dims {dx} not divisible by patch size {patch_size}")
    g = dx // patch_size
    p = patch_size
    # axes after reshape: (B, gx, px, gy, py, gz, pz)
    x = batch.reshape(b, g, p, g, p, g, p)
    # x-fastest flattening wants C-order axes (..., gz, gy, gx, pz, py, px)
    x = x.transpose(0, 5, 3, 1, 6, 4, 2)
    return np.ascontiguousarray(x).reshape(b, g ** 3, p ** 3)


def _volumes_to_array(volumes) -> np.ndarray:
    if isinstance(volumes, np.ndarray):
        arr = volumes
        if arr.ndim == 3:
            arr = arr[None]
    else:
        arr = np.stack([np.asarray(v.data if hasattr(v, "data") else v) for v in volumes])
    return np.ascontiguousarray(arr, dtype=np.float32)


def patch_embed(
    volumes,
    cfg: ModelConfig,
    params: ParamStore,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Embed a volume batch as a (B, N+1, hidden) token sequence."""
    batch = _volumes_to_array(volumes)
    if batch.shape[1:] != (cfg.input_dim,) * 3:
        raise ConfigError(
            f"volume dims {batch.shape[1:]} do not match config "
            f"input_dim {cfg.input_dim}"
        )
    patches = extract_patches(batch, cfg.patch_size)
    b = patches.shape[0]
    tok = T.matmul(Tensor(patches), params["patch_embed.weight"])
    tok = T.add(tok, params["patch_embed.bias"])
    cls = T.reshape(params["cls_token"], (1, 1, cfg.hidden_dim))
    cls = T.broadcast_to(cls, (b, 1, cfg.hidden_dim))
    tok = T.concat([cls, tok], axis=1)
    tok = T.add(tok, params["pos_embed"])
    tok = _maybe_dropout(tok, cfg, train, rng)
    return tok


def _maybe_dropout(t: Tensor, cfg: ModelConfig, train: bool, rng) -> Tensor:
    if not train or cfg.dropout_rate == 0.0:
        return t
    if rng is None:
        raise ContractError("train-mode dropout requires a PRNG stream")
    return T.dropout(t, cfg.dropout_rate, rng, train=True)


def _attention(
    z: Tensor, i: int, cfg: ModelConfig, params: ParamStore, train: bool, rng
) -> Tensor:
    b, t, h = z.shape
    hd = cfg.head_dim
    nh = cfg.n_heads
    qkv = T.add(
        T.matmul(z, params[f"block{i}.attn.qkv.weight"]),
        params[f"block{i}.attn.qkv.bias"],
    )
    qkv = T.reshape(qkv, (b, t, 3, nh, hd))
    qkv = T.permute(qkv, (2, 0, 3, 1, 4))  # (3, B, H, T, hd)
    q, k, v = qkv[0], qkv[1], qkv[2]
    scores = T.mul(T.matmul(q, T.transpose(k)), 1.0 / math.sqrt(hd))
    attn = T.softmax(scores)
    ctx = T.matmul(attn, v)                 # (B, H, T, hd)
    ctx = T.permute(ctx, (0, 2, 1, 3))
    ctx = T.reshape(ctx, (b, t, h))
    out = T.add(
        T.matmul(ctx, params[f"block{i}.attn.out.weight"]),
        params[f"block{i}.attn.out.bias"],
    )
    return _maybe_dropout(out, cfg, train, rng)


def _mlp(
    z: Tensor, i: int, cfg: ModelConfig, params: ParamStore, train: bool, rng
) -> Tensor:
    hid = T.add(
        T.matmul(z, params[f"block{i}.mlp.fc1.weight"]),
        params[f"block{i}.mlp.fc1.bias"],
    )
    hid = T.gelu(hid)
    out = T.add(
        T.matmul(hid, params[f"block{i}.mlp.fc2.weight"]),
        params[f"block{i}.mlp.fc2.bias"],
    )
    return _maybe_dropout(out, cfg, train, rng)


def encoder_forward(
    tokens: Tensor,
    cfg: ModelConfig,
    params: ParamStore,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Run the pre-norm encoder stack plus the final layer norm."""
    if tokens.ndim != 3 or tokens.shape[2] != cfg.hidden_dim:
        raise ContractError(
            f"token shape {tokens.shape} does not match hidden_dim "
            f"{cfg.hidden_dim}"
        )
    z = tokens
    for i in range(cfg.n_layers):
        zn = T.layer_norm(
            z, params[f"block{i}.ln1.gain"], params[f"block{i}.ln1.bias"], LN_EPS
        )
        z = T.add(z, _attention(zn, i, cfg, params, train, rng))
        zn = T.layer_norm(
            z, params[f"block{i}.ln2.gain"], params[f"block{i}.ln2.bias"], LN_EPS
        )
        z = T.add(z, _mlp(zn, i, cfg, params, train, rng))
    return T.layer_norm(z, params["final_ln.gain"], params["final_ln.bias"], LN_EPS)


def classify(
    volumes,
    cfg: ModelConfig,
    params: ParamStore,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Volume batch -> (B, n_classes) logits via the class-token readout."""
    tokens = patch_embed(volumes, cfg, params, train, rng)
    encoded = encoder_forward(tokens, cfg, params, train, rng)
    cls_row = encoded[:, 0, :]
    return T.add(T.matmul(cls_row, params["head.weight"]), params["head.bias"])


def predict_proba(volumes, cfg: ModelConfig, params: ParamStore, batch_size: int = 32) -> np.ndarray:
    """Eval-mode probability of the positive class (index 1) per volume."""
    batch = _volumes_to_array(volumes)
    probs = []
    for start in range(0, batch.shape[0], batch_size):
        logits = classify(batch[start : start + batch_size], cfg, params)
        p = T.softmax(logits).data
        probs.append(p[:, 1] if cfg.n_classes > 1 else p[:, 0])
    return np.concatenate(probs)
