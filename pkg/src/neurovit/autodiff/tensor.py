"""Reverse-mode automatic differentiation over dense float32 arrays.

Forward operations run on NumPy; while a :class:`Tape` is active, every op
that touches a gradient-requiring tensor appends a record with the exact
vector-Jacobian product of that op.  ``backward`` replays the records in
reverse execution order (which is a valid topological order by
construction), accumulating gradients into ``Tensor.grad``.

Storage is float32 throughout; reductions (sums, means, normalization
statistics, log-sum-exp) accumulate in float64 before casting back, which
keeps loss values stable enough for finite-difference checks.

Ops executed with no active tape (evaluation mode) record nothing and pay
no graph overhead.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..errors import ContractError, NumericFaultError

# GELU tanh-approximation constants (fixed, documented):
# gelu(x) = 0.5 * x * (1 + tanh(sqrt(2/pi) * (x + 0.044715 * x^3)))
GELU_C = math.sqrt(2.0 / math.pi)
GELU_A = 0.044715

_DEBUG_CHECKS = False


def set_debug_checks(enabled: bool) -> None:
    """Toggle NaN/Inf scanning of every op output (slow; debug only)."""
    global _DEBUG_CHECKS
    _DEBUG_CHECKS = bool(enabled)


class Tensor:
    """A dense float32 array, optionally tracked for gradients."""

    __slots__ = ("data", "requires_grad", "grad", "name", "_tape")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        arr = np.asarray(data, dtype=np.float32)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self.name = name
        self._tape: "Tape | None" = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False, name=self.name)

    def copy(self) -> "Tensor":
        t = Tensor(self.data.copy(), requires_grad=self.requires_grad, name=self.name)
        return t

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{tag})"

    # Operator sugar; constants are wrapped as non-grad tensors.
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __getitem__(self, key):
        return narrow(self, key)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


class Tape:
    """Ordered record of executed ops, replayed backward exactly once."""

    def __init__(self):
        self._records: list[tuple[Tensor, Callable[[np.ndarray], None]]] = []
        self._consumed = False

    def __enter__(self) -> "Tape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, *exc) -> None:
        popped = _TAPE_STACK.pop()
        assert popped is self

    def __len__(self) -> int:
        return len(self._records)

    def record(self, output: Tensor, vjp: Callable[[np.ndarray], None]) -> None:
        self._records.append((output, vjp))

    def backward(self, loss: Tensor) -> None:
        """Propagate d(loss)/d(tensor) into ``grad`` of all tracked tensors."""
        if loss.data.size != 1:
            raise ContractError(f"loss must be scalar, got shape {loss.shape}")
        if not loss.requires_grad:
            raise ContractError("loss is not connected to any tracked parameter")
        if self._consumed:
            raise ContractError("tape already replayed; build a fresh graph")
        self._consumed = True
        loss.grad = np.ones_like(loss.data)
        for output, vjp in reversed(self._records):
            if output.grad is None:
                continue  # branch not connected to the loss
            vjp(output.grad)


_TAPE_STACK: list[Tape] = []


def active_tape() -> Tape | None:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def backward(loss: Tensor, params: dict[str, Tensor] | None = None):
    """Run reverse-mode accumulation from a scalar loss.

    With ``params`` given, returns a gradient map name -> Tensor with zero
    tensors for parameters the loss never touched.
    """
    tape = loss._tape
    if tape is None:
        raise ContractError("loss was not computed under a Tape")
    tape.backward(loss)
    if params is None:
        return None
    out = {}
    for name, p in params.items():
        g = p.grad if p.grad is not None else np.zeros_like(p.data)
        out[name] = Tensor(g, name=name)
    return out


def _finish(out_data: np.ndarray, inputs: Sequence[Tensor], vjp_builder) -> Tensor:
    """Wrap an op result; record its VJP if a tape is active and needed."""
    if _DEBUG_CHECKS and not np.all(np.isfinite(out_data)):
        raise NumericFaultError("non-finite values in op output")
    tape = active_tape()
    track = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=track)
    if track:
        out._tape = tape
        tape.record(out, vjp_builder(out))
    return out


def _accum(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    g = np.asarray(g, dtype=np.float32)
    if t.grad is None:
        t.grad = g.copy()  # own the buffer; += must never alias another grad
    else:
        t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a gradient back to the shape of a broadcast operand."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# elementwise and structural ops


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data + b.data

    def vjp_builder(out):
        def vjp(g):
            _accum(a, _unbroadcast(g, a.data.shape))
            _accum(b, _unbroadcast(g, b.data.shape))

        return vjp

    return _finish(out_data, (a, b), vjp_builder)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data - b.data

    def vjp_builder(out):
        def vjp(g):
            _accum(a, _unbroadcast(g, a.data.shape))
            _accum(b, -_unbroadcast(g, b.data.shape))

        return vjp

    return _finish(out_data, (a, b), vjp_builder)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data * b.data

    def vjp_builder(out):
        def vjp(g):
            if a.requires_grad:
                _accum(a, _unbroadcast(g * b.data, a.data.shape))
            if b.requires_grad:
                _accum(b, _unbroadcast(g * a.data, b.data.shape))

        return vjp

    return _finish(out_data, (a, b), vjp_builder)


def matmul(a, b) -> Tensor:
    """Batched matrix product with NumPy broadcasting over batch axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ContractError(
            f"matmul operands must have rank >= 2, got {a.shape} @ {b.shape}"
        )
    out_data = a.data @ b.data

    def vjp_builder(out):
        def vjp(g):
            if a.requires_grad:
                da = g @ b.data.swapaxes(-1, -2)
                _accum(a, _unbroadcast(da, a.data.shape))
            if b.requires_grad:
                db = a.data.swapaxes(-1, -2) @ g
                _accum(b, _unbroadcast(db, b.data.shape))

        return vjp

    return _finish(out_data, (a, b), vjp_builder)


def reshape(t, shape) -> Tensor:
    t = as_tensor(t)
    shape = tuple(shape)
    out_data = t.data.reshape(shape)

    def vjp_builder(out):
        def vjp(g):
            _accum(t, g.reshape(t.data.shape))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def permute(t, axes) -> Tensor:
    t = as_tensor(t)
    axes = tuple(axes)
    out_data = np.transpose(t.data, axes)
    inverse = tuple(np.argsort(axes))

    def vjp_builder(out):
        def vjp(g):
            _accum(t, np.transpose(g, inverse))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def transpose(t) -> Tensor:
    """Swap the last two axes."""
    t = as_tensor(t)
    axes = list(range(t.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return permute(t, axes)


def broadcast_to(t, shape) -> Tensor:
    t = as_tensor(t)
    shape = tuple(shape)
    out_data = np.broadcast_to(t.data, shape).copy()

    def vjp_builder(out):
        def vjp(g):
            _accum(t, _unbroadcast(g, t.data.shape))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]

    def vjp_builder(out):
        def vjp(g):
            start = 0
            for t, size in zip(tensors, sizes):
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(start, start + size)
                _accum(t, g[tuple(idx)])
                start += size

        return vjp

    return _finish(out_data, tuple(tensors), vjp_builder)


def narrow(t, key) -> Tensor:
    """Basic slicing/indexing (ints and slices only; no overlap in VJP)."""
    t = as_tensor(t)
    out_data = t.data[key]
    if isinstance(out_data, np.ndarray):
        out_data = out_data.copy()

    def vjp_builder(out):
        def vjp(g):
            full = np.zeros_like(t.data)
            full[key] = g
            _accum(t, full)

        return vjp

    return _finish(out_data, (t,), vjp_builder)


# ---------------------------------------------------------------------------
# reductions


def tsum(t, axis=None, keepdims: bool = False) -> Tensor:
    t = as_tensor(t)
    out_data = t.data.sum(axis=axis, keepdims=keepdims, dtype=np.float64)
    out_data = out_data.astype(np.float32)

    def vjp_builder(out):
        def vjp(g):
            if axis is None:
                _accum(t, np.broadcast_to(g, t.data.shape))
            else:
                gk = g if keepdims else np.expand_dims(g, axis)
                _accum(t, np.broadcast_to(gk, t.data.shape))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def mean(t, axis=None, keepdims: bool = False) -> Tensor:
    t = as_tensor(t)
    out_data = t.data.mean(axis=axis, keepdims=keepdims, dtype=np.float64)
    out_data = out_data.astype(np.float32)
    if axis is None:
        count = t.data.size
    else:
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        count = int(np.prod([t.data.shape[a] for a in axes]))

    def vjp_builder(out):
        def vjp(g):
            if axis is None:
                _accum(t, np.broadcast_to(g / count, t.data.shape))
            else:
                gk = g if keepdims else np.expand_dims(g, axis)
                _accum(t, np.broadcast_to(gk / count, t.data.shape))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


# ---------------------------------------------------------------------------
# neural-network ops


def softmax(t) -> Tensor:
    """Softmax along the last axis, max-subtracted for stability."""
    t = as_tensor(t)
    shifted = t.data - t.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted, dtype=np.float64)
    y = (e / e.sum(axis=-1, keepdims=True)).astype(np.float32)

    def vjp_builder(out):
        def vjp(g):
            dot = (g * y).sum(axis=-1, keepdims=True, dtype=np.float64)
            _accum(t, y * (g - dot.astype(np.float32)))

        return vjp

    return _finish(y, (t,), vjp_builder)


def layer_norm(t, gain, bias, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then scale+shift."""
    t, gain, bias = as_tensor(t), as_tensor(gain), as_tensor(bias)
    x = t.data.astype(np.float64)
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = ((x - mu) * inv).astype(np.float32)
    out_data = xhat * gain.data + bias.data
    inv32 = inv.astype(np.float32)

    def vjp_builder(out):
        def vjp(g):
            if bias.requires_grad:
                _accum(bias, _unbroadcast(g, bias.data.shape))
            if gain.requires_grad:
                _accum(gain, _unbroadcast(g * xhat, gain.data.shape))
            if t.requires_grad:
                dxhat = (g * gain.data).astype(np.float64)
                m1 = dxhat.mean(axis=-1, keepdims=True)
                m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
                dx = inv * (dxhat - m1 - xhat * m2)
                _accum(t, dx.astype(np.float32))

        return vjp

    return _finish(out_data, (t, gain, bias), vjp_builder)


def gelu(t) -> Tensor:
    """GELU, tanh approximation (constants GELU_C, GELU_A)."""
    t = as_tensor(t)
    x = t.data
    u = GELU_C * (x + GELU_A * x * x * x)
    th = np.tanh(u)
    out_data = (0.5 * x * (1.0 + th)).astype(np.float32)

    def vjp_builder(out):
        def vjp(g):
            du = GELU_C * (1.0 + 3.0 * GELU_A * x * x)
            local = 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du
            _accum(t, g * local.astype(np.float32))

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def dropout(t, rate: float, rng: np.random.Generator, train: bool) -> Tensor:
    """Inverted dropout: Bernoulli mask scaled by 1/(1-rate) in train mode.

    Identity in eval mode.  The mask consumes the supplied generator, so a
    fixed per-step stream makes training reproducible.
    """
    t = as_tensor(t)
    if not train or rate == 0.0:
        return t
    if not 0.0 <= rate < 1.0:
        raise ContractError(f"dropout rate must be in [0, 1), got {rate}")
    keep = (rng.random(t.data.shape) >= rate).astype(np.float32)
    mask = keep / np.float32(1.0 - rate)
    out_data = t.data * mask

    def vjp_builder(out):
        def vjp(g):
            _accum(t, g * mask)

        return vjp

    return _finish(out_data, (t,), vjp_builder)


def cross_entropy_from_logits(logits, labels) -> Tensor:
    """Mean cross-entropy of integer labels against raw logits.

    Stabilized via log-sum-exp; equals ``-log softmax(logits)[label]``
    averaged over the batch.
    """
    logits = as_tensor(logits)
    labels = np.asarray(labels)
    if logits.ndim != 2:
        raise ContractError(f"logits must be (batch, classes), got {logits.shape}")
    n, c = logits.shape
    if labels.shape != (n,):
        raise ContractError(f"labels shape {labels.shape} != ({n},)")
    if labels.min() < 0 or labels.max() >= c:
        raise ContractError("labels out of range")
    x = logits.data.astype(np.float64)
    m = x.max(axis=-1, keepdims=True)
    lse = m + np.log(np.exp(x - m).sum(axis=-1, keepdims=True))
    per_sample = lse[:, 0] - x[np.arange(n), labels]
    out_data = np.float32(per_sample.mean())

    def vjp_builder(out):
        def vjp(g):
            p = np.exp(x - lse)
            p[np.arange(n), labels] -= 1.0
            _accum(logits, (float(g) / n) * p.astype(np.float32))

        return vjp

    return _finish(out_data, (logits,), vjp_builder)
