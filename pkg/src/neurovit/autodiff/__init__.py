"""Dense float32 tensors with reverse-mode autodiff."""

from .gradcheck import GradCheckReport, grad_check
from .tensor import (
    GELU_A,
    GELU_C,
    Tape,
    Tensor,
    add,
    as_tensor,
    backward,
    broadcast_to,
    concat,
    cross_entropy_from_logits,
    dropout,
    gelu,
    layer_norm,
    matmul,
    mean,
    mul,
    narrow,
    permute,
    reshape,
    set_debug_checks,
    softmax,
    sub,
    transpose,
    tsum,
)

__all__ = [
    "GELU_A",
    "GELU_C",
    "GradCheckReport",
    "Tape",
    "Tensor",
    "add",
    "as_tensor",
    "backward",
    "broadcast_to",
    "concat",
    "cross_entropy_from_logits",
    "dropout",
    "gelu",
    "grad_check",
    "layer_norm",
    "matmul",
    "mean",
    "mul",
    "narrow",
    "permute",
    "reshape",
    "set_debug_checks",
    "softmax",
    "sub",
    "transpose",
    "tsum",
]
