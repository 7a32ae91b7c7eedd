"""Minimal float64 tensor library with reverse-mode differentiation."""

from .functional import (
    BatchNormState,
    batch_norm,
    conv1d,
    conv2d,
    cross_entropy,
    global_average_pool,
    linear,
    linear_interp_matrix,
    lstm,
    same_padding,
    upsample_linear_1d,
)
from .optim import Adam, AdamState, adam_step
from .tensor import (
    AutogradError,
    Tensor,
    add,
    backward,
    concat,
    ensure_tensor,
    exp,
    grad,
    log,
    log_softmax,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    scale,
    sigmoid,
    slice_,
    softmax,
    sub,
    sum_,
    tanh,
    transpose,
)

__all__ = [
    "Adam",
    "AdamState",
    "AutogradError",
    "BatchNormState",
    "Tensor",
    "adam_step",
    "add",
    "backward",
    "batch_norm",
    "concat",
    "conv1d",
    "conv2d",
    "cross_entropy",
    "ensure_tensor",
    "exp",
    "global_average_pool",
    "grad",
    "linear",
    "linear_interp_matrix",
    "log",
    "log_softmax",
    "lstm",
    "matmul",
    "mean",
    "mul",
    "relu",
    "reshape",
    "same_padding",
    "scale",
    "sigmoid",
    "slice_",
    "softmax",
    "sub",
    "sum_",
    "tanh",
    "transpose",
    "upsample_linear_1d",
]
