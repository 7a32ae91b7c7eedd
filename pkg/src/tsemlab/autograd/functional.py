"""Differentiable layers built on :mod:`tsemlab.autograd.tensor`.

Convolutions are direct (sliding windows contracted with the kernel); the
LSTM is a fused op with hand-written backpropagation through time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, NumericError
from .tensor import Tensor, ensure_tensor, log_softmax, matmul, slice_


def _pair(value, name: str) -> tuple[int, int]:
    if isinstance(value, (int, np.integer)):
        return int(value), int(value)
    lo, hi = value
    return int(lo), int(hi)


def _pad_spec(padding, ndim: int) -> list[tuple[int, int]]:
    """Normalize padding to ``ndim`` (before, after) pairs."""
    if isinstance(padding, (int, np.integer)):
        return [(int(padding), int(padding))] * ndim
    padding = list(padding)
    if len(padding) != ndim:
        raise DimensionError(f"expected padding for {ndim} axes, got {padding!r}")
    return [_pair(p, "padding") for p in padding]


def same_padding(kernel: int, stride: int = 1, length: int | None = None) -> tuple[int, int]:
    """(before, after) padding that gives ``ceil(length / stride)`` outputs.

    With ``stride == 1`` the length is preserved for odd and even kernels alike;
    the extra element for an even kernel goes after.
    """
    if stride == 1 or length is None:
        total = kernel - 1
    else:
        out = -(-length // stride)
        total = max((out - 1) * stride + kernel - length, 0)
    return total // 2, total - total // 2


def conv2d(x, kernels, bias=None, padding=0, stride=1) -> Tensor:
    """2-D cross-correlation.

    ``x`` is ``(C_in, H, W)`` or batched ``(B, C_in, H, W)``; ``kernels`` is
    ``(C_out, C_in, kH, kW)``. ``padding`` is an int, a per-axis int pair, or a
    pair of ``(before, after)`` tuples.
    """
    x, kernels = ensure_tensor(x), ensure_tensor(kernels)
    unbatched = x.ndim == 3
    if unbatched:
        x = x.reshape((1,) + x.shape)
    if x.ndim != 4 or kernels.ndim != 4:
        raise DimensionError(f"conv2d expects 4-D input and kernels, got {x.shape} and {kernels.shape}")
    n, c_in, h, w = x.shape
    c_out, k_in, kh, kw = kernels.shape
    if k_in != c_in:
        raise DimensionError(f"conv2d channel axis mismatch: input has {c_in}, kernels expect {k_in}")
    (ph0, ph1), (pw0, pw1) = _pad_spec(padding, 2)
    sh, sw = _pair(stride, "stride")
    if sh < 1 or sw < 1:
        raise DimensionError(f"stride must be >= 1, got {(sh, sw)}")
    hp, wp = h + ph0 + ph1, w + pw0 + pw1
    bad = [name for name, k, e in (("height", kh, hp), ("width", kw, wp)) if k > e]
    if bad:
        raise DimensionError(f"kernel larger than padded input on axes {bad}: kernel {(kh, kw)}, input {(hp, wp)}")
    ho, wo = (hp - kh) // sh + 1, (wp - kw) // sw + 1

    xp = np.pad(x.data, ((0, 0), (0, 0), (ph0, ph1), (pw0, pw1)))
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::sh, ::sw]
    out = np.tensordot(windows, kernels.data, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    parents = [x, kernels]
    if bias is not None:
        bias = ensure_tensor(bias)
        out = out + bias.data[None, :, None, None]
        parents.append(bias)
    out = np.ascontiguousarray(out)

    def bw(g):
        gx = None
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    contrib = np.tensordot(g, kernels.data[:, :, i, j], axes=([1], [0])).transpose(0, 3, 1, 2)
                    gxp[:, :, i : i + sh * (ho - 1) + 1 : sh, j : j + sw * (wo - 1) + 1 : sw] += contrib
            gx = gxp[:, :, ph0 : ph0 + h, pw0 : pw0 + w]
        gk = np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3])) if kernels.requires_grad else None
        grads = [gx, gk]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return grads

    result = Tensor._from_op(out, "conv2d", parents, bw)
    return result.reshape(result.shape[1:]) if unbatched else result


def conv1d(x, kernels, bias=None, padding=0, stride=1) -> Tensor:
    """1-D cross-correlation over the last axis; ``x`` is ``(C_in, T)`` or ``(B, C_in, T)``."""
    x, kernels = ensure_tensor(x), ensure_tensor(kernels)
    if kernels.ndim != 3:
        raise DimensionError(f"conv1d kernels must be (C_out, C_in, k), got {kernels.shape}")
    unbatched = x.ndim == 2
    if unbatched:
        x = x.reshape((1,) + x.shape)
    if x.ndim != 3:
        raise DimensionError(f"conv1d expects (C_in, T) or (B, C_in, T), got {x.shape}")
    pad = _pad_spec([padding], 1)[0]
    out = conv2d(
        x.reshape((x.shape[0], x.shape[1], 1, x.shape[2])),
        kernels.reshape((kernels.shape[0], kernels.shape[1], 1, kernels.shape[2])),
        bias,
        padding=((0, 0), pad),
        stride=(1, int(stride)),
    )
    out = out.reshape((out.shape[0], out.shape[1], out.shape[3]))
    return out.reshape(out.shape[1:]) if unbatched else out


def lstm(x, w_ih, w_hh, bias) -> tuple[Tensor, Tensor]:
    """Single-layer LSTM over ``x`` of shape ``(T, F)`` or ``(B, T, F)``.

    Gate blocks in ``w_ih`` (4H, F), ``w_hh`` (4H, H) and ``bias`` (4H) are
    ordered input, forget, candidate, output. Returns the hidden sequence
    ``(B, T, H)`` and the final hidden state ``(B, H)`` (batch axis dropped for
    unbatched input).
    """
    x, w_ih, w_hh, bias = (ensure_tensor(t) for t in (x, w_ih, w_hh, bias))
    unbatched = x.ndim == 2
    xd = x.data[None] if unbatched else x.data
    if xd.ndim != 3:
        raise DimensionError(f"lstm expects (T, F) or (B, T, F) input, got {x.shape}")
    n, steps, feats = xd.shape
    four_h = w_ih.shape[0]
    hidden = four_h // 4
    if four_h % 4 or w_ih.shape != (four_h, feats) or w_hh.shape != (four_h, hidden) or bias.shape != (four_h,):
        raise DimensionError(
            f"lstm weight shapes inconsistent with F={feats}: w_ih {w_ih.shape}, w_hh {w_hh.shape}, bias {bias.shape}"
        )

    hs = np.zeros((n, steps + 1, hidden))
    cs = np.zeros((n, steps + 1, hidden))
    gates = np.zeros((n, steps, four_h))
    tanh_c = np.zeros((n, steps, hidden))
    x_proj = xd @ w_ih.data.T + bias.data
    for t in range(steps):
        z = x_proj[:, t] + hs[:, t] @ w_hh.data.T
        ifo = np.concatenate([z[:, : 2 * hidden], z[:, 3 * hidden :]], axis=1)
        sig = 1.0 / (1.0 + np.exp(-ifo))
        i, f, o = sig[:, :hidden], sig[:, hidden : 2 * hidden], sig[:, 2 * hidden :]
        g = np.tanh(z[:, 2 * hidden : 3 * hidden])
        c = f * cs[:, t] + i * g
        tc = np.tanh(c)
        h = o * tc
        if not (np.isfinite(c).all() and np.isfinite(h).all()):
            raise NumericError(f"lstm recurrence produced non-finite values at time step {t}")
        gates[:, t] = np.concatenate([i, f, g, o], axis=1)
        cs[:, t + 1] = c
        tanh_c[:, t] = tc
        hs[:, t + 1] = h

    def bw(dh_seq):
        d_wih = np.zeros_like(w_ih.data)
        d_whh = np.zeros_like(w_hh.data)
        d_b = np.zeros_like(bias.data)
        dx = np.zeros_like(xd)
        dh_next = np.zeros((n, hidden))
        dc_next = np.zeros((n, hidden))
        for t in reversed(range(steps)):
            i = gates[:, t, :hidden]
            f = gates[:, t, hidden : 2 * hidden]
            g = gates[:, t, 2 * hidden : 3 * hidden]
            o = gates[:, t, 3 * hidden :]
            tc = tanh_c[:, t]
            dh = dh_seq[:, t] + dh_next
            dc = dh * o * (1.0 - tc * tc) + dc_next
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * cs[:, t] * f * (1.0 - f),
                    dc * i * (1.0 - g * g),
                    dh * tc * o * (1.0 - o),
                ],
                axis=1,
            )
            dc_next = dc * f
            d_wih += dz.T @ xd[:, t]
            d_whh += dz.T @ hs[:, t]
            d_b += dz.sum(axis=0)
            dx[:, t] = dz @ w_ih.data
            dh_next = dz @ w_hh.data
        return (dx[0] if unbatched else dx), d_wih, d_whh, d_b

    def bw_entry(g):
        return bw(g[None] if unbatched else g)

    seq = hs[:, 1:]
    seq_t = Tensor._from_op(seq[0] if unbatched else seq, "lstm", (x, w_ih, w_hh, bias), bw_entry)
    final = slice_(seq_t, (-1,) if unbatched else (slice(None), -1))
    return seq_t, final


@dataclass
class BatchNormState:
    """Running statistics for one batch-normalization layer."""

    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1

    @classmethod
    def fresh(cls, channels: int, momentum: float = 0.1) -> "BatchNormState":
        return cls(np.zeros(channels), np.ones(channels), momentum)


def batch_norm(
    x,
    gamma,
    beta,
    state: BatchNormState,
    training: bool,
    eps: float = 1e-5,
    axis: int = 1,
    update_state: bool = True,
) -> Tensor:
    """Normalize each channel along ``axis``.

    In training mode the batch statistics (biased variance) are used and, when
    ``update_state`` is set, folded into ``state`` with its momentum (running
    variance uses the unbiased estimate). Inference uses the running state.
    """
    if eps <= 0:
        raise ValueError("batch_norm eps must be positive")
    x, gamma, beta = ensure_tensor(x), ensure_tensor(gamma), ensure_tensor(beta)
    axis = axis % x.ndim
    channels = x.shape[axis]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise DimensionError(f"batch_norm affine params must have shape ({channels},)")
    reduce_axes = tuple(a for a in range(x.ndim) if a != axis)
    bshape = [1] * x.ndim
    bshape[axis] = channels
    count = x.size // channels

    if training:
        mu = x.data.mean(axis=reduce_axes)
        var = x.data.var(axis=reduce_axes)
        if update_state:
            m = state.momentum
            unbiased = var * count / max(count - 1, 1)
            state.running_mean = (1 - m) * state.running_mean + m * mu
            state.running_var = (1 - m) * state.running_var + m * unbiased
    else:
        mu, var = state.running_mean, state.running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu.reshape(bshape)) * inv_std.reshape(bshape)
    out = xhat * gamma.data.reshape(bshape) + beta.data.reshape(bshape)

    def bw(g):
        dgamma = (g * xhat).sum(axis=reduce_axes)
        dbeta = g.sum(axis=reduce_axes)
        dxhat = g * gamma.data.reshape(bshape)
        if training:
            s1 = dxhat.sum(axis=reduce_axes, keepdims=True)
            s2 = (dxhat * xhat).sum(axis=reduce_axes, keepdims=True)
            dx = inv_std.reshape(bshape) / count * (count * dxhat - s1 - xhat * s2)
        else:
            dx = dxhat * inv_std.reshape(bshape)
        return dx, dgamma, dbeta

    return Tensor._from_op(out, "batch_norm", (x, gamma, beta), bw)


def global_average_pool(x, channel_axis: int = 0) -> Tensor:
    """Mean over every axis after ``channel_axis``."""
    x = ensure_tensor(x)
    axes = tuple(range(channel_axis + 1, x.ndim))
    if not axes:
        raise DimensionError(f"nothing to pool: input shape {x.shape}, channel axis {channel_axis}")
    return x.mean(axis=axes)


def linear_interp_matrix(length: int, target: int) -> np.ndarray:
    """``(target, length)`` matrix of piecewise-linear interpolation weights.

    Endpoints map onto endpoints; a single source value is broadcast.
    """
    if length < 1 or target < 1:
        raise DimensionError(f"upsampling needs positive lengths, got {length} -> {target}")
    mat = np.zeros((target, length))
    if length == 1:
        mat[:, 0] = 1.0
        return mat
    if target == 1:
        mat[0, 0] = 1.0
        return mat
    pos = np.arange(target) * (length - 1) / (target - 1)
    left = np.minimum(np.floor(pos).astype(int), length - 2)
    frac = pos - left
    rows = np.arange(target)
    mat[rows, left] = 1.0 - frac
    mat[rows, left + 1] += frac
    return mat


def upsample_linear_1d(x, target_length: int) -> Tensor:
    """Linearly resample the last axis of ``x`` to ``target_length`` points."""
    x = ensure_tensor(x)
    mat = linear_interp_matrix(x.shape[-1], int(target_length))
    if x.ndim == 1:
        return matmul(x.reshape((1, -1)), Tensor(mat.T)).reshape((int(target_length),))
    return matmul(x, Tensor(mat.T))


def linear(x, weight, bias=None) -> Tensor:
    """``x @ weight.T + bias`` with ``weight`` shaped ``(out, in)``."""
    x, weight = ensure_tensor(x), ensure_tensor(weight)
    out = matmul(x if x.ndim >= 2 else x.reshape((1, -1)), weight.transpose())
    if x.ndim == 1:
        out = out.reshape((weight.shape[0],))
    if bias is not None:
        out = out + bias
    return out


def cross_entropy(logits, labels) -> Tensor:
    """Mean negative log-likelihood of integer ``labels`` under softmax(logits)."""
    logits = ensure_tensor(logits)
    labels = np.asarray(labels, dtype=int)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise DimensionError(f"cross_entropy needs (B, K) logits and B labels, got {logits.shape}, {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= logits.shape[1]):
        raise DimensionError(f"labels outside [0, {logits.shape[1]})")
    logp = log_softmax(logits, axis=1)
    picked = slice_(logp, (np.arange(len(labels)), labels))
    return -(picked.mean())


__all__ = [
    "BatchNormState",
    "batch_norm",
    "conv1d",
    "conv2d",
    "cross_entropy",
    "global_average_pool",
    "linear",
    "linear_interp_matrix",
    "lstm",
    "same_padding",
    "upsample_linear_1d",
]
