"""CAM-family saliency methods.

Every method reads channel activations ``A`` (``(B, C, *S)``) from the model's
activation registry, derives one weight per channel and instance, and returns
``ReLU(sum_k w_k A_k)`` aligned onto the ``(D, T)`` input grid. Class scores
``Y^c`` are pre-softmax logits. All computation is batched over instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..autograd import Tensor, grad
from ..errors import ConfigError, DimensionError
from ..models.graph import ModelGraph
from .maps import ExplanationMap, align_channel_maps, normalize_values

EPS = 1e-12
FORWARD_CHUNK = 256


@dataclass(frozen=True)
class CamContext:
    """Everything a method needs besides the instance and the target class.

    ``noise`` is the smoothing standard deviation as a fraction of each
    instance's value range (or of the activation range, for activation
    smoothing). ``baseline`` is the value masked-out cells take in the
    Score-CAM family.
    """

    model: ModelGraph
    activation_key: str = "pre_gap_maps"
    n_samples: int = 8
    noise: float = 0.1
    steps: int = 8
    seed: int = 0
    baseline: float = 0.0

    def __post_init__(self):
        if self.n_samples < 1 or self.steps < 1:
            raise ConfigError("n_samples and steps must be at least 1")
        if self.noise < 0:
            raise ConfigError("noise must be non-negative")


# -- plumbing ------------------------------------------------------------------------
def _as_batch(ctx: CamContext, instances) -> tuple[np.ndarray, bool]:
    X = np.asarray(instances, dtype=np.float64)
    single = X.ndim == 2
    if single:
        X = X[None]
    cfg = ctx.model.config
    if X.ndim != 3 or X.shape[1:] != (cfg.n_features, cfg.seq_length):
        raise DimensionError(f"instances must be (D={cfg.n_features}, T={cfg.seq_length}), got {X.shape[-2:]}")
    return X, single


def _resolve_classes(ctx: CamContext, X: np.ndarray, target) -> np.ndarray:
    K = ctx.model.config.n_classes
    if target is None:
        return _logits(ctx, X).argmax(axis=1)
    classes = np.broadcast_to(np.asarray(target, dtype=int), (len(X),)).copy()
    if np.any(classes < 0) or np.any(classes >= K):
        raise ConfigError(f"target class outside [0, {K})")
    return classes


def _registry(ctx: CamContext, X: np.ndarray, hooks=None) -> dict[str, Tensor]:
    reg = ctx.model.forward(X, hooks=hooks)
    if ctx.activation_key not in reg:
        raise ConfigError(
            f"unknown activation key {ctx.activation_key!r} for {ctx.model.architecture}; "
            f"available: {', '.join(sorted(reg))}"
        )
    return reg


def _logits(ctx: CamContext, X: np.ndarray, hooks_for: Callable | None = None) -> np.ndarray:
    """Logits for a possibly large batch, in chunks. ``hooks_for(lo, hi)`` builds per-chunk hooks."""
    out = []
    for lo in range(0, len(X), FORWARD_CHUNK):
        hi = min(lo + FORWARD_CHUNK, len(X))
        hooks = hooks_for(lo, hi) if hooks_for else None
        out.append(_registry(ctx, X[lo:hi], hooks)["logits"].data)
    return np.concatenate(out) if out else np.zeros((0, ctx.model.config.n_classes))


def _scores(ctx: CamContext, X: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """``Y^c`` for a ``(B, M, D, T)`` stack of inputs; returns ``(B, M)``."""
    B, M = X.shape[:2]
    logits = _logits(ctx, X.reshape((B * M,) + X.shape[2:]))
    return logits[np.arange(B * M), np.repeat(classes, M)].reshape(B, M)


def _activations(ctx: CamContext, X: np.ndarray) -> np.ndarray:
    return np.concatenate(
        [_registry(ctx, X[lo : lo + FORWARD_CHUNK])[ctx.activation_key].data for lo in range(0, len(X), FORWARD_CHUNK)]
    )


def _activation_gradients(ctx: CamContext, X: np.ndarray, classes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Activations ``A`` and ``dY^c/dA`` for each instance, both ``(B, C, *S)``."""
    A_parts, G_parts = [], []
    for lo in range(0, len(X), FORWARD_CHUNK):
        chunk, cls = X[lo : lo + FORWARD_CHUNK], classes[lo : lo + FORWARD_CHUNK]
        holder = {}

        def make_leaf(t: Tensor) -> Tensor:
            holder["leaf"] = Tensor(t.data.copy(), requires_grad=True)
            return holder["leaf"]

        reg = _registry(ctx, chunk, {ctx.activation_key: make_leaf})
        logits = reg["logits"]
        seed = np.zeros(logits.shape)
        seed[np.arange(len(chunk)), cls] = 1.0
        (g,) = grad(logits, [holder["leaf"]], seed=seed)
        A_parts.append(holder["leaf"].data)
        G_parts.append(g)
    return np.concatenate(A_parts), np.concatenate(G_parts)


def _cells(a: np.ndarray) -> tuple[int, ...]:
    """Spatial axes of a ``(B, C, *S)`` array."""
    return tuple(range(2, a.ndim))


def _expand(w: np.ndarray, ndim: int) -> np.ndarray:
    return w.reshape(w.shape + (1,) * (ndim - w.ndim))


def _combine(ctx: CamContext, A: np.ndarray, weights: np.ndarray) -> np.ndarray:
    cam = np.maximum((A * _expand(weights, A.ndim)).sum(axis=1), 0.0)
    cfg = ctx.model.config
    return align_channel_maps(cam[:, None], cfg.n_features, cfg.seq_length)[:, 0]


def _rngs(ctx: CamContext, seeds: np.ndarray) -> list[np.random.Generator]:
    return [np.random.default_rng([ctx.seed, int(s)]) for s in seeds]


def _input_noise(ctx: CamContext, X: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """``(B, n, D, T)`` Gaussian noise scaled by ``noise`` times each instance's range."""
    span = X.max(axis=(1, 2)) - X.min(axis=(1, 2))
    return np.stack(
        [rng.standard_normal((ctx.n_samples,) + X.shape[1:]) * ctx.noise * s for rng, s in zip(_rngs(ctx, seeds), span)]
    )


# -- gradient-free and gradient weights ----------------------------------------------
def _cam(ctx, X, classes, seeds):
    if ctx.activation_key != "pre_gap_maps":
        raise ConfigError("CAM reads the dense-layer weights and needs activation_key='pre_gap_maps'")
    A = _activations(ctx, X)
    W, _ = ctx.model.head()
    return A, W[classes]


def _grad_cam(ctx, X, classes, seeds):
    A, G = _activation_gradients(ctx, X, classes)
    return A, G.mean(axis=_cells(G))


def _pp_weights(A: np.ndarray, g1: np.ndarray, g2: np.ndarray, g3: np.ndarray) -> np.ndarray:
    total = A.sum(axis=_cells(A), keepdims=True)
    denom = 2.0 * g2 + total * g3
    safe = np.where(denom != 0, denom, 1.0)
    alpha = np.where(denom != 0, g2 / safe, 0.0)
    return (alpha * np.maximum(g1, 0.0)).sum(axis=_cells(A))


def _grad_cam_pp(ctx, X, classes, seeds):
    A, G = _activation_gradients(ctx, X, classes)
    return A, _pp_weights(A, G, G**2, G**3)


def _smooth_grad_cam_pp(ctx, X, classes, seeds):
    if ctx.noise == 0:
        return _grad_cam_pp(ctx, X, classes, seeds)
    A, _ = _activation_gradients(ctx, X, classes)
    n = ctx.n_samples
    noisy = (X[:, None] + _input_noise(ctx, X, seeds)).reshape((-1,) + X.shape[1:])
    _, G = _activation_gradients(ctx, noisy, np.repeat(classes, n))
    G = G.reshape((len(X), n) + G.shape[1:])
    return A, _pp_weights(A, G.mean(axis=1), (G**2).mean(axis=1), (G**3).mean(axis=1))


def _xgrad_cam(ctx, X, classes, seeds):
    A, G = _activation_gradients(ctx, X, classes)
    cells = _cells(A)
    return A, (A * G).sum(axis=cells) / (A.sum(axis=cells) + EPS)


def _ablation_cam(ctx, X, classes, seeds):
    A = _activations(ctx, X)
    B, C = A.shape[:2]
    base = _logits(ctx, X)[np.arange(B), classes]
    copies = np.repeat(X, C, axis=0)
    keep = 1.0 - np.eye(C)

    def hooks_for(lo, hi):
        channel = np.arange(lo, hi) % C
        mask = _expand(keep[channel], A.ndim)

        def ablate(t: Tensor) -> Tensor:
            return Tensor(t.data * mask)

        return {ctx.activation_key: ablate}

    ablated = _logits(ctx, copies, hooks_for)[np.arange(B * C), np.repeat(classes, C)].reshape(B, C)
    return A, (base[:, None] - ablated) / (np.abs(base)[:, None] + EPS)


# -- Score-CAM family -----------------------------------------------------------------
def _score_masks(ctx: CamContext, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min-max normalized upsampled maps ``H`` (B, C, D, T) and a flat-map flag (B, C)."""
    cfg = ctx.model.config
    up = align_channel_maps(A, cfg.n_features, cfg.seq_length)
    flat = up.max(axis=(2, 3)) <= up.min(axis=(2, 3))
    return normalize_values(up, "minmax"), flat


def _mask(ctx: CamContext, X: np.ndarray, H: np.ndarray) -> np.ndarray:
    b = ctx.baseline
    return b + (X[:, None] - b) * H


def _softmax_weights(scores: np.ndarray, flat: np.ndarray) -> np.ndarray:
    z = np.where(flat, -np.inf, scores)
    top = z.max(axis=1, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    e = np.where(flat, 0.0, np.exp(z - top))
    total = e.sum(axis=1, keepdims=True)
    return np.where(total > 0, e / np.where(total > 0, total, 1.0), 0.0)


def _score_cam_with(ctx, X, classes, scorer):
    A = _activations(ctx, X)
    H, flat = _score_masks(ctx, A)
    return A, _softmax_weights(scorer(A, H), flat)


def _score_cam(ctx, X, classes, seeds):
    return _score_cam_with(ctx, X, classes, lambda A, H: _scores(ctx, _mask(ctx, X, H), classes))


def _integrated_score_cam(ctx, X, classes, seeds):
    if ctx.steps == 1:
        return _score_cam(ctx, X, classes, seeds)

    def scorer(A, H):
        masked = _mask(ctx, X, H)
        b = ctx.baseline
        total = np.zeros(H.shape[:2])
        for j in range(1, ctx.steps + 1):
            total += _scores(ctx, b + (j / ctx.steps) * (masked - b), classes)
        return total / ctx.steps

    return _score_cam_with(ctx, X, classes, scorer)


def _activation_smoothed_score_cam(ctx, X, classes, seeds):
    if ctx.noise == 0:
        return _score_cam(ctx, X, classes, seeds)

    def scorer(A, H):
        span = A.max(axis=tuple(range(1, A.ndim))) - A.min(axis=tuple(range(1, A.ndim)))
        rngs = _rngs(ctx, seeds)
        total = np.zeros(H.shape[:2])
        for _ in range(ctx.n_samples):
            noise = np.stack([rng.standard_normal(A.shape[1:]) * ctx.noise * s for rng, s in zip(rngs, span)])
            Hn, _ = _score_masks(ctx, A + noise)
            total += _scores(ctx, _mask(ctx, X, Hn), classes)
        return total / ctx.n_samples

    return _score_cam_with(ctx, X, classes, scorer)


def _input_smoothed_score_cam(ctx, X, classes, seeds):
    if ctx.noise == 0:
        return _score_cam(ctx, X, classes, seeds)

    def scorer(A, H):
        noise = _input_noise(ctx, X, seeds)
        total = np.zeros(H.shape[:2])
        for i in range(ctx.n_samples):
            total += _scores(ctx, _mask(ctx, X + noise[:, i], H), classes)
        return total / ctx.n_samples

    return _score_cam_with(ctx, X, classes, scorer)


_WEIGHTS = {
    "cam": _cam,
    "grad_cam": _grad_cam,
    "grad_cam_pp": _grad_cam_pp,
    "smooth_grad_cam_pp": _smooth_grad_cam_pp,
    "xgrad_cam": _xgrad_cam,
    "ablation_cam": _ablation_cam,
    "score_cam": _score_cam,
    "integrated_score_cam": _integrated_score_cam,
    "activation_smoothed_score_cam": _activation_smoothed_score_cam,
    "input_smoothed_score_cam": _input_smoothed_score_cam,
}
METHODS = tuple(_WEIGHTS)
CAM_FAMILY = METHODS


def channel_weights(ctx: CamContext, method: str, instances, target=None, seeds=None):
    """Raw activations ``(B, C, *S)`` and per-channel weights ``(B, C)`` of ``method``."""
    if method not in _WEIGHTS:
        raise ConfigError(f"unknown attribution method {method!r}; choose from {', '.join(METHODS)}")
    X, _ = _as_batch(ctx, instances)
    classes = _resolve_classes(ctx, X, target)
    seeds = np.arange(len(X)) if seeds is None else np.asarray(seeds)
    return _WEIGHTS[method](ctx, X, classes, seeds)


def explain_batch(ctx: CamContext, method: str, instances, target=None, seeds=None) -> tuple[np.ndarray, np.ndarray]:
    """Maps ``(B, D, T)`` and the class explained for each instance.

    ``target`` defaults to the predicted class. ``seeds`` gives each instance
    its own noise stream (default: its batch position), so a map does not
    depend on which other instances share the batch.
    """
    X, _ = _as_batch(ctx, instances)
    classes = _resolve_classes(ctx, X, target)
    A, w = channel_weights(ctx, method, X, classes, seeds)
    return _combine(ctx, A, w), classes


def explain(ctx: CamContext, method: str, instances, target=None, seeds=None):
    """One :class:`ExplanationMap` for a ``(D, T)`` instance, or a list for a batch."""
    X, single = _as_batch(ctx, instances)
    maps, classes = explain_batch(ctx, method, X, target, seeds)
    out = [ExplanationMap(m, method, int(c)) for m, c in zip(maps, classes)]
    return out[0] if single else out


def _public(name: str):
    def method(ctx: CamContext, instance, c=None, seeds=None):
        return explain(ctx, name, instance, c, seeds)

    method.__name__ = name
    method.__qualname__ = name
    method.__doc__ = f"``{name}`` saliency for one instance (or a batch); ``c`` defaults to the prediction."
    return method


cam = _public("cam")
grad_cam = _public("grad_cam")
grad_cam_pp = _public("grad_cam_pp")
smooth_grad_cam_pp = _public("smooth_grad_cam_pp")
xgrad_cam = _public("xgrad_cam")
ablation_cam = _public("ablation_cam")
score_cam = _public("score_cam")
integrated_score_cam = _public("integrated_score_cam")
activation_smoothed_score_cam = _public("activation_smoothed_score_cam")
input_smoothed_score_cam = _public("input_smoothed_score_cam")
