"""Network graphs for MTEX-CNN, XCM and TSEM.

Each graph owns named parameters and batch-norm states, and every forward pass
returns an activation registry: a dict of named tensors captured on the way
(``spatial_maps``, ``branch1_maps``, ``temporal_vector``, ``pre_gap_maps``,
``logits``, ``probs`` ...). ``hooks`` maps registry names to callables that may
replace a tensor before the rest of the network consumes it.
"""

from __future__ import annotations

import hashlib
import threading
from typing import Callable, Mapping

import numpy as np

from ..autograd import (
    BatchNormState,
    Tensor,
    batch_norm,
    concat,
    conv1d,
    conv2d,
    global_average_pool,
    linear,
    lstm,
    relu,
    same_padding,
    softmax,
    upsample_linear_1d,
)
from ..autograd.init import fan_in_uniform, lstm_weights
from ..errors import DimensionError
from .config import ModelConfig

Hooks = Mapping[str, Callable[[Tensor], Tensor]]


class ModelGraph:
    """Common machinery; subclasses define ``_init_params`` and ``_forward``."""

    architecture = ""
    gap_key = "pre_gap_maps"

    def __init__(self, config: ModelConfig):
        self.config = config
        self.params: dict[str, Tensor] = {}
        self.bn: dict[str, BatchNormState] = {}
        self._local = threading.local()
        rng = np.random.default_rng(config.seed)
        self._init_params(rng)
        self._check_alignment()

    # -- parameters -----------------------------------------------------------
    def _param(self, name: str, value: np.ndarray) -> None:
        self.params[name] = Tensor(value, requires_grad=True)

    def _conv_param(self, rng, name: str, shape) -> None:
        fan_in = int(np.prod(shape[1:]))
        self._param(f"{name}.weight", fan_in_uniform(rng, shape, fan_in))
        self._param(f"{name}.bias", fan_in_uniform(rng, (shape[0],), fan_in))

    def _bn_param(self, name: str, channels: int) -> None:
        self._param(f"{name}.gamma", np.ones(channels))
        self._param(f"{name}.beta", np.zeros(channels))
        self.bn[name] = BatchNormState.fresh(channels)

    def _dense_param(self, rng, in_features: int) -> None:
        k = self.config.n_classes
        self._param("dense.weight", fan_in_uniform(rng, (k, in_features), in_features))
        self._param("dense.bias", fan_in_uniform(rng, (k,), in_features))

    def parameters(self) -> list[Tensor]:
        return list(self.params.values())

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None

    def state_arrays(self) -> dict[str, np.ndarray]:
        """Every array needed to reproduce the forward pass, in a stable order."""
        out = {name: p.data for name, p in self.params.items()}
        for name, st in self.bn.items():
            out[f"{name}.running_mean"] = st.running_mean
            out[f"{name}.running_var"] = st.running_var
        return out

    def load_state_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        expected = self.state_arrays()
        missing = set(expected) - set(arrays)
        if missing:
            raise DimensionError(f"state is missing arrays: {sorted(missing)}")
        for name, ref in expected.items():
            value = np.asarray(arrays[name], dtype=np.float64)
            if value.shape != ref.shape:
                raise DimensionError(f"array {name}: shape {value.shape} does not match model shape {ref.shape}")
        for name, p in self.params.items():
            p.data = np.array(arrays[name], dtype=np.float64)
        for name, st in self.bn.items():
            st.running_mean = np.array(arrays[f"{name}.running_mean"], dtype=np.float64)
            st.running_var = np.array(arrays[f"{name}.running_var"], dtype=np.float64)

    def checksum(self) -> str:
        h = hashlib.sha256()
        for name, arr in self.state_arrays().items():
            h.update(name.encode())
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        return h.hexdigest()

    def head(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense weight (K, C) and bias (K) applied after global average pooling."""
        return self.params["dense.weight"].data, self.params["dense.bias"].data

    # -- forward ------------------------------------------------------------------
    def forward(
        self,
        x,
        training: bool = False,
        hooks: Hooks | None = None,
        update_stats: bool = True,
    ) -> dict[str, Tensor]:
        """Run the network on ``(D, T)`` or ``(B, D, T)`` input.

        Returns the activation registry; for unbatched input the caller still
        receives batched tensors (leading axis of one).
        """
        data = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
        if data.ndim == 2:
            data = data[None]
        cfg = self.config
        if data.ndim != 3 or data.shape[1:] != (cfg.n_features, cfg.seq_length):
            raise DimensionError(
                f"expected input (B, {cfg.n_features}, {cfg.seq_length}), got {tuple(data.shape)}"
            )
        if isinstance(x, Tensor):
            inp = x if x.ndim == 3 else x.reshape((1,) + x.shape)
        else:
            inp = Tensor(data)
        registry: dict[str, Tensor] = {}
        hooks = hooks or {}

        def tap(name: str, t: Tensor) -> Tensor:
            if name in hooks:
                t = hooks[name](t)
            registry[name] = t
            return t

        pre_gap = self._forward(inp, training, tap, update_stats)
        pooled = tap("pooled", global_average_pool(pre_gap, channel_axis=1))
        logits = tap("logits", linear(pooled, self.params["dense.weight"], self.params["dense.bias"]))
        registry["probs"] = softmax(logits, axis=1)
        self._local.registry = registry
        return registry

    @property
    def activations(self) -> dict[str, Tensor]:
        """Registry of the last forward call made from the current thread."""
        return getattr(self._local, "registry", {})

    def _bn(self, name: str, t: Tensor, training: bool, update_stats: bool) -> Tensor:
        return batch_norm(
            t,
            self.params[f"{name}.gamma"],
            self.params[f"{name}.beta"],
            self.bn[name],
            training=training,
            update_state=update_stats,
        )

    def _conv2d(self, name: str, t: Tensor, padding, stride=1) -> Tensor:
        return conv2d(t, self.params[f"{name}.weight"], self.params[f"{name}.bias"], padding=padding, stride=stride)

    def _conv1d(self, name: str, t: Tensor, padding) -> Tensor:
        return conv1d(t, self.params[f"{name}.weight"], self.params[f"{name}.bias"], padding=padding)

    def _check_alignment(self) -> None:
        cfg = self.config
        reg = self.forward(np.zeros((1, cfg.n_features, cfg.seq_length)), update_stats=False)
        self._assert_shapes(reg)

    def _assert_shapes(self, reg: dict[str, Tensor]) -> None:
        pass

    def _init_params(self, rng: np.random.Generator) -> None:
        raise NotImplementedError

    def _forward(self, x: Tensor, training: bool, tap, update_stats: bool) -> Tensor:
        raise NotImplementedError

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_local", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._local = threading.local()

    def __repr__(self) -> str:
        cfg = self.config
        return (
            f"{type(self).__name__}(D={cfg.n_features}, T={cfg.seq_length}, K={cfg.n_classes}, "
            f"w={cfg.window_size}, params={self.parameter_count()})"
        )


class XCM(ModelGraph):
    """Parallel 2-D (per-feature) and 1-D (across-feature) convolution branches.

    The reduced 2-D map (D rows) and the reduced 1-D map (one row) are stacked
    into a (D + 1) x T map, then a final 1-D convolution, GAP and a dense layer.
    """

    architecture = "xcm"

    def _init_params(self, rng):
        c = self.config
        w = c.window_size
        self._conv_param(rng, "b1_conv", (c.filters_2d, 1, 1, w))
        self._bn_param("b1_bn", c.filters_2d)
        self._conv_param(rng, "b1_reduce", (1, c.filters_2d, 1, 1))
        self._conv_param(rng, "b2_conv", (c.filters_1d, c.n_features, w))
        self._bn_param("b2_bn", c.filters_1d)
        self._conv_param(rng, "b2_reduce", (1, c.filters_1d, 1))
        self._conv_param(rng, "final_conv", (c.filters_1d, c.n_features + 1, w))
        self._dense_param(rng, c.filters_1d)

    def _forward(self, x, training, tap, update_stats):
        c = self.config
        n = x.shape[0]
        pad = same_padding(c.window_size)
        maps = self._conv2d("b1_conv", x.reshape((n, 1, c.n_features, c.seq_length)), ((0, 0), pad))
        maps = relu(self._bn("b1_bn", maps, training, update_stats))
        maps = tap("branch1_maps", tap("spatial_maps", maps))
        reduced = self._conv2d("b1_reduce", maps, 0).reshape((n, c.n_features, c.seq_length))
        reduced = tap("spatial_reduced", reduced)

        temporal = relu(self._bn("b2_bn", self._conv1d("b2_conv", x, pad), training, update_stats))
        temporal = tap("temporal_maps", temporal)
        tvec = self._conv1d("b2_reduce", temporal, 0).reshape((n, c.seq_length))
        tvec = tap("temporal_vector", tvec)

        stacked = tap("concat_map", concat([reduced, tvec.reshape((n, 1, c.seq_length))], axis=1))
        out = relu(self._conv1d("final_conv", stacked, pad))
        return tap("pre_gap_maps", out)

    def _assert_shapes(self, reg):
        c = self.config
        if reg["concat_map"].shape[1:] != (c.n_features + 1, c.seq_length):
            raise DimensionError(f"XCM concatenated map has shape {reg['concat_map'].shape[1:]}")
        if reg["pre_gap_maps"].shape[-1] != c.seq_length:
            raise DimensionError("XCM final maps do not preserve the time axis")


class TSEM(ModelGraph):
    """XCM backbone whose temporal branch is an LSTM gate on the 2-D feature maps.

    The final LSTM hidden state (length w) is linearly upsampled to T, passed
    through ReLU and multiplied along time into every 2-D branch map; a
    per-feature convolution over time, GAP and a dense layer follow.
    """

    architecture = "tsem"

    def _init_params(self, rng):
        c = self.config
        w = c.window_size
        self._conv_param(rng, "b1_conv", (c.filters_2d, 1, 1, w))
        self._bn_param("b1_bn", c.filters_2d)
        w_ih, w_hh, bias = lstm_weights(rng, c.n_features, w)
        self._param("lstm.w_ih", w_ih)
        self._param("lstm.w_hh", w_hh)
        self._param("lstm.bias", bias)
        self._conv_param(rng, "final_conv", (c.filters_1d, c.filters_2d, 1, w))
        self._dense_param(rng, c.filters_1d)

    def _forward(self, x, training, tap, update_stats):
        c = self.config
        n = x.shape[0]
        pad = same_padding(c.window_size)
        maps = self._conv2d("b1_conv", x.reshape((n, 1, c.n_features, c.seq_length)), ((0, 0), pad))
        maps = relu(self._bn("b1_bn", maps, training, update_stats))
        maps = tap("spatial_maps", maps)

        _, final = lstm(x.transpose((0, 2, 1)), self.params["lstm.w_ih"], self.params["lstm.w_hh"], self.params["lstm.bias"])
        final = tap("lstm_hidden", final)
        gate = relu(upsample_linear_1d(final, c.seq_length))
        gate = tap("temporal_vector", gate)

        fused = maps * gate.reshape((n, 1, 1, c.seq_length))
        fused = tap("branch1_maps", tap("fused_maps", fused))
        out = relu(self._conv2d("final_conv", fused, ((0, 0), pad)))
        return tap("pre_gap_maps", out)

    def _assert_shapes(self, reg):
        c = self.config
        if reg["fused_maps"].shape[1:] != (c.filters_2d, c.n_features, c.seq_length):
            raise DimensionError(f"TSEM fused maps have shape {reg['fused_maps'].shape[1:]}")
        if reg["pre_gap_maps"].shape[-1] != c.seq_length:
            raise DimensionError("TSEM final maps do not preserve the time axis")


class MTEXCNN(ModelGraph):
    """Serial network: two strided 2-D conv blocks, a 1x1 reduction, two 1-D conv blocks."""

    architecture = "mtexcnn"

    @property
    def reduced_length(self) -> int:
        t = self.config.seq_length
        return -(-(-(-t // 2)) // 2)

    @property
    def kernel_1d(self) -> int:
        return max(1, min(-(-self.config.window_size // 4), self.reduced_length))

    def _init_params(self, rng):
        c = self.config
        w = c.window_size
        self._conv_param(rng, "c1", (c.filters_2d, 1, 1, w))
        self._conv_param(rng, "c2", (c.filters_2d, c.filters_2d, 1, w))
        self._conv_param(rng, "reduce", (1, c.filters_2d, 1, 1))
        self._conv_param(rng, "c3", (c.filters_1d, c.n_features, self.kernel_1d))
        self._conv_param(rng, "c4", (c.filters_1d, c.filters_1d, self.kernel_1d))
        self._dense_param(rng, c.filters_1d)

    def _forward(self, x, training, tap, update_stats):
        c = self.config
        n = x.shape[0]
        w = c.window_size
        t1 = -(-c.seq_length // 2)
        h = x.reshape((n, 1, c.n_features, c.seq_length))
        h = relu(self._conv2d("c1", h, ((0, 0), same_padding(w, 2, c.seq_length)), stride=(1, 2)))
        h = relu(self._conv2d("c2", h, ((0, 0), same_padding(w, 2, t1)), stride=(1, 2)))
        h = tap("branch1_maps", tap("spatial_maps", h))
        seq = relu(self._conv2d("reduce", h, 0))
        seq = seq.reshape((n, c.n_features, seq.shape[-1]))
        seq = tap("flattened", seq)
        pad = same_padding(self.kernel_1d)
        h = relu(self._conv1d("c3", seq, pad))
        h = relu(self._conv1d("c4", h, pad))
        return tap("pre_gap_maps", h)

    def _assert_shapes(self, reg):
        if reg["pre_gap_maps"].shape[-1] != self.reduced_length:
            raise DimensionError("MTEX-CNN temporal extent does not match the stride arithmetic")


_BUILDERS = {"xcm": XCM, "tsem": TSEM, "mtexcnn": MTEXCNN}


def build_xcm(config: ModelConfig) -> XCM:
    return XCM(_with_arch(config, "xcm"))


def build_tsem(config: ModelConfig) -> TSEM:
    return TSEM(_with_arch(config, "tsem"))


def build_mtexcnn(config: ModelConfig) -> MTEXCNN:
    return MTEXCNN(_with_arch(config, "mtexcnn"))


def build_model(config: ModelConfig) -> ModelGraph:
    return _BUILDERS[config.architecture](config)


def _with_arch(config: ModelConfig, arch: str) -> ModelConfig:
    if config.architecture == arch:
        return config
    data = config.to_dict()
    data["architecture"] = arch
    return ModelConfig(**data)
