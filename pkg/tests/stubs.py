"""Tiny hand-wired graphs whose activations are simple functions of the input."""

import numpy as np

from tsemlab.autograd import Tensor, concat, relu
from tsemlab.models import ModelConfig
from tsemlab.models.graph import ModelGraph


class ChannelStub(ModelGraph):
    """``pre_gap_maps`` are the input itself (channel 0) and optionally its ReLU (channel 1)."""

    architecture = "stub"

    def __init__(self, D=2, T=5, K=3, channels=1, weight=None, bias=None):
        self.n_channels = channels
        super().__init__(ModelConfig(D, T, K, window_override=1))
        if weight is not None:
            self.params["dense.weight"].data = np.array(weight, dtype=np.float64).reshape(K, channels)
        if bias is not None:
            self.params["dense.bias"].data = np.array(bias, dtype=np.float64)

    def _init_params(self, rng):
        self._dense_param(rng, self.n_channels)

    def _forward(self, x, training, tap, update_stats):
        n, D, T = x.shape
        maps = [x.reshape((n, 1, D, T))]
        if self.n_channels == 2:
            maps.append(relu(x).reshape((n, 1, D, T)))
        A = maps[0] if self.n_channels == 1 else concat(maps, axis=1)
        return tap("pre_gap_maps", A)
