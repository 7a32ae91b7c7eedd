import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tsemlab.autograd import (
    Adam,
    AdamState,
    AutogradError,
    BatchNormState,
    Tensor,
    adam_step,
    backward,
    batch_norm,
    concat,
    conv1d,
    conv2d,
    cross_entropy,
    global_average_pool,
    grad,
    linear,
    lstm,
    matmul,
    relu,
    same_padding,
    sigmoid,
    softmax,
    tanh,
    upsample_linear_1d,
)
from tsemlab.autograd.gradcheck import gradcheck
from tsemlab.errors import DimensionError, NumericError


class TestConv2d:
    def test_scalar_kernel(self):
        out = conv2d(np.ones((1, 3, 3)), np.full((1, 1, 1, 1), 2.0))
        np.testing.assert_array_equal(out.data, np.full((1, 3, 3), 2.0))

    def test_shift_select(self):
        out = conv2d(np.array([[[1.0, 2.0, 3.0]]]), np.array([[[[1.0, 0.0]]]]))
        np.testing.assert_array_equal(out.data, [[[1.0, 2.0]]])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((2, 4, 6))
        k = rng.standard_normal((3, 2, 2, 3))
        out = conv2d(x, k, padding=(1, 1))
        ref = oracles.conv2d_loops(x, k, pad=((1, 1), (1, 1)))
        assert out.shape == (3, 5, 6)
        np.testing.assert_allclose(out.data, ref, atol=1e-9, rtol=0)

    def test_strided_asymmetric_padding(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((2, 3, 9))
        k = rng.standard_normal((4, 2, 1, 4))
        pad = ((0, 0), same_padding(4, 2, 9))
        out = conv2d(x, k, padding=pad, stride=(1, 2))
        ref = oracles.conv2d_loops(x, k, pad=pad, stride=(1, 2))
        np.testing.assert_allclose(out.data, ref, atol=1e-9, rtol=0)
        assert out.shape[-1] == 5

    def test_output_extent_formula(self):
        x = np.zeros((1, 7, 10))
        out = conv2d(x, np.zeros((2, 1, 3, 4)), padding=(1, 2), stride=(2, 3))
        assert out.shape == (2, (7 + 2 - 3) // 2 + 1, (10 + 4 - 4) // 3 + 1)

    def test_channel_mismatch_names_axis(self):
        with pytest.raises(DimensionError, match="channel"):
            conv2d(np.zeros((2, 3, 3)), np.zeros((1, 3, 1, 1)))

    def test_kernel_too_large(self):
        with pytest.raises(DimensionError, match="width"):
            conv2d(np.zeros((1, 3, 3)), np.zeros((1, 1, 1, 5)))

    def test_batched_equals_unbatched(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((4, 2, 3, 5))
        k = rng.standard_normal((3, 2, 1, 3))
        batched = conv2d(x, k, padding=(0, 1)).data
        for b in range(4):
            np.testing.assert_allclose(batched[b], conv2d(x[b], k, padding=(0, 1)).data, atol=1e-12)


class TestConv1d:
    def test_identity_kernel(self):
        np.testing.assert_array_equal(conv1d(np.array([[1.0, 2.0, 3.0]]), np.ones((1, 1, 1))).data, [[1, 2, 3]])

    def test_box_kernel(self):
        np.testing.assert_array_equal(conv1d(np.ones((1, 4)), np.ones((1, 1, 2))).data, [[2, 2, 2]])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 10))
        k = rng.standard_normal((4, 3, 3))
        np.testing.assert_allclose(conv1d(x, k).data, oracles.conv1d_loops(x, k), atol=1e-9, rtol=0)
        np.testing.assert_allclose(
            conv1d(x, k, padding=1).data, oracles.conv1d_loops(x, k, pad=(1, 1)), atol=1e-9, rtol=0
        )


class TestLstm:
    def test_zero_weights_fixed_point(self):
        x = np.random.default_rng(0).standard_normal((7, 2))
        seq, final = lstm(x, np.zeros((12, 2)), np.zeros((12, 3)), np.zeros(12))
        np.testing.assert_array_equal(seq.data, np.zeros((7, 3)))
        np.testing.assert_array_equal(final.data, np.zeros(3))

    def test_single_step_closed_form(self):
        w_ih = np.array([[0.5], [-0.3], [0.8], [1.2]])
        w_hh = np.array([[0.1], [0.2], [0.3], [0.4]])
        b = np.array([0.05, 1.0, -0.1, 0.2])
        x = np.array([[0.7]])
        sig = lambda v: 1 / (1 + math.exp(-v))
        i = sig(0.5 * 0.7 + 0.05)
        g = math.tanh(0.8 * 0.7 - 0.1)
        o = sig(1.2 * 0.7 + 0.2)
        expected = o * math.tanh(i * g)
        _, final = lstm(x, w_ih, w_hh, b)
        assert final.data[0] == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_scalar_recurrence(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((5, 2))
        w_ih, w_hh, b = rng.standard_normal((12, 2)), rng.standard_normal((12, 3)), rng.standard_normal(12)
        seq, final = lstm(x, w_ih, w_hh, b)
        ref = oracles.lstm_loops(x, w_ih, w_hh, b)
        np.testing.assert_allclose(seq.data, ref, atol=1e-9, rtol=0)
        np.testing.assert_allclose(final.data, ref[-1], atol=1e-9, rtol=0)

    def test_bad_shapes(self):
        with pytest.raises(DimensionError):
            lstm(np.zeros((3, 2)), np.zeros((12, 3)), np.zeros((12, 3)), np.zeros(12))

    def test_non_finite_names_step(self):
        x = np.zeros((4, 1))
        x[2, 0] = np.nan
        with pytest.raises(NumericError, match="time step 2"):
            lstm(x, np.ones((4, 1)), np.zeros((4, 1)), np.zeros(4))


class TestBatchNorm:
    def test_standardized_input_nearly_unchanged(self):
        x = np.random.default_rng(0).standard_normal((16, 2, 5))
        x = (x - x.mean(axis=(0, 2), keepdims=True)) / x.std(axis=(0, 2), keepdims=True)
        state = BatchNormState.fresh(2)
        out = batch_norm(x, np.ones(2), np.zeros(2), state, training=True, eps=1e-5)
        np.testing.assert_allclose(out.data, x / math.sqrt(1 + 1e-5), atol=1e-12)
        # deviation is the eps shrinkage only: |x| * (1 - 1/sqrt(1 + eps)) < 5e-6 |x|
        assert np.all(np.abs(out.data - x) <= 5e-6 * np.abs(x) + 1e-15)

    def test_constant_channel_goes_to_zero(self):
        x = np.random.default_rng(1).standard_normal((8, 3, 4))
        x[:, 1] = 4.2
        out = batch_norm(x, np.ones(3), np.zeros(3), BatchNormState.fresh(3), training=True)
        assert np.all(np.isfinite(out.data))
        np.testing.assert_allclose(out.data[:, 1], 0.0, atol=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_two_pass_oracle(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((6, 3, 2, 4)) * 3 + 1
        gamma, beta = rng.standard_normal(3), rng.standard_normal(3)
        out = batch_norm(x, gamma, beta, BatchNormState.fresh(3), training=True, eps=1e-5)
        np.testing.assert_allclose(out.data, oracles.batchnorm_two_pass(x, gamma, beta, 1e-5), atol=1e-9, rtol=0)

    def test_running_state_and_inference(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((10, 2, 3)) + 5
        state = BatchNormState.fresh(2, momentum=0.5)
        batch_norm(x, np.ones(2), np.zeros(2), state, training=True)
        mu = x.mean(axis=(0, 2))
        var = x.var(axis=(0, 2), ddof=1)
        np.testing.assert_allclose(state.running_mean, 0.5 * mu, atol=1e-12)
        np.testing.assert_allclose(state.running_var, 0.5 + 0.5 * var, atol=1e-12)
        out = batch_norm(x, np.ones(2), np.zeros(2), state, training=False)
        expect = (x - state.running_mean[None, :, None]) / np.sqrt(state.running_var[None, :, None] + 1e-5)
        np.testing.assert_allclose(out.data, expect, atol=1e-12)

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            batch_norm(np.zeros((2, 1)), np.ones(1), np.zeros(1), BatchNormState.fresh(1), True, eps=0)


class TestPoolingAndUpsampling:
    def test_gap_single_channel(self):
        np.testing.assert_array_equal(global_average_pool(np.array([[[1.0, 3.0], [5.0, 7.0]]])).data, [4.0])

    def test_gap_two_channels(self):
        np.testing.assert_array_equal(global_average_pool(np.array([[1.0, 3.0], [5.0, 7.0]])).data, [2.0, 6.0])

    def test_gap_loop_oracle(self):
        x = np.random.default_rng(0).standard_normal((4, 5, 6))
        np.testing.assert_allclose(global_average_pool(x).data, oracles.gap_loops(x), atol=1e-12)

    @pytest.mark.parametrize(
        "src, n, expected",
        [([0.0, 1.0], 3, [0, 0.5, 1]), ([5.0], 4, [5, 5, 5, 5]), ([0.0, 1.0, 0.0], 5, [0, 0.5, 1, 0.5, 0])],
    )
    def test_upsample_examples(self, src, n, expected):
        np.testing.assert_allclose(upsample_linear_1d(np.array(src), n).data, expected, atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=12),
        st.integers(1, 40),
    )
    def test_upsample_endpoints_and_monotonicity(self, values, target):
        src = np.sort(np.array(values))
        out = upsample_linear_1d(src, target).data
        assert out[0] == src[0]
        if target > 1:
            assert out[-1] == src[-1]
        assert np.all(np.diff(out) >= -1e-9 * (1 + np.abs(out[:-1])))

    def test_upsample_rejects_empty(self):
        with pytest.raises(DimensionError):
            upsample_linear_1d(np.array([1.0]), 0)


class TestPrimitives:
    def test_softmax_examples(self):
        np.testing.assert_array_equal(softmax(Tensor([0.0, 0.0])).data, [0.5, 0.5])
        out = softmax(Tensor([1000.0, 1000.0])).data
        assert np.all(np.isfinite(out))
        np.testing.assert_array_equal(out, [0.5, 0.5])

    def test_relu_example(self):
        np.testing.assert_array_equal(relu(Tensor([-1.0, 2.0])).data, [0.0, 2.0])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-700, 700, allow_nan=False), min_size=1, max_size=20))
    def test_softmax_is_a_distribution(self, row):
        out = softmax(Tensor(np.array([row]))).data
        assert np.all(out >= 0)
        assert abs(out.sum() - 1.0) < 1e-12

    def test_concat_and_slice(self):
        a, b = Tensor([[1.0, 2.0]]), Tensor([[3.0, 4.0]])
        np.testing.assert_array_equal(concat([a, b], axis=0).data, [[1, 2], [3, 4]])
        np.testing.assert_array_equal(concat([a, b], axis=0)[1].data, [3, 4])


class TestCrossEntropy:
    def test_uniform_logits(self):
        loss = cross_entropy(np.zeros((3, 4)), [0, 1, 3])
        assert loss.item() == pytest.approx(math.log(4), abs=1e-12)

    def test_large_margin_limit(self):
        logits = np.array([[50.0, 0.0, 0.0], [0.0, 0.0, 80.0]])
        assert cross_entropy(logits, [0, 2]).item() < 1e-20

    def test_direct_formula(self):
        rng = np.random.default_rng(5)
        logits = rng.standard_normal((3, 5))
        labels = [4, 0, 2]
        ref = oracles.cross_entropy_direct(logits, labels)
        assert cross_entropy(logits, labels).item() == pytest.approx(ref, abs=1e-12)


class TestBackward:
    def test_sum_gives_ones(self):
        x = Tensor(np.random.default_rng(0).standard_normal((2, 3)), requires_grad=True)
        backward(x.sum())
        np.testing.assert_array_equal(x.grad, np.ones((2, 3)))

    def test_square(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        backward((x * x).sum())
        np.testing.assert_array_equal(x.grad, [2.0, 4.0])

    def test_fan_out_accumulates(self):
        x = Tensor(np.ones((3, 2)), requires_grad=True)
        backward(x.sum() + x.sum())
        np.testing.assert_array_equal(x.grad, np.full((3, 2), 2.0))

    def test_tapeless_tensor_rejected(self):
        with pytest.raises(AutogradError):
            backward(Tensor(3.0))

    def test_functional_grad_leaves_params_untouched(self):
        w = Tensor([2.0, 3.0], requires_grad=True)
        x = Tensor([1.0, 1.0], requires_grad=True)
        (gx,) = grad((w * x).sum(), [x])
        np.testing.assert_array_equal(gx, [2.0, 3.0])
        assert w.grad is None and x.grad is None


def _rng_inputs(seed, *shapes):
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(s) for s in shapes]


GRADCHECK_CASES = {
    "add": (lambda a, b: a + b, [(3, 4), (1, 4)]),
    "sub": (lambda a, b: a - b, [(2, 3), (2, 3)]),
    "mul": (lambda a, b: a * b, [(3, 4), (3, 1)]),
    "scale": (lambda a: a * 2.5, [(5,)]),
    "matmul": (lambda a, b: matmul(a, b), [(3, 4), (4, 2)]),
    "relu": (relu, [(4, 5)]),
    "sigmoid": (sigmoid, [(4, 5)]),
    "tanh": (tanh, [(4, 5)]),
    "softmax": (lambda a: softmax(a, axis=1), [(3, 4)]),
    "concat": (lambda a, b: concat([a, b], axis=1), [(2, 3), (2, 2)]),
    "slice": (lambda a: a[1:, ::2], [(3, 5)]),
    "mean": (lambda a: a.mean(axis=(1, 2)), [(2, 3, 4)]),
    "linear": (lambda x, w, b: linear(x, w, b), [(3, 4), (2, 4), (2,)]),
    "conv2d": (lambda x, k, b: conv2d(x, k, b, padding=((0, 0), (1, 2))), [(2, 2, 3, 5), (3, 2, 1, 3), (3,)]),
    "conv2d_strided": (lambda x, k: conv2d(x, k, padding=(1, 1), stride=(1, 2)), [(1, 2, 3, 7), (2, 2, 2, 3)]),
    "conv1d": (lambda x, k, b: conv1d(x, k, b, padding=(1, 1)), [(2, 3, 6), (2, 3, 3), (2,)]),
    "lstm": (lambda x, wi, wh, b: lstm(x, wi, wh, b)[0], [(2, 4, 2), (12, 2), (12, 3), (12,)]),
    "lstm_final": (lambda x, wi, wh, b: lstm(x, wi, wh, b)[1], [(4, 2), (8, 2), (8, 2), (8,)]),
    "batchnorm_train": (
        lambda x, g, b: batch_norm(x, g, b, BatchNormState.fresh(2), training=True),
        [(4, 2, 3), (2,), (2,)],
    ),
    "batchnorm_infer": (
        lambda x, g, b: batch_norm(x, g, b, BatchNormState(np.array([0.3, -0.2]), np.array([1.5, 0.7])), False),
        [(4, 2, 3), (2,), (2,)],
    ),
    "gap": (lambda x: global_average_pool(x, channel_axis=1), [(2, 3, 2, 4)]),
    "upsample": (lambda x: upsample_linear_1d(x, 9), [(2, 4)]),
    "cross_entropy": (lambda z: cross_entropy(z, [1, 0, 2]), [(3, 4)]),
}


@pytest.mark.parametrize("name", sorted(GRADCHECK_CASES))
def test_gradients_match_finite_differences(name):
    fn, shapes = GRADCHECK_CASES[name]
    for seed in range(20):
        err = gradcheck(fn, _rng_inputs(seed, *shapes), h=1e-5, seed=seed)
        assert err < 1e-5, f"{name} seed {seed}: relative error {err:.2e}"


class TestAdam:
    def test_zero_gradient_no_move(self):
        p = [np.array([1.0, -2.0])]
        out = adam_step(p, [np.zeros(2)], AdamState(), lr=0.1)
        np.testing.assert_array_equal(out[0], p[0])

    def test_first_step_is_signed_lr(self):
        g = np.array([0.3, -4.0, 1e-3])
        out = adam_step([np.zeros(3)], [g], AdamState(), lr=0.01)
        np.testing.assert_allclose(out[0], -0.01 * np.sign(g), rtol=1e-4)

    def test_quadratic_descent(self):
        w = Tensor([1.0], requires_grad=True)
        opt = Adam([w], lr=0.1)
        history = [abs(w.data[0])]
        for _ in range(10):
            opt.zero_grad()
            backward((w * w).sum())
            opt.step()
            history.append(abs(w.data[0]))
        assert all(b < a for a, b in zip(history, history[1:]))
