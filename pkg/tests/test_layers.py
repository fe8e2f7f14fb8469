"""Hand-computed layer cases, Adam closed forms, finite-difference checks."""

import numpy as np
import pytest

from specxai.errors import InvalidInput, ShapeError
from specxai.net.adam import AdamConfig, adam_step, init_adam_state
from specxai.net.layers import (
    conv2d_backward,
    conv2d_forward,
    cross_entropy,
    gap_backward,
    gap_forward,
    linear_forward,
    relu_forward,
    softmax,
)

from gradcheck import finite_diff_grads, loss_of, make_tiny_net, net_without_kinks


class TestConvForward:
    def test_ones_kernel_padding(self):
        x = np.ones((1, 1, 3, 3))
        w = np.ones((1, 1, 3, 3))
        b = np.zeros(1)
        out, _ = conv2d_forward(x, w, b, stride=1, padding=1)
        assert out.shape == (1, 1, 3, 3)
        assert out[0, 0, 1, 1] == 9
        for r, c in [(0, 0), (0, 2), (2, 0), (2, 2)]:
            assert out[0, 0, r, c] == 4
        for r, c in [(0, 1), (1, 0), (1, 2), (2, 1)]:
            assert out[0, 0, r, c] == 6

    def test_identity_1x1_kernel(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(2, 3, 5, 4))
        w = np.zeros((3, 3, 1, 1))
        for c in range(3):
            w[c, c, 0, 0] = 1.0
        out, _ = conv2d_forward(x, w, np.zeros(3))
        assert np.allclose(out, x)

    def test_zero_weights_give_bias(self):
        x = np.random.default_rng(1).normal(size=(2, 2, 4, 4))
        out, _ = conv2d_forward(x, np.zeros((3, 2, 3, 3)), np.array([1.0, -2.0, 0.5]), padding=1)
        assert np.allclose(out[:, 0], 1.0)
        assert np.allclose(out[:, 1], -2.0)
        assert np.allclose(out[:, 2], 0.5)

    def test_stride_two_dims(self):
        x = np.zeros((1, 1, 8, 8))
        out, _ = conv2d_forward(x, np.zeros((1, 1, 3, 3)), np.zeros(1), stride=2, padding=1)
        assert out.shape == (1, 1, 4, 4)

    def test_channel_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            conv2d_forward(np.zeros((1, 2, 4, 4)), np.zeros((1, 3, 3, 3)), np.zeros(1))


class TestConvBackwardNumeric:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(2, 3, 6, 5))
        w = rng.normal(size=(4, 3, 3, 3))
        b = rng.normal(size=4)
        dout = rng.normal(size=(2, 4, 3, 3))

        def loss(xv, wv, bv):
            out, _ = conv2d_forward(xv, wv, bv, stride=2, padding=1)
            return float((out * dout).sum())

        _, cache = conv2d_forward(x, w, b, stride=2, padding=1)
        dx, dw, db = conv2d_backward(dout, cache)
        eps = 1e-6
        for arr, grad, args in (
            (x, dx, lambda v: loss(v, w, b)),
            (w, dw, lambda v: loss(x, v, b)),
            (b, db, lambda v: loss(x, w, v)),
        ):
            flat = arr.reshape(-1)
            for i in rng.choice(flat.size, size=min(20, flat.size), replace=False):
                orig = flat[i]
                flat[i] = orig + eps
                hi = args(arr)
                flat[i] = orig - eps
                lo = args(arr)
                flat[i] = orig
                fd = (hi - lo) / (2 * eps)
                assert abs(fd - grad.reshape(-1)[i]) < 1e-5 * max(1.0, abs(fd))


class TestGapLinear:
    def test_gap_is_spatial_mean(self):
        x = np.arange(24, dtype=float).reshape(1, 2, 3, 4)
        out, _ = gap_forward(x)
        assert np.allclose(out[0, 0], x[0, 0].mean())
        assert np.allclose(out[0, 1], x[0, 1].mean())

    def test_gap_backward_spreads_evenly(self):
        _, cache = gap_forward(np.zeros((1, 1, 2, 2)))
        dx = gap_backward(np.array([[4.0]]), cache)
        assert np.allclose(dx, 1.0)

    def test_linear_shape_check(self):
        with pytest.raises(ShapeError):
            linear_forward(np.zeros((1, 3)), np.zeros((2, 4)), np.zeros(2))


class TestSoftmaxCrossEntropy:
    def test_uniform_logits_loss_is_log_k(self):
        for k in (2, 5, 11):
            logits = np.zeros((3, k))
            loss, _ = cross_entropy(logits, np.array([0, 1, k - 1]))
            assert loss == pytest.approx(np.log(k), rel=1e-12)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(2)
        p = softmax(rng.normal(size=(10, 7)) * 3)
        assert np.all(p > 0) and np.all(p < 1)
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-6)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        logits = rng.normal(size=(4, 5))
        p1 = softmax(logits)
        p2 = softmax(logits + 123.4)
        assert np.allclose(p1, p2, atol=1e-6)
        assert np.array_equal(p1.argmax(axis=1), p2.argmax(axis=1))

    def test_duplicated_batch_keeps_loss(self):
        rng = np.random.default_rng(4)
        logits = rng.normal(size=(6, 3))
        labels = np.array([0, 1, 2, 0, 1, 2])
        loss1, _ = cross_entropy(logits, labels)
        loss2, _ = cross_entropy(np.vstack([logits, logits]), np.tile(labels, 2))
        assert loss1 == pytest.approx(loss2, rel=1e-12)

    def test_label_out_of_range(self):
        with pytest.raises(InvalidInput):
            cross_entropy(np.zeros((2, 3)), np.array([0, 3]))


class TestAdam:
    def test_first_step_closed_form(self):
        params = {"p": np.array([0.0])}
        grads = {"p": np.array([1.0])}
        state = init_adam_state(params)
        cfg = AdamConfig(learning_rate=1e-4)
        new_params, new_state = adam_step(params, grads, state, 1, cfg)
        m, v = new_state["p"]
        assert m[0] == pytest.approx(0.1, rel=1e-12)
        assert v[0] == pytest.approx(0.001, rel=1e-12)
        # m_hat = 1, v_hat = 1 after bias correction
        assert new_params["p"][0] == pytest.approx(-1e-4 / (1 + 1e-8), rel=1e-12)

    def test_zero_gradient_keeps_params(self):
        params = {"p": np.array([3.0, -2.0])}
        grads = {"p": np.zeros(2)}
        new_params, _ = adam_step(params, grads, init_adam_state(params), 1, AdamConfig())
        assert np.array_equal(new_params["p"], params["p"])

    def test_scale_invariance_at_first_step(self):
        params = {"p": np.array([1.0])}
        cfg = AdamConfig(learning_rate=1e-4)
        p1, _ = adam_step(params, {"p": np.array([1.0])}, init_adam_state(params), 1, cfg)
        p10, _ = adam_step(params, {"p": np.array([10.0])}, init_adam_state(params), 1, cfg)
        assert abs(p1["p"][0] - p10["p"][0]) < 1e-6

    def test_shape_mismatch_rejected(self):
        params = {"p": np.zeros(3)}
        with pytest.raises(ShapeError):
            adam_step(params, {"p": np.zeros(4)}, init_adam_state(params), 1, AdamConfig())

    def test_step_index_validated(self):
        params = {"p": np.zeros(1)}
        with pytest.raises(InvalidInput):
            adam_step(params, {"p": np.zeros(1)}, init_adam_state(params), 0, AdamConfig())


class TestGradCheck:
    def test_every_parameter_on_tiny_net(self):
        net, x, labels = net_without_kinks(seed=0)
        _, analytic = net.loss_and_grads(x, labels)
        numeric = finite_diff_grads(net, x, labels)
        for name in net.params:
            a, b = analytic[name], numeric[name]
            err = np.abs(a - b)
            tol = np.maximum(1e-4 * np.maximum(np.abs(a), np.abs(b)), 1e-6)
            assert np.all(err <= tol), f"{name}: max err {err.max():.2e}"

    def test_relu_inputs_inspectable(self):
        net, x, labels = net_without_kinks(seed=1)
        _, _, caches = net.forward(x, with_cache=True)
        assert min(np.abs(c).min() for c in caches["relu_inputs"]) > 1e-3
        assert loss_of(net, x, labels) > 0
