"""Network forward against a loop-based oracle, residual identity, shapes."""

import numpy as np
import pytest

from specxai.errors import InvalidInput, ShapeError
from specxai.net.layers import softmax
from specxai.net.model import Network, NetworkConfig


def oracle_conv(x, w, b, stride, pad):
    """Cross-correlation written as explicit loops over output pixels."""
    n_batch, c_in, h, wd = x.shape
    o_ch, _, k, _ = w.shape
    ho = (h + 2 * pad - k) // stride + 1
    wo = (wd + 2 * pad - k) // stride + 1
    out = np.zeros((n_batch, o_ch, ho, wo))
    for n in range(n_batch):
        for o in range(o_ch):
            for i in range(ho):
                for j in range(wo):
                    acc = b[o]
                    for c in range(c_in):
                        for di in range(k):
                            for dj in range(k):
                                r = i * stride + di - pad
                                s = j * stride + dj - pad
                                if 0 <= r < h and 0 <= s < wd:
                                    acc += w[o, c, di, dj] * x[n, c, r, s]
                    out[n, o, i, j] = acc
    return out


def oracle_forward(net, x):
    """The whole network, re-derived without the layer abstractions."""
    p = net.params
    h = oracle_conv(x, p["stem.w"], p["stem.b"], 1, 1)
    for blk in net.blocks:
        a = np.where(h > 0, h, 0.0)
        m = oracle_conv(a, p[f"{blk.name}.conv1.w"], p[f"{blk.name}.conv1.b"], blk.stride, 1)
        m = np.where(m > 0, m, 0.0)
        m = oracle_conv(m, p[f"{blk.name}.conv2.w"], p[f"{blk.name}.conv2.b"], 1, 1)
        if blk.has_proj:
            skip = oracle_conv(h, p[f"{blk.name}.proj.w"], p[f"{blk.name}.proj.b"], blk.stride, 0)
        else:
            skip = h
        h = skip + m
    features = np.where(h > 0, h, 0.0)
    pooled = features.mean(axis=(2, 3))
    return pooled @ p["fc.w"].T + p["fc.b"], features


def test_forward_matches_loop_oracle():
    config = NetworkConfig(
        n_classes=3, input_hw=(8, 8), channels_per_stage=(3, 4), blocks_per_stage=(1, 1), seed=5
    )
    net = Network(config, dtype=np.float64)
    x = np.random.default_rng(11).normal(size=(2, 1, 8, 8))
    logits, features = net.forward(x)
    want_logits, want_features = oracle_forward(net, x)
    assert np.allclose(logits, want_logits, atol=1e-10)
    assert np.allclose(features, want_features, atol=1e-10)


def test_zero_parameters_give_zero_logits():
    net = Network(NetworkConfig(n_classes=2, input_hw=(8, 8), channels_per_stage=(2,), blocks_per_stage=(1,)))
    for name in net.params:
        net.params[name] = np.zeros_like(net.params[name])
    logits, _ = net.forward(np.zeros((3, 1, 8, 8), dtype=np.float32))
    assert np.all(logits == 0)


def test_softmax_of_logits_normalized():
    net = Network(NetworkConfig(n_classes=4, input_hw=(8, 8), channels_per_stage=(3,), blocks_per_stage=(1,), seed=2))
    x = np.random.default_rng(0).normal(size=(5, 1, 8, 8)).astype(np.float32)
    logits, _ = net.forward(x)
    assert np.allclose(softmax(logits).sum(axis=1), 1.0, atol=1e-6)


def test_zero_weight_block_is_identity():
    config = NetworkConfig(
        n_classes=2, input_hw=(8, 8), channels_per_stage=(3,), blocks_per_stage=(2,), seed=3
    )
    net = Network(config, dtype=np.float64)
    # zero the second (identity-skip) block
    for pname in ("s0b1.conv1.w", "s0b1.conv1.b", "s0b1.conv2.w", "s0b1.conv2.b"):
        net.params[pname] = np.zeros_like(net.params[pname])
    x = np.random.default_rng(4).normal(size=(2, 1, 8, 8))
    logits, _ = net.forward(x)

    one_block = Network(
        NetworkConfig(n_classes=2, input_hw=(8, 8), channels_per_stage=(3,), blocks_per_stage=(1,), seed=3),
        dtype=np.float64,
    )
    for name in ("stem.w", "stem.b", "s0b0.conv1.w", "s0b0.conv1.b", "s0b0.conv2.w", "s0b0.conv2.b", "fc.w", "fc.b"):
        one_block.params[name] = net.params[name].copy()
    want, _ = one_block.forward(x)
    assert np.allclose(logits, want, atol=1e-12)


def test_features_are_final_stage_activations():
    config = NetworkConfig(
        n_classes=2, input_hw=(16, 16), channels_per_stage=(2, 5), blocks_per_stage=(1, 1), seed=6
    )
    net = Network(config)
    x = np.random.default_rng(1).normal(size=(3, 1, 16, 16)).astype(np.float32)
    logits, features = net.forward(x)
    assert features.shape == (3, 5, 8, 8)  # one stride-2 transition
    assert features.min() >= 0  # post-ReLU
    pooled = features.mean(axis=(2, 3))
    again = pooled @ net.params["fc.w"].T + net.params["fc.b"]
    assert np.allclose(logits, again, atol=1e-5)


def test_input_shape_validated():
    net = Network(NetworkConfig(n_classes=2, input_hw=(8, 8), channels_per_stage=(2,), blocks_per_stage=(1,)))
    with pytest.raises(ShapeError):
        net.forward(np.zeros((1, 1, 9, 8), dtype=np.float32))
    with pytest.raises(ShapeError):
        net.forward(np.zeros((1, 2, 8, 8), dtype=np.float32))


def test_config_validation():
    with pytest.raises(InvalidInput):
        NetworkConfig(n_classes=1)
    with pytest.raises(InvalidInput):
        NetworkConfig(n_classes=2, channels_per_stage=())
    with pytest.raises(InvalidInput):
        NetworkConfig(n_classes=2, channels_per_stage=(4,), blocks_per_stage=(1, 1))
    with pytest.raises(InvalidInput):
        NetworkConfig(n_classes=2, input_hw=(4, 64))


def test_init_deterministic_per_seed():
    a = Network(NetworkConfig(n_classes=2, seed=9, input_hw=(8, 8), channels_per_stage=(2,), blocks_per_stage=(1,)))
    b = Network(NetworkConfig(n_classes=2, seed=9, input_hw=(8, 8), channels_per_stage=(2,), blocks_per_stage=(1,)))
    for name in a.params:
        assert np.array_equal(a.params[name], b.params[name])
