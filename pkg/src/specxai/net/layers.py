"""Forward/backward primitives on [N, C, H, W] arrays.

Each forward returns (out, cache); the matching backward consumes the
upstream gradient and the cache. Convolution is cross-correlation with
zero padding, computed as a single matrix product over an im2col view.
All functions work in the dtype of their inputs (float32 for training,
float64 for finite-difference verification).
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInput, ShapeError


def _out_dim(size: int, k: int, pad: int, stride: int) -> int:
    return (size + 2 * pad - k) // stride + 1


def _im2col(xp: np.ndarray, kh: int, kw: int, stride: int, ho: int, wo: int):
    """[N, C, Hp, Wp] -> [N, C*kh*kw, Ho*Wo], window channels as rows.

    One contiguous plane copy per kernel offset; far cheaper than
    reshaping a 6-D strided window view.
    """
    n, c, _, _ = xp.shape
    cols = np.empty((n, c, kh * kw, ho, wo), dtype=xp.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i * kw + j] = xp[
                :, :, i : i + stride * ho : stride, j : j + stride * wo : stride
            ]
    return cols.reshape(n, c * kh * kw, ho * wo)


def conv2d_forward(x, w, b, stride: int = 1, padding: int = 0):
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeError(f"conv expects 4-D input and weights, got {x.shape}, {w.shape}")
    n, c, h, wd = x.shape
    o, cw, kh, kw = w.shape
    if cw != c:
        raise ShapeError(f"input has {c} channels, weights expect {cw}")
    if b.shape != (o,):
        raise ShapeError(f"bias shape {b.shape} != ({o},)")
    if kh != kw or kh not in (1, 3):
        raise ShapeError(f"only square 1x1 and 3x3 kernels supported, got {kh}x{kw}")
    ho, wo = _out_dim(h, kh, padding, stride), _out_dim(wd, kw, padding, stride)
    if ho < 1 or wo < 1:
        raise ShapeError(f"conv output would be empty for input {h}x{wd}")
    if padding:
        xp = np.zeros((n, c, h + 2 * padding, wd + 2 * padding), dtype=x.dtype)
        xp[:, :, padding : padding + h, padding : padding + wd] = x
    else:
        xp = x
    cols = _im2col(xp, kh, kw, stride, ho, wo)
    out = np.matmul(w.reshape(o, -1), cols)  # [N, O, Ho*Wo]
    out += b[:, None]
    out = out.reshape(n, o, ho, wo)
    cache = (x.shape, cols, w, stride, padding, ho, wo)
    return out, cache


def conv2d_backward(dout, cache):
    x_shape, cols, w, stride, padding, ho, wo = cache
    n, c, h, wd = x_shape
    o = w.shape[0]
    kh, kw = w.shape[2], w.shape[3]
    dmat = dout.reshape(n, o, ho * wo)
    dw = np.matmul(dmat, cols.transpose(0, 2, 1)).sum(axis=0).reshape(w.shape)
    db = dmat.sum(axis=(0, 2))
    dcols = np.matmul(w.reshape(o, -1).T, dmat)  # [N, C*kh*kw, Ho*Wo]
    dwin = dcols.reshape(n, c, kh, kw, ho, wo)
    dxp = np.zeros((n, c, h + 2 * padding, wd + 2 * padding), dtype=dout.dtype)
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride] += (
                dwin[:, :, i, j]
            )
    if padding:
        dx = dxp[:, :, padding:-padding, padding:-padding]
    else:
        dx = dxp
    return dx, dw, db


def relu_forward(x):
    return np.maximum(x, 0), x


def relu_backward(dout, cache):
    return dout * (cache > 0)


def gap_forward(x):
    """Global average pooling [N, C, H, W] -> [N, C]."""
    return x.mean(axis=(2, 3)), x.shape


def gap_backward(dout, cache):
    n, c, h, w = cache
    return np.broadcast_to(dout[:, :, None, None], (n, c, h, w)) / (h * w)


def linear_forward(x, w, b):
    if x.shape[1] != w.shape[1]:
        raise ShapeError(f"linear input dim {x.shape[1]} != weight dim {w.shape[1]}")
    return x @ w.T + b, (x, w)


def linear_backward(dout, cache):
    x, w = cache
    return dout @ w, dout.T @ x, dout.sum(axis=0)


def softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits, labels):
    """Mean cross-entropy and its gradient w.r.t. the logits."""
    labels = np.asarray(labels)
    n, k = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels shape {labels.shape} != ({n},)")
    if labels.min() < 0 or labels.max() >= k:
        raise InvalidInput(f"labels must lie in [0, {k})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -log_probs[np.arange(n), labels].mean()
    dlogits = np.exp(log_probs)
    dlogits[np.arange(n), labels] -= 1.0
    return loss, dlogits / n
