"""A small residual CNN: conv stem, pre-activation residual blocks with
stride-2 transitions, global average pooling, and a linear softmax head.

Pre-activation blocks (out = skip + conv2(relu(conv1(relu(in))))) make a
block with all-zero weights an exact identity, which keeps the topology
verifiable. The final conv activations (post-ReLU, pre-pooling) are the
feature maps consumed by the class-activation-map computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput, ShapeError
from .layers import (
    conv2d_backward,
    conv2d_forward,
    cross_entropy,
    gap_backward,
    gap_forward,
    linear_backward,
    linear_forward,
    relu_backward,
    relu_forward,
)


@dataclass(frozen=True)
class NetworkConfig:
    n_classes: int
    input_hw: tuple[int, int] = (64, 64)
    channels_per_stage: tuple[int, ...] = (16, 32, 64)
    blocks_per_stage: tuple[int, ...] = (2, 2, 2)
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise InvalidInput(f"need at least 2 classes, got {self.n_classes}")
        if not self.channels_per_stage:
            raise InvalidInput("need at least one stage")
        if len(self.blocks_per_stage) != len(self.channels_per_stage):
            raise InvalidInput("channels_per_stage and blocks_per_stage lengths differ")
        if any(c < 1 for c in self.channels_per_stage):
            raise InvalidInput("stage channel counts must be positive")
        if any(b < 1 for b in self.blocks_per_stage):
            raise InvalidInput("blocks per stage must be positive")
        if min(self.input_hw) < 8:
            raise InvalidInput(f"input dims must be >= 8, got {self.input_hw}")


@dataclass(frozen=True)
class _BlockDef:
    name: str
    in_ch: int
    out_ch: int
    stride: int

    @property
    def has_proj(self) -> bool:
        return self.stride != 1 or self.in_ch != self.out_ch


class Network:
    """Owns the parameter dict; forward/backward are plain array code."""

    def __init__(self, config: NetworkConfig, dtype=np.float32):
        self.config = config
        self.dtype = np.dtype(dtype)
        self.blocks: list[_BlockDef] = []
        prev = config.channels_per_stage[0]
        for s, (ch, n_blocks) in enumerate(
            zip(config.channels_per_stage, config.blocks_per_stage)
        ):
            for b in range(n_blocks):
                stride = 2 if (s > 0 and b == 0) else 1
                self.blocks.append(_BlockDef(f"s{s}b{b}", prev, ch, stride))
                prev = ch
        self.params = self._init_params()

    def _init_params(self) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(np.random.SeedSequence(self.config.seed))
        params: dict[str, np.ndarray] = {}

        def he_conv(name, out_ch, in_ch, k):
            std = np.sqrt(2.0 / (in_ch * k * k))
            params[f"{name}.w"] = (
                rng.standard_normal((out_ch, in_ch, k, k), dtype=np.float64) * std
            ).astype(self.dtype)
            params[f"{name}.b"] = np.zeros(out_ch, dtype=self.dtype)

        he_conv("stem", self.config.channels_per_stage[0], 1, 3)
        for blk in self.blocks:
            he_conv(f"{blk.name}.conv1", blk.out_ch, blk.in_ch, 3)
            he_conv(f"{blk.name}.conv2", blk.out_ch, blk.out_ch, 3)
            if blk.has_proj:
                he_conv(f"{blk.name}.proj", blk.out_ch, blk.in_ch, 1)
        c_last = self.config.channels_per_stage[-1]
        std = np.sqrt(2.0 / c_last)
        params["fc.w"] = (
            rng.standard_normal((self.config.n_classes, c_last), dtype=np.float64) * std
        ).astype(self.dtype)
        params["fc.b"] = np.zeros(self.config.n_classes, dtype=self.dtype)
        return params

    def _check_input(self, x):
        h, w = self.config.input_hw
        if x.ndim != 4 or x.shape[1] != 1 or x.shape[2] != h or x.shape[3] != w:
            raise ShapeError(
                f"expected input [N, 1, {h}, {w}], got {tuple(x.shape)}"
            )

    def forward(self, x, with_cache: bool = False):
        """Returns (logits [N, K], features [N, C, h, w]) and, on request,
        the layer caches needed for backprop."""
        self._check_input(x)
        p = self.params
        caches: dict = {"blocks": [], "relu_inputs": []}

        h, stem_cache = conv2d_forward(x, p["stem.w"], p["stem.b"], stride=1, padding=1)
        caches["stem"] = stem_cache

        for blk in self.blocks:
            a, pre_cache = relu_forward(h)
            m, c1 = conv2d_forward(
                a, p[f"{blk.name}.conv1.w"], p[f"{blk.name}.conv1.b"],
                stride=blk.stride, padding=1,
            )
            m_act, mid_cache = relu_forward(m)
            m2, c2 = conv2d_forward(
                m_act, p[f"{blk.name}.conv2.w"], p[f"{blk.name}.conv2.b"],
                stride=1, padding=1,
            )
            if blk.has_proj:
                skip, cp = conv2d_forward(
                    h, p[f"{blk.name}.proj.w"], p[f"{blk.name}.proj.b"],
                    stride=blk.stride, padding=0,
                )
            else:
                skip, cp = h, None
            h = skip + m2
            caches["blocks"].append((blk, pre_cache, c1, mid_cache, c2, cp))
            caches["relu_inputs"] += [pre_cache, mid_cache]

        features, feat_cache = relu_forward(h)
        caches["features"] = feat_cache
        caches["relu_inputs"].append(feat_cache)

        pooled, gap_cache = gap_forward(features)
        logits, fc_cache = linear_forward(pooled, p["fc.w"], p["fc.b"])
        caches["gap"] = gap_cache
        caches["fc"] = fc_cache

        if with_cache:
            return logits, features, caches
        return logits, features

    def loss_and_grads(self, x, labels):
        """Mean cross-entropy over the batch and gradients for every parameter."""
        loss, grads, _ = self._loss_grads_logits(x, labels)
        return loss, grads

    def _loss_grads_logits(self, x, labels):
        logits, _, caches = self.forward(x, with_cache=True)
        loss, dlogits = cross_entropy(logits, labels)
        grads: dict[str, np.ndarray] = {}

        dpooled, grads["fc.w"], grads["fc.b"] = linear_backward(dlogits, caches["fc"])
        dfeatures = gap_backward(dpooled, caches["gap"])
        dh = relu_backward(dfeatures, caches["features"])

        for blk, pre_cache, c1, mid_cache, c2, cp in reversed(caches["blocks"]):
            dm2 = dh
            dm_act, dw2, db2 = conv2d_backward(dm2, c2)
            grads[f"{blk.name}.conv2.w"] = dw2
            grads[f"{blk.name}.conv2.b"] = db2
            dm = relu_backward(dm_act, mid_cache)
            da, dw1, db1 = conv2d_backward(dm, c1)
            grads[f"{blk.name}.conv1.w"] = dw1
            grads[f"{blk.name}.conv1.b"] = db1
            dh_main = relu_backward(da, pre_cache)
            if cp is not None:
                dh_skip, dwp, dbp = conv2d_backward(dh, cp)
                grads[f"{blk.name}.proj.w"] = dwp
                grads[f"{blk.name}.proj.b"] = dbp
            else:
                dh_skip = dh
            dh = dh_main + dh_skip

        _, grads["stem.w"], grads["stem.b"] = conv2d_backward(dh, caches["stem"])
        ordered = {name: grads[name] for name in self.params}
        return loss, ordered, logits

    def predict_logits(self, x):
        logits, _ = self.forward(x)
        return logits
