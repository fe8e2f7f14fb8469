"""Minibatch training loop: seeded shuffles, Adam updates, per-epoch stats."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput
from ..pipeline import load_split, normalization_stats, normalize_images
from .adam import AdamConfig, adam_step, init_adam_state
from .checkpoint import Checkpoint, TrainingMeta


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidInput(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise InvalidInput(f"epochs must be >= 0, got {self.epochs}")

    def adam(self) -> AdamConfig:
        return AdamConfig(self.learning_rate, self.beta1, self.beta2, self.eps)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def train_arrays(net, images, labels, cfg: TrainConfig) -> list[EpochStats]:
    """Train in place on preloaded arrays; returns per-epoch running stats.

    Loss/accuracy are running means over the epoch's minibatches (measured
    on the parameters in effect when each batch was visited).
    """
    n = images.shape[0]
    if n == 0:
        raise InvalidInput("empty training set")
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    state = init_adam_state(net.params)
    adam_cfg = cfg.adam()
    t = 0
    history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            loss, grads, logits = net._loss_grads_logits(images[batch], labels[batch])
            t += 1
            net.params, state = adam_step(net.params, grads, state, t, adam_cfg)
            loss_sum += loss * batch.size
            correct += int((logits.argmax(axis=1) == labels[batch]).sum())
        history.append(EpochStats(epoch, loss_sum / n, correct / n))
    return history


def train(net, manifest, pipeline, cfg: TrainConfig, manifest_root):
    """Full training entry point: load the train split through the
    pipeline, normalize, run the loop, and package a checkpoint."""
    images, labels, sample_rate = load_split(manifest, manifest_root, pipeline, "train")
    h, w = net.config.input_hw
    if images.shape[2:] != (h, w):
        raise InvalidInput(
            f"pipeline produces {images.shape[2:]} images, network expects {(h, w)}"
        )
    if net.config.n_classes != len(manifest.label_set):
        raise InvalidInput(
            f"network has {net.config.n_classes} classes, manifest has "
            f"{len(manifest.label_set)}"
        )
    mean, std = normalization_stats(images)
    history = train_arrays(net, normalize_images(images, mean, std), labels, cfg)
    final_loss = history[-1].loss if history else float("nan")
    checkpoint = Checkpoint(
        config=net.config,
        label_set=list(manifest.label_set),
        params={k: v.astype(np.float32) for k, v in net.params.items()},
        pipeline=pipeline,
        sample_rate=sample_rate,
        norm_mean=mean,
        norm_std=std,
        training_meta=TrainingMeta(cfg.epochs, final_loss, cfg.seed),
    )
    return checkpoint, history
