"""Adam parameter updates with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput, ShapeError


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0 or self.eps <= 0:
            raise InvalidInput("learning_rate and eps must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise InvalidInput("betas must lie in [0, 1)")


def init_adam_state(params: dict[str, np.ndarray]):
    return {
        name: (np.zeros_like(p), np.zeros_like(p)) for name, p in params.items()
    }


def adam_step(params, grads, state, t: int, cfg: AdamConfig):
    """One Adam update; returns (new_params, new_state).

    m and v are first/second moment running averages; the bias-corrected
    step is lr * m_hat / (sqrt(v_hat) + eps).
    """
    if t < 1:
        raise InvalidInput(f"step index must be >= 1, got {t}")
    new_params, new_state = {}, {}
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"{name}: grad shape {g.shape} != param shape {p.shape}")
        m, v = state[name]
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        new_params[name] = p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        new_state[name] = (m, v)
    return new_params, new_state
