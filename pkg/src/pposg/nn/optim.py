"""Adam optimizer and the soft target-network update."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


class Adam:
    def __init__(self, params: dict[str, Tensor], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(p.data, dtype=np.float64) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data, dtype=np.float64) for k, p in params.items()}

    def step(self) -> None:
        """Apply one update from the gradients currently held by the params."""
        self.step_count += 1
        t = self.step_count
        for k, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            g = g.astype(np.float64)
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            m_hat = self.m[k] / (1 - self.beta1 ** t)
            v_hat = self.v[k] / (1 - self.beta2 ** t)
            p.data = p.data - (self.lr * m_hat / (np.sqrt(v_hat) + self.eps)).astype(p.data.dtype)

    def state(self) -> dict:
        return {
            "step": self.step_count,
            "m": {k: v.copy() for k, v in self.m.items()},
            "v": {k: v.copy() for k, v in self.v.items()},
        }

    def load_state(self, state: dict) -> None:
        self.step_count = int(state["step"])
        for k in self.m:
            self.m[k] = np.asarray(state["m"][k], dtype=np.float64)
            self.v[k] = np.asarray(state["v"][k], dtype=np.float64)


def soft_update(target: dict[str, Tensor], online: dict[str, Tensor], tau: float) -> None:
    """target <- (1 - tau) * target + tau * online, elementwise."""
    for k, t in target.items():
        t.data = (1.0 - tau) * t.data + tau * online[k].data
