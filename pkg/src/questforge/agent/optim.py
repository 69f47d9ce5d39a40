"""Gradient-descent update rules over AgentParams arrays.

Both optimizers are functional: step() returns fresh params and leaves the
input untouched.  The Adam instance carries its moment estimates between
calls, so one instance must stay paired with one training run.
"""

from __future__ import annotations

import numpy as np

from .model import AgentParams


class Sgd:
    """Plain gradient descent, the reference update rule."""

    def __init__(self, learning_rate: float = 1e-3):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = learning_rate

    def step(self, params: AgentParams, grads: dict) -> AgentParams:
        out = params.copy()
        for name, grad in grads.items():
            out.arrays[name] = out.arrays[name] - self.learning_rate * grad
        return out


class Adam:
    """Adam with bias correction (Kingma & Ba), one moment pair per array."""

    def __init__(self, learning_rate: float = 3e-3, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= beta1 < 1.0 or not 0.0 <= beta2 < 1.0:
            raise ValueError("betas must lie in [0, 1)")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: AgentParams, grads: dict) -> AgentParams:
        self.step_count += 1
        out = params.copy()
        for name, grad in grads.items():
            m = self.beta1 * self._m.get(name, 0.0) + (1 - self.beta1) * grad
            v = self.beta2 * self._v.get(name, 0.0) + (1 - self.beta2) * grad * grad
            self._m[name] = m
            self._v[name] = v
            m_hat = m / (1 - self.beta1 ** self.step_count)
            v_hat = v / (1 - self.beta2 ** self.step_count)
            out.arrays[name] = out.arrays[name] - self.learning_rate * m_hat / (
                np.sqrt(v_hat) + self.epsilon)
        return out


def make_optimizer(name: str, learning_rate: float):
    """Build an optimizer from its config-file spelling."""
    if name == "sgd":
        return Sgd(learning_rate)
    if name == "adam":
        return Adam(learning_rate)
    raise ValueError(f"unknown optimizer: {name!r}")
