"""Adam over a named parameter dictionary.

State is keyed by parameter name and updated in insertion order, so a fixed
seed gives bit-identical trajectories.  A missing gradient counts as zero
rather than an error: ablation variants legitimately leave whole branches
out of the graph.
"""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
                 clip_norm=None):
        if lr < 0:
            raise ValueError("learning rate must be non-negative")
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.clip_norm = clip_norm
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in self.params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in self.params.items()}

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def _gradients(self):
        return {k: (p.grad if p.grad is not None else np.zeros_like(p.data))
                for k, p in self.params.items()}

    def step(self):
        self.t += 1
        grads = self._gradients()
        if self.clip_norm is not None:
            total = 0.0
            for g in grads.values():
                total += float(np.sum(np.asarray(g, dtype=np.float64) ** 2))
            norm = total ** 0.5
            if norm > self.clip_norm:
                scale = np.float32(self.clip_norm / norm)
                grads = {k: g * scale for k, g in grads.items()}
        b1 = np.float32(self.beta1)
        b2 = np.float32(self.beta2)
        bias1 = 1.0 - self.beta1 ** self.t
        bias2 = 1.0 - self.beta2 ** self.t
        for name, p in self.params.items():
            g = grads[name]
            self.m[name] = b1 * self.m[name] + (np.float32(1.0) - b1) * g
            self.v[name] = b2 * self.v[name] + (np.float32(1.0) - b2) * (g * g)
            m_hat = self.m[name] / np.float32(bias1)
            v_hat = self.v[name] / np.float32(bias2)
            if self.lr == 0.0:
                continue
            update = self.lr * m_hat / (np.sqrt(v_hat) + np.float32(self.eps))
            p.data = p.data - update.astype(p.data.dtype)
