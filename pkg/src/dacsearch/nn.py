"""Small fully-connected Q-network and Adam optimizer, numpy only.

The network maps a feature-diff vector to one Q-value per portfolio
heuristic: linear layers with rectifier activations on the hidden
layers and a linear output.  Gradients are computed analytically by
backpropagation (verified against finite differences in the test
suite); everything runs in float64 for exact reproducibility.
"""

from __future__ import annotations

import numpy as np


class Mlp:
    """Feed-forward network; ``sizes = (input, hidden..., output)``."""

    def __init__(self, sizes, seed: int = 0, init_scale: float | None = None):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.sizes = tuple(int(s) for s in sizes)
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes, self.sizes[1:]):
            scale = init_scale if init_scale is not None else np.sqrt(2.0 / fan_in)
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "Mlp":
        clone = Mlp.__new__(Mlp)
        clone.sizes = self.sizes
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        return clone

    def load_from(self, other: "Mlp") -> None:
        for mine, theirs in zip(self.params, other.params):
            mine[...] = theirs

    def forward_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.sizes[0]:
            raise ValueError(f"expected batch of {self.sizes[0]}-vectors, got {X.shape}")
        a = X
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w + b
            if i < last:
                a = np.maximum(a, 0.0)
        return a

    def forward(self, x) -> np.ndarray:
        return self.forward_batch(np.asarray(x, dtype=np.float64).reshape(1, -1))[0]

    def td_gradients(self, X, actions, targets):
        """Loss and gradients of 0.5 * mean((Q(s, a) - target)^2).

        Only the chosen action's output contributes per sample.  Returned
        gradients are ordered like :attr:`params` (W0, b0, W1, b1, ...).
        """
        X = np.asarray(X, dtype=np.float64)
        actions = np.asarray(actions, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.sizes[0]:
            raise ValueError(f"expected batch of {self.sizes[0]}-vectors, got {X.shape}")
        if len(actions) != len(X) or len(targets) != len(X):
            raise ValueError("batch size mismatch between inputs, actions, targets")
        batch = len(X)
        last = len(self.weights) - 1
        # forward pass, keeping pre- and post-activation values
        activations = [X]
        a = X
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            a = np.maximum(z, 0.0) if i < last else z
            activations.append(a)
        q = activations[-1]
        picked = q[np.arange(batch), actions]
        err = picked - targets
        loss = 0.5 * float(np.mean(err**2))
        delta = np.zeros_like(q)
        delta[np.arange(batch), actions] = err / batch
        grads: list[np.ndarray] = []
        for i in range(last, -1, -1):
            grads.append(delta.sum(axis=0))  # bias
            grads.append(activations[i].T @ delta)  # weights
            if i > 0:
                delta = delta @ self.weights[i].T
                delta = delta * (activations[i] > 0.0)
        grads.reverse()
        return loss, grads

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mlp":
        net = cls.__new__(cls)
        net.sizes = tuple(data["sizes"])
        net.weights = [np.array(w, dtype=np.float64) for w in data["weights"]]
        net.biases = [np.array(b, dtype=np.float64) for b in data["biases"]]
        for w, b, fan_in, fan_out in zip(net.weights, net.biases, net.sizes, net.sizes[1:]):
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise ValueError("parameter shapes inconsistent with architecture")
        return net


class AdamOptimizer:
    """Standard Adam with bias correction, updating parameters in place."""

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        if len(grads) != len(params):
            raise ValueError("gradient list does not match parameter list")
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
