"""From-scratch multilayer perceptron on numpy arrays.

Dense layers with tanh hidden activations and a linear output, loss =
mean squared error averaged over batch and outputs, gradients by
reverse-mode backpropagation.  Weight matrices are row-major out×in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fablink.errors import FablinkError

DEFAULT_DIMS = (14, 32, 16, 2)


class ShapeError(FablinkError):
    pass


@dataclass(slots=True)
class Mlp:
    dims: tuple[int, ...]
    weights: list[np.ndarray]  # weights[i]: (dims[i+1], dims[i])
    biases: list[np.ndarray]  # biases[i]: (dims[i+1],)

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        if len(self.dims) < 2 or any(d < 1 for d in self.dims):
            raise ShapeError(f"invalid layer dims {self.dims}")
        if len(self.weights) != len(self.dims) - 1 or len(self.biases) != len(self.dims) - 1:
            raise ShapeError("one weight matrix and bias vector per layer required")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.dims[i + 1], self.dims[i])
            if w.shape != want:
                raise ShapeError(f"weights[{i}] has shape {w.shape}, expected {want}")
            if b.shape != (self.dims[i + 1],):
                raise ShapeError(f"biases[{i}] has shape {b.shape}, expected ({self.dims[i+1]},)")
        for arr in (*self.weights, *self.biases):
            if not np.all(np.isfinite(arr)):
                raise ShapeError("parameters must be finite")

    @property
    def n_in(self) -> int:
        return self.dims[0]

    @property
    def n_out(self) -> int:
        return self.dims[-1]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


def init_mlp(dims: tuple[int, ...] = DEFAULT_DIMS, rng: np.random.Generator | None = None) -> Mlp:
    """Glorot-uniform weights on ±sqrt(6/(fan_in+fan_out)), zero biases."""
    if rng is None:
        rng = np.random.default_rng(0)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(dims=tuple(dims), weights=weights, biases=biases)


def _as_batch(mlp: Mlp, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != mlp.n_in:
        raise ShapeError(f"input has shape {X.shape}, expected (n, {mlp.n_in})")
    return X


def forward(mlp: Mlp, x) -> np.ndarray:
    """Network output for one input vector (length dims[0])."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != mlp.n_in:
        raise ShapeError(f"input has shape {x.shape}, expected ({mlp.n_in},)")
    return forward_batch(mlp, x[None, :])[0]


def forward_batch(mlp: Mlp, X) -> np.ndarray:
    X = _as_batch(mlp, X)
    a = X
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = a @ w.T + b
        a = z if i == last else np.tanh(z)
    return a


def loss_and_grad(mlp: Mlp, X, Y) -> tuple[float, list[np.ndarray]]:
    """MSE over batch and outputs, plus the gradient of every parameter.

    Gradients come back in ``mlp.parameters()`` order:
    W0, b0, W1, b1, ...
    """
    X = _as_batch(mlp, X)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[None, :]
    if Y.shape != (X.shape[0], mlp.n_out):
        raise ShapeError(f"targets have shape {Y.shape}, expected ({X.shape[0]}, {mlp.n_out})")
    n = X.shape[0]

    activations = [X]
    a = X
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = a @ w.T + b
        a = z if i == last else np.tanh(z)
        activations.append(a)

    y_hat = activations[-1]
    diff = y_hat - Y
    mse = float(np.mean(diff * diff))

    # dL/d(z_last); hidden deltas pick up the tanh' = 1 - a^2 factor.
    delta = 2.0 * diff / (n * mlp.n_out)
    grads: list[np.ndarray] = [None] * (2 * len(mlp.weights))
    for i in range(last, -1, -1):
        a_prev = activations[i]
        grads[2 * i] = delta.T @ a_prev
        grads[2 * i + 1] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ mlp.weights[i]) * (1.0 - activations[i] ** 2)
    return mse, grads
