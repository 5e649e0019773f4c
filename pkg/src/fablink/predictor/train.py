"""Seeded, deterministic MLP training on TrainingPair datasets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from fablink.errors import FablinkError, ValidationError
from fablink.geometry.features import FEATURE_FIELDS, FEATURE_SCHEMA
from fablink.predictor.mlp import Mlp, forward_batch, init_mlp, loss_and_grad

TARGET_FIELDS = ("energy_wh", "production_time_s")


class DatasetTooSmall(FablinkError):
    pass


class NonFiniteLoss(FablinkError):
    pass


@dataclass(frozen=True, slots=True)
class TrainConfig:
    epochs: int = 500
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    validation_fraction: float = 0.2
    hidden_dims: tuple[int, ...] = (32, 16)

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValidationError("validation_fraction must lie in (0, 1)")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if not self.hidden_dims or any(d < 1 for d in self.hidden_dims):
            raise ValidationError("hidden_dims must be positive")


@dataclass(frozen=True, slots=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std < 1e-12, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std

    def inverse(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) * self.std + self.mean

    def to_json_obj(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Standardizer":
        return cls(
            mean=np.asarray(obj["mean"], dtype=np.float64),
            std=np.asarray(obj["std"], dtype=np.float64),
        )


ARTIFACT_SCHEMA_VERSION = "m1"


@dataclass(slots=True)
class ModelArtifact:
    """A trained network with its standardizers and run metadata."""

    feature_schema: str
    x_standardizer: Standardizer
    y_standardizer: Standardizer
    mlp: Mlp
    metadata: dict = field(default_factory=dict)
    schema_version: str = ARTIFACT_SCHEMA_VERSION


def _dataset_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    X = np.empty((len(pairs), len(FEATURE_FIELDS)))
    Y = np.empty((len(pairs), len(TARGET_FIELDS)))
    for i, pair in enumerate(pairs):
        X[i] = pair.features.to_list()
        Y[i] = pair.targets
    return X, Y


def _r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> list[float]:
    out = []
    for j in range(y_true.shape[1]):
        resid = float(np.sum((y_true[:, j] - y_pred[:, j]) ** 2))
        total = float(np.sum((y_true[:, j] - y_true[:, j].mean()) ** 2))
        if total < 1e-12:
            out.append(1.0 if resid < 1e-9 else 0.0)
        else:
            out.append(1.0 - resid / total)
    return out


def train(pairs, cfg: TrainConfig = TrainConfig()) -> ModelArtifact:
    """Adam minibatch training; deterministic for a given (pairs, cfg).

    The RNG drives, in order: the train/validation split, weight
    initialization, then one shuffle per epoch.
    """
    n = len(pairs)
    if n < 10:
        raise DatasetTooSmall(f"need at least 10 training pairs, got {n}")
    X, Y = _dataset_arrays(pairs)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValidationError("dataset contains non-finite values")

    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(n)
    n_val = min(n - 1, max(1, int(round(n * cfg.validation_fraction))))
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    x_std = Standardizer.fit(X[train_idx])
    y_std = Standardizer.fit(Y[train_idx])
    Xt, Yt = x_std.transform(X[train_idx]), y_std.transform(Y[train_idx])
    Xv, Yv = x_std.transform(X[val_idx]), y_std.transform(Y[val_idx])

    dims = (X.shape[1], *cfg.hidden_dims, Y.shape[1])
    mlp = init_mlp(dims, rng)

    params = mlp.parameters()
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    t = 0

    initial_mse, _ = loss_and_grad(mlp, Xt, Yt)
    for _epoch in range(cfg.epochs):
        order = rng.permutation(len(train_idx))
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            loss, grads = loss_and_grad(mlp, Xt[batch], Yt[batch])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"training diverged at step {t}")
            t += 1
            for i, (p, g) in enumerate(zip(params, grads)):
                m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * g
                v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * g * g
                m_hat = m[i] / (1 - cfg.beta1**t)
                v_hat = v[i] / (1 - cfg.beta2**t)
                p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)

    final_train_mse, _ = loss_and_grad(mlp, Xt, Yt)
    final_val_mse, _ = loss_and_grad(mlp, Xv, Yv)
    if not (np.isfinite(final_train_mse) and np.isfinite(final_val_mse)):
        raise NonFiniteLoss("training produced non-finite loss")

    val_pred = y_std.inverse(forward_batch(mlp, Xv))
    r2 = _r_squared(Y[val_idx], val_pred)

    metadata = {
        "seed": cfg.seed,
        "epochs": cfg.epochs,
        "dataset_size": n,
        "train_size": int(len(train_idx)),
        "validation_size": int(len(val_idx)),
        "initial_train_mse": initial_mse,
        "final_train_mse": final_train_mse,
        "final_val_mse": final_val_mse,
        "r2": dict(zip(TARGET_FIELDS, r2)),
        "created_ts_ms": int(time.time() * 1000),
    }
    return ModelArtifact(
        feature_schema=FEATURE_SCHEMA,
        x_standardizer=x_std,
        y_standardizer=y_std,
        mlp=mlp,
        metadata=metadata,
    )
