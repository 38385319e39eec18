"""Multinomial logistic regression head: loss, gradients, SGD training.

The model is linear (softmax over W x + b), trained with plain SGD so
every step is hand-verifiable and bit-deterministic for a fixed seed.
Dense-encoder embeddings plug into the same head in place of TF-IDF
vectors.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy import sparse

from .textprep import FeatureVector, stack_features

FeatureInput = Union[Sequence[FeatureVector], np.ndarray, sparse.spmatrix]


class DataError(ValueError):
    """Dataset cannot support training (empty, or fewer than 2 classes)."""


class ModelFormatError(ValueError):
    """Raised for unreadable or corrupt model files."""


@dataclass
class ModelParams:
    """Softmax classifier parameters: K x D weights, K biases."""

    W: np.ndarray
    b: np.ndarray
    class_names: tuple[str, ...]
    feature_space: str

    def __post_init__(self) -> None:
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        k = len(self.class_names)
        if self.W.ndim != 2 or self.W.shape[0] != k or self.b.shape != (k,):
            raise ValueError(
                f"shape mismatch: W {self.W.shape}, b {self.b.shape}, {k} classes"
            )
        if not (np.isfinite(self.W).all() and np.isfinite(self.b).all()):
            raise ValueError("model parameters must be finite")

    @property
    def n_classes(self) -> int:
        return self.W.shape[0]

    @property
    def n_features(self) -> int:
        return self.W.shape[1]

    def copy(self) -> "ModelParams":
        return ModelParams(self.W.copy(), self.b.copy(), self.class_names,
                           self.feature_space)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 10
    learning_rate: float = 0.001
    seed: int = 0
    val_fraction: float = 0.2
    patience: int = 10
    l2: float = 0.0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 < self.val_fraction < 1:
            raise ValueError("val_fraction must be in (0, 1)")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")


@dataclass
class TrainingHistory:
    """Per-epoch losses. train_loss includes the ridge penalty (the SGD
    objective); val_loss is plain cross-entropy. best_epoch indexes the
    loss lists (0-based)."""

    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False


@dataclass(frozen=True)
class Prediction:
    class_id: int
    probs: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    """Probabilities exp(z - max z) / sum; stable under large logits."""
    z = np.asarray(logits, dtype=np.float64)
    if not np.isfinite(z).all():
        raise ValueError("softmax input must be finite")
    shifted = z - z.max(axis=-1, keepdims=True)
    expz = np.exp(shifted)
    return expz / expz.sum(axis=-1, keepdims=True)


def _as_matrix(features: FeatureInput) -> Union[np.ndarray, sparse.csr_matrix]:
    if sparse.issparse(features):
        return features.tocsr()
    if isinstance(features, np.ndarray):
        return np.atleast_2d(np.asarray(features, dtype=np.float64))
    return stack_features(list(features))


def _log_probs(params: ModelParams, x_matrix) -> np.ndarray:
    logits = x_matrix @ params.W.T + params.b
    m = logits.max(axis=1, keepdims=True)
    lse = m + np.log(np.exp(logits - m).sum(axis=1, keepdims=True))
    return logits - lse


def loss_and_grad(
    params: ModelParams,
    features: FeatureInput,
    labels: Sequence[int],
    l2: float = 0.0,
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Mean cross-entropy plus (l2/2)||W||^2, with analytic gradients.

    Per-example logit gradient is p - one_hot(y); gradients are averaged
    over the batch. Returns (loss, (grad_W, grad_b)).
    """
    x = _as_matrix(features)
    y = np.asarray(labels, dtype=np.int64)
    n = x.shape[0]
    if n == 0 or y.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    if y.shape[0] != n:
        raise ValueError(f"{n} feature rows but {y.shape[0]} labels")
    if x.shape[1] != params.n_features:
        raise ValueError(
            f"feature dim {x.shape[1]} != model dim {params.n_features}"
        )
    if y.min() < 0 or y.max() >= params.n_classes:
        raise ValueError(f"label out of range [0, {params.n_classes})")

    log_p = _log_probs(params, x)
    loss = -log_p[np.arange(n), y].mean()
    if l2 > 0:
        loss += 0.5 * l2 * float((params.W ** 2).sum())

    g = np.exp(log_p)
    g[np.arange(n), y] -= 1.0
    g /= n
    if sparse.issparse(x):
        grad_w = np.asarray((x.T @ g).T)
    else:
        grad_w = g.T @ x
    if l2 > 0:
        grad_w = grad_w + l2 * params.W
    grad_b = g.sum(axis=0)
    return float(loss), (grad_w, grad_b)


def _mean_loss(params: ModelParams, x, y: np.ndarray, l2: float = 0.0) -> float:
    log_p = _log_probs(params, x)
    loss = -log_p[np.arange(x.shape[0]), y].mean()
    if l2 > 0:
        loss += 0.5 * l2 * float((params.W ** 2).sum())
    return float(loss)


def _stratified_split(
    y: np.ndarray, val_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffle and split; guarantees a nonempty validation set
    and at least one training example per class."""
    classes = np.unique(y)
    permuted: list[np.ndarray] = []
    n_val: list[int] = []
    for c in classes:
        idx = np.flatnonzero(y == c)
        permuted.append(idx[rng.permutation(len(idx))])
        n_val.append(int(len(idx) * val_fraction))
    if sum(n_val) == 0:
        largest = int(np.argmax([len(p) for p in permuted]))
        n_val[largest] = 1
    val = np.concatenate([p[:k] for p, k in zip(permuted, n_val)])
    train = np.concatenate([p[k:] for p, k in zip(permuted, n_val)])
    return train, val


def train(
    features: FeatureInput,
    labels: Sequence[int],
    class_names: Sequence[str],
    config: TrainConfig = TrainConfig(),
    feature_space: str = "",
) -> tuple[ModelParams, TrainingHistory]:
    """Train the softmax head with plain SGD and early stopping.

    Weights start at zero (the objective is convex, so initialization
    carries no randomness). Each epoch reshuffles the training split with
    the seeded generator and applies one SGD step per batch. Training
    stops after ``epochs`` or once validation loss has not improved for
    ``patience`` consecutive epochs; the best-validation-loss parameters
    are returned. Identical inputs, config and seed give bit-identical
    results.
    """
    x = _as_matrix(features)
    y = np.asarray(labels, dtype=np.int64)
    if x.shape[0] == 0:
        raise DataError("empty dataset")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"{x.shape[0]} feature rows but {y.shape[0]} labels")
    k = len(class_names)
    if y.min() < 0 or y.max() >= k:
        raise ValueError(f"label out of range [0, {k})")
    present = np.unique(y)
    if len(present) < 2:
        raise DataError(
            f"need at least 2 classes, found {len(present)}"
            f" ({[class_names[c] for c in present]})"
        )

    rng = np.random.default_rng(config.seed)
    train_idx, val_idx = _stratified_split(y, config.val_fraction, rng)
    x_train, y_train = x[train_idx], y[train_idx]
    x_val, y_val = x[val_idx], y[val_idx]

    params = ModelParams(
        W=np.zeros((k, x.shape[1])),
        b=np.zeros(k),
        class_names=tuple(class_names),
        feature_space=feature_space,
    )
    history = TrainingHistory()
    best = params.copy()
    best_val = np.inf
    bad_epochs = 0
    n_train = x_train.shape[0]

    for epoch in range(config.epochs):
        order = rng.permutation(n_train)
        for start in range(0, n_train, config.batch_size):
            batch = order[start:start + config.batch_size]
            _, (grad_w, grad_b) = loss_and_grad(
                params, x_train[batch], y_train[batch], l2=config.l2
            )
            params.W -= config.learning_rate * grad_w
            params.b -= config.learning_rate * grad_b

        history.train_loss.append(_mean_loss(params, x_train, y_train, config.l2))
        val_loss = _mean_loss(params, x_val, y_val)
        history.val_loss.append(val_loss)

        if val_loss < best_val:
            best_val = val_loss
            best = params.copy()
            history.best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                history.stopped_early = True
                break

    return best, history


def predict(params: ModelParams, x: Union[FeatureVector, np.ndarray]) -> Prediction:
    """Class probabilities for one example; argmax ties break to the lowest index."""
    dense = x.to_dense() if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    if dense.shape != (params.n_features,):
        raise ValueError(
            f"feature dim {dense.shape} != model dim ({params.n_features},)"
        )
    probs = softmax(params.W @ dense + params.b)
    return Prediction(class_id=int(np.argmax(probs)), probs=probs)


def predict_many(params: ModelParams, features: FeatureInput) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized prediction: (class_ids, probability matrix)."""
    x = _as_matrix(features)
    if x.shape[1] != params.n_features:
        raise ValueError(f"feature dim {x.shape[1]} != model dim {params.n_features}")
    probs = np.exp(_log_probs(params, x))
    return probs.argmax(axis=1), probs


# --- model persistence ------------------------------------------------------

_MODEL_MAGIC = b"FPMODEL1"
_MODEL_FORMAT_VERSION = 1


def save_model(params: ModelParams, path: str | Path) -> None:
    """Binary model file: JSON header, then b and W as little-endian float64.

    Round-trips bit-exactly.
    """
    header = json.dumps(
        {
            "format_version": _MODEL_FORMAT_VERSION,
            "k": params.n_classes,
            "d": params.n_features,
            "class_names": list(params.class_names),
            "feature_space": params.feature_space,
        },
        ensure_ascii=False,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(params.b.astype("<f8").tobytes())
        fh.write(np.ascontiguousarray(params.W, dtype="<f8").tobytes())


def load_model(path: str | Path) -> ModelParams:
    blob = Path(path).read_bytes()
    if blob[:8] != _MODEL_MAGIC:
        raise ModelFormatError(f"{path}: not a factpipe model file")
    (header_len,) = struct.unpack("<I", blob[8:12])
    try:
        header = json.loads(blob[12:12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: corrupt header: {exc}") from exc
    if header.get("format_version") != _MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format version {header.get('format_version')}"
        )
    k, d = header["k"], header["d"]
    offset = 12 + header_len
    expected = offset + 8 * k + 8 * k * d
    if len(blob) != expected:
        raise ModelFormatError(
            f"{path}: payload is {len(blob)} bytes, expected {expected}"
        )
    b = np.frombuffer(blob, dtype="<f8", count=k, offset=offset).copy()
    w = (
        np.frombuffer(blob, dtype="<f8", count=k * d, offset=offset + 8 * k)
        .reshape(k, d)
        .copy()
    )
    return ModelParams(
        W=w,
        b=b,
        class_names=tuple(header["class_names"]),
        feature_space=header["feature_space"],
    )
