"""Mini-batch Adam training and batched inference."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..autograd import Adam, Tensor, backward, cross_entropy
from ..data import MTSDataset
from ..errors import ConfigError, DimensionError, NumericError
from .graph import ModelGraph

PREDICT_CHUNK = 256


@dataclass
class TrainReport:
    """Per-epoch history of a training run.

    ``loss`` is the cross-entropy of the whole training set evaluated after each
    epoch with batch statistics (and without touching the running statistics),
    so it depends only on the parameters. Wall time is excluded from equality.
    """

    loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False
    checksum: str = ""
    wall_time: float = field(default=0.0, compare=False)

    @property
    def epochs_run(self) -> int:
        return len(self.loss)

    def to_dict(self) -> dict:
        return {
            "loss": list(self.loss),
            "train_accuracy": list(self.train_accuracy),
            "val_accuracy": list(self.val_accuracy),
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
            "checksum": self.checksum,
            "wall_time": self.wall_time,
        }


def _check_dims(model: ModelGraph, dataset: MTSDataset) -> None:
    cfg = model.config
    if (dataset.n_features, dataset.seq_length) != (cfg.n_features, cfg.seq_length):
        raise DimensionError(
            f"dataset is D={dataset.n_features}, T={dataset.seq_length}; "
            f"model expects D={cfg.n_features}, T={cfg.seq_length}"
        )
    if dataset.n_classes > cfg.n_classes:
        raise DimensionError(f"dataset has {dataset.n_classes} classes, model only {cfg.n_classes}")


def _full_batch_loss(model: ModelGraph, dataset: MTSDataset) -> tuple[float, float]:
    reg = model.forward(dataset.X, training=True, update_stats=False)
    loss = cross_entropy(reg["logits"], dataset.y).item()
    acc = float(np.mean(reg["logits"].data.argmax(axis=1) == dataset.y))
    return loss, acc


def train(
    model: ModelGraph,
    dataset: MTSDataset,
    epochs: int = 50,
    batch_size: int = 32,
    lr: float = 1e-3,
    seed: int = 0,
    validation: MTSDataset | None = None,
    patience: int = 10,
    restore_best: bool = True,
) -> TrainReport:
    """Fit ``model`` in place with Adam on shuffled mini-batches.

    Early stopping watches validation accuracy when ``validation`` is given and
    the training loss otherwise; after ``patience`` epochs without improvement
    training stops and (if ``restore_best``) the best parameters are restored.
    """
    if epochs < 1 or batch_size < 1:
        raise ConfigError("epochs and batch_size must be positive")
    if lr < 0:
        raise ConfigError("learning rate must be non-negative")
    _check_dims(model, dataset)
    if validation is not None:
        _check_dims(model, validation)
    if len(dataset) == 0:
        raise DimensionError("cannot train on an empty dataset")

    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    opt = Adam(model.parameters(), lr=lr)
    report = TrainReport()
    best_score = -np.inf
    best_state = None
    stale = 0
    n = len(dataset)

    for epoch in range(epochs):
        order = rng.permutation(n)
        for lo in range(0, n, batch_size):
            idx = order[lo : lo + batch_size]
            if len(idx) < 2 and n >= 2:
                # a lone instance gives degenerate batch statistics; fold it back in
                idx = order[max(0, lo - 1) : lo + batch_size]
            opt.zero_grad()
            reg = model.forward(dataset.X[idx], training=True)
            loss = cross_entropy(reg["logits"], dataset.y[idx])
            if not np.isfinite(loss.data).all():
                raise NumericError(f"training diverged in epoch {epoch}: non-finite mini-batch loss")
            backward(loss)
            opt.step()

        loss_value, train_acc = _full_batch_loss(model, dataset)
        if not np.isfinite(loss_value):
            raise NumericError(f"training diverged in epoch {epoch}: loss is {loss_value}")
        report.loss.append(loss_value)
        report.train_accuracy.append(train_acc)
        if validation is not None and len(validation):
            val_acc = float(np.mean(predict(model, validation.X) == validation.y))
            report.val_accuracy.append(val_acc)
            score = val_acc
        else:
            score = -loss_value

        if score > best_score:
            best_score, stale = score, 0
            report.best_epoch = epoch
            best_state = {k: v.copy() for k, v in model.state_arrays().items()}
        else:
            stale += 1
            if stale >= patience:
                report.stopped_early = True
                break

    if restore_best and best_state is not None:
        model.load_state_arrays(best_state)
    model.zero_grad()
    report.checksum = model.checksum()
    report.wall_time = time.perf_counter() - start
    return report


def predict_proba(model: ModelGraph, instances) -> np.ndarray:
    """Class probabilities for one ``(D, T)`` instance or a ``(B, D, T)`` batch.

    Large batches are processed in chunks; the thread-local activation registry
    holds the last chunk.
    """
    X = instances.data if isinstance(instances, Tensor) else np.asarray(instances, dtype=np.float64)
    single = X.ndim == 2
    if single:
        X = X[None]
    chunks = [
        model.forward(X[lo : lo + PREDICT_CHUNK])["probs"].data for lo in range(0, len(X), PREDICT_CHUNK)
    ]
    probs = np.concatenate(chunks) if chunks else np.zeros((0, model.config.n_classes))
    return probs[0] if single else probs


def predict(model: ModelGraph, instances) -> np.ndarray:
    return np.argmax(predict_proba(model, instances), axis=-1)
