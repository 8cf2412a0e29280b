"""Seeded minibatch training with adaptive-moment updates.

The contract is bit-reproducibility on one platform: the same corpus,
config, and seed produce byte-identical final weights.  Everything that
consumes randomness draws from one generator in a fixed order, and the
gradient reduction order is fixed by the batch layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dataset import Corpus
from ..errors import EmptyCorpusError, TableMismatchError
from .model import Model, ModelConfig, backward_cached, forward_cached

_BITS_RANGE = np.arange(8, dtype=np.int64)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    seed: int
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.beta1 < 1.0:
            raise ValueError("beta1 must be in [0, 1)")
        if not 0.0 <= self.beta2 < 1.0:
            raise ValueError("beta2 must be in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    loss: float
    accuracy: float


def corpus_tensors(corpus: Corpus, config: Optional[ModelConfig] = None) -> tuple[np.ndarray, np.ndarray]:
    """Encode a corpus as network inputs: X (N, width, len) float32 of
    LSB-first token bits, y (N,) int64 class indices."""
    if config is None:
        config = ModelConfig()
    n = len(corpus.samples)
    x = np.zeros((n, config.input_width, config.input_len), dtype=np.float32)
    y = np.empty(n, dtype=np.int64)
    for i, sample in enumerate(corpus.samples):
        ids = np.asarray(sample.tokens[: config.input_len], dtype=np.int64)
        if ids.size:
            bits = (ids[:, None] >> _BITS_RANGE[: config.input_width]) & 1
            x[i, :, : ids.size] = bits.T
        y[i] = sample.label.class_index
    return x, y


def train(
    model: Model,
    corpus: Corpus,
    tc: TrainConfig,
) -> tuple[Model, list[EpochMetrics]]:
    """Train a copy of `model`; the input model is left untouched.

    Per-epoch metrics are measured on the shuffled training stream as it
    is consumed (loss and accuracy averaged over all samples).
    """
    if not corpus.samples:
        raise EmptyCorpusError("cannot train on an empty corpus")
    # An unbound model (empty fingerprint) adopts the corpus's table; a
    # bound one must match it exactly.
    if model.table_fingerprint and corpus.table_fingerprint != model.table_fingerprint:
        raise TableMismatchError(
            "corpus and model were built against different token tables"
        )
    x_all, y_all = corpus_tensors(corpus, model.config)
    weights = model.copy_weights()
    moment1 = {k: np.zeros_like(v) for k, v in weights.items()}
    moment2 = {k: np.zeros_like(v) for k, v in weights.items()}
    rng = np.random.default_rng(tc.seed)
    lr = np.float32(tc.learning_rate)
    beta1 = np.float32(tc.beta1)
    beta2 = np.float32(tc.beta2)
    eps = np.float32(tc.eps)
    one = np.float32(1.0)
    step = 0
    history: list[EpochMetrics] = []
    n = len(corpus.samples)
    for epoch in range(tc.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, tc.batch_size):
            idx = order[start : start + tc.batch_size]
            xb = np.ascontiguousarray(x_all[idx])
            yb = y_all[idx]
            probs, cache = forward_cached(weights, xb)
            grads, loss = backward_cached(weights, cache, yb)
            loss_sum += loss * len(idx)
            correct += int((probs.argmax(axis=1) == yb).sum())
            step += 1
            bias1 = one - beta1 ** np.float32(step)
            bias2 = one - beta2 ** np.float32(step)
            for name, g in grads.items():
                m = moment1[name]
                v = moment2[name]
                m *= beta1
                m += (one - beta1) * g
                v *= beta2
                v += (one - beta2) * np.square(g)
                weights[name] -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
        history.append(
            EpochMetrics(epoch=epoch + 1, loss=loss_sum / n, accuracy=correct / n)
        )
    trained = Model(
        config=model.config,
        weights=weights,
        table_fingerprint=model.table_fingerprint or corpus.table_fingerprint,
    )
    return trained, history
