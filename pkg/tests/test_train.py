"""Optimizer behavior: determinism, convergence, input validation."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from cvscan.dataset import generate_synthetic_corpus
from cvscan.errors import EmptyCorpusError, TableMismatchError
from cvscan.nn.model import WEIGHT_ORDER, ModelConfig, forward, init_model
from cvscan.nn.train import EpochMetrics, TrainConfig, corpus_tensors, train


@pytest.fixture(scope="module")
def tiny_corpus(table):
    return generate_synthetic_corpus(6, seed=31, table=table)


def _model_for(corpus, seed=7):
    return init_model(seed=seed, table_fingerprint=corpus.table_fingerprint)


class TestCorpusTensors:
    def test_shapes_and_dtypes(self, tiny_corpus):
        x, y = corpus_tensors(tiny_corpus)
        assert x.shape == (30, 8, 500)
        assert x.dtype == np.float32
        assert y.dtype == np.int64
        assert set(np.unique(y)) == {0, 1, 2, 3, 4}

    def test_bits_match_tokens(self, tiny_corpus, table):
        x, _ = corpus_tensors(tiny_corpus)
        sample = tiny_corpus.samples[0]
        for pos, token_id in enumerate(sample.tokens[:500]):
            got = int(sum(int(b) << k for k, b in enumerate(x[0, :, pos])))
            assert got == token_id

    def test_padding_is_zero(self, tiny_corpus):
        x, _ = corpus_tensors(tiny_corpus)
        length = len(tiny_corpus.samples[0].tokens)
        assert not x[0, :, length:].any()


class TestTrain:
    def test_zero_epochs_returns_equal_weights(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        trained, history = train(model, tiny_corpus, TrainConfig(epochs=0, seed=1))
        assert history == []
        assert trained is not model
        for name in WEIGHT_ORDER:
            assert trained.weights[name].tobytes() == model.weights[name].tobytes()

    def test_input_model_untouched(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        before = {n: model.weights[n].copy() for n in WEIGHT_ORDER}
        train(model, tiny_corpus, TrainConfig(epochs=1, seed=1))
        for name in WEIGHT_ORDER:
            np.testing.assert_array_equal(model.weights[name], before[name])

    def test_same_seed_bitwise_identical(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        tc = TrainConfig(epochs=2, seed=5)
        a, hist_a = train(model, tiny_corpus, tc)
        b, hist_b = train(model, tiny_corpus, tc)
        for name in WEIGHT_ORDER:
            assert a.weights[name].tobytes() == b.weights[name].tobytes()
        assert hist_a == hist_b

    def test_shuffle_seed_changes_result(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        a, _ = train(model, tiny_corpus, TrainConfig(epochs=1, seed=5))
        b, _ = train(model, tiny_corpus, TrainConfig(epochs=1, seed=6))
        assert any(
            a.weights[n].tobytes() != b.weights[n].tobytes() for n in WEIGHT_ORDER
        )

    def test_loss_decreases(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        _, history = train(model, tiny_corpus, TrainConfig(epochs=8, seed=3))
        assert len(history) == 8
        assert all(isinstance(m, EpochMetrics) for m in history)
        assert history[-1].loss < history[0].loss
        assert history[-1].accuracy >= history[0].accuracy

    def test_training_improves_fit(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        trained, _ = train(model, tiny_corpus, TrainConfig(epochs=8, seed=3))
        x, y = corpus_tensors(tiny_corpus)
        before = float((forward(model, x).argmax(axis=1) == y).mean())
        after = float((forward(trained, x).argmax(axis=1) == y).mean())
        assert after > before

    def test_weights_stay_float32_and_finite(self, tiny_corpus):
        model = _model_for(tiny_corpus)
        trained, _ = train(model, tiny_corpus, TrainConfig(epochs=2, seed=1))
        for arr in trained.weights.values():
            assert arr.dtype == np.float32
            assert np.isfinite(arr).all()

    def test_empty_corpus_rejected(self, tiny_corpus):
        empty = dataclasses.replace(tiny_corpus, samples=())
        model = _model_for(tiny_corpus)
        with pytest.raises(EmptyCorpusError):
            train(model, empty, TrainConfig(epochs=1, seed=1))

    def test_fingerprint_mismatch_rejected(self, tiny_corpus):
        model = init_model(seed=7, table_fingerprint="ab" * 32)
        with pytest.raises(TableMismatchError):
            train(model, tiny_corpus, TrainConfig(epochs=1, seed=1))

    def test_unbound_model_adopts_corpus_table(self, tiny_corpus):
        model = init_model(seed=7)  # empty fingerprint: no binding yet
        trained, _ = train(model, tiny_corpus, TrainConfig(epochs=1, seed=1))
        assert trained.table_fingerprint == tiny_corpus.table_fingerprint


class TestTrainConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epochs": -1, "seed": 0},
            {"epochs": 1, "seed": 0, "batch_size": 0},
            {"epochs": 1, "seed": 0, "learning_rate": 0.0},
            {"epochs": 1, "seed": 0, "beta1": 1.0},
            {"epochs": 1, "seed": 0, "beta2": -0.1},
            {"epochs": 1, "seed": 0, "eps": 0.0},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)
