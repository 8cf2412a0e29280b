"""Shared fixtures.

The acceptance pipeline (synthesize, dedup, balance, split, train twice)
is expensive, so it runs once per session and every test that needs a
trained model shares the result.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from cvscan.dataset import Corpus, balance, deduplicate, generate_synthetic_corpus, split
from cvscan.lexer import TokenTable, default_token_table
from cvscan.nn import EpochMetrics, Model, ModelConfig, TrainConfig, init_model, train

FIXTURES = Path(__file__).parent / "fixtures"

# The frozen acceptance seeds: synthesis 1234, balance 99, split 7,
# init/train 42.  30 epochs per the end-to-end criterion.
SYNTH_SEED = 1234
BALANCE_SEED = 99
SPLIT_SEED = 7
TRAIN_SEED = 42
N_PER_CLASS = 400
EPOCHS = 30


@pytest.fixture(scope="session")
def table() -> TokenTable:
    return default_token_table()


@dataclass(frozen=True)
class AcceptanceRun:
    """Everything the end-to-end acceptance criteria assert over."""

    raw: Corpus
    deduped: Corpus
    train_corpus: Corpus
    test_corpus: Corpus
    model: Model
    history: list[EpochMetrics]
    rerun_model: Model  # independent second run with identical seeds
    elapsed_seconds: float  # wall time covering both full runs


def _run_pipeline() -> tuple[Corpus, Corpus, Corpus, Corpus, Model, list[EpochMetrics]]:
    raw = generate_synthetic_corpus(N_PER_CLASS, SYNTH_SEED)
    deduped = deduplicate(raw)
    balanced = balance(deduped, seed=BALANCE_SEED)
    train_corpus, test_corpus = split(balanced, 0.8, seed=SPLIT_SEED)
    model = init_model(
        ModelConfig(), seed=TRAIN_SEED, table_fingerprint=raw.table_fingerprint
    )
    trained, history = train(
        model, train_corpus, TrainConfig(epochs=EPOCHS, seed=TRAIN_SEED)
    )
    return raw, deduped, train_corpus, test_corpus, trained, history


@pytest.fixture(scope="session")
def acceptance_run() -> AcceptanceRun:
    start = time.monotonic()
    raw, deduped, train_corpus, test_corpus, model, history = _run_pipeline()
    *_, rerun_model, _ = _run_pipeline()
    elapsed = time.monotonic() - start
    return AcceptanceRun(
        raw=raw,
        deduped=deduped,
        train_corpus=train_corpus,
        test_corpus=test_corpus,
        model=model,
        history=history,
        rerun_model=rerun_model,
        elapsed_seconds=elapsed,
    )


@pytest.fixture(scope="session")
def acceptance_model_path(acceptance_run, tmp_path_factory) -> Path:
    from cvscan.nn import save_model

    path = tmp_path_factory.mktemp("model") / "acceptance.cvsc"
    save_model(acceptance_run.model, path)
    return path
