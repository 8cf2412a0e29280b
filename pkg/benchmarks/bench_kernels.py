#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times each hot kernel at the default model's real shapes (conv1, conv2,
dense1, pooling; forward and backward) plus one full training step, for
batch sizes 1 and 32, and prints the per-call medians and the speedup.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--batch B ...]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cvscan.nn import backend
from cvscan.nn.model import ModelConfig, init_model
from cvscan.nn.train import TrainConfig, train
from cvscan.dataset import generate_synthetic_corpus


def _median_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return sorted(times)[len(times) // 2]


def _kernel_cases(batch: int):
    """(name, args-builder) pairs at the default architecture's shapes."""
    cfg = ModelConfig()
    rng = np.random.default_rng(0)
    f32 = np.float32

    x1 = rng.standard_normal((batch, cfg.input_width, cfg.input_len)).astype(f32)
    w1 = rng.standard_normal((cfg.conv1_filters, cfg.input_width, cfg.conv1_width)).astype(f32)
    b1 = np.zeros(cfg.conv1_filters, f32)
    d1 = rng.standard_normal((batch, cfg.conv1_filters, cfg.conv1_out)).astype(f32)

    x2 = rng.standard_normal((batch, cfg.conv1_filters, cfg.pool1_out)).astype(f32)
    w2 = rng.standard_normal((cfg.conv2_filters, cfg.conv1_filters, cfg.conv2_width)).astype(f32)
    b2 = np.zeros(cfg.conv2_filters, f32)
    d2 = rng.standard_normal((batch, cfg.conv2_filters, cfg.conv2_out)).astype(f32)

    xp = rng.standard_normal((batch, cfg.conv2_filters, cfg.conv2_out)).astype(f32)

    xd = rng.standard_normal((batch, cfg.flat_features)).astype(f32)
    wd = rng.standard_normal((cfg.dense1_units, cfg.flat_features)).astype(f32)
    bd = np.zeros(cfg.dense1_units, f32)
    dd = rng.standard_normal((batch, cfg.dense1_units)).astype(f32)

    return [
        ("conv1 forward", lambda k: k.conv1d_forward(x1, w1, b1)),
        ("conv1 backward", lambda k: k.conv1d_backward(x1, w1, d1)),
        ("conv2 forward", lambda k: k.conv1d_forward(x2, w2, b2)),
        ("conv2 backward", lambda k: k.conv1d_backward(x2, w2, d2)),
        ("maxpool forward", lambda k: k.maxpool2_forward(xp)),
        ("dense1 forward", lambda k: k.dense_forward(xd, wd, bd)),
        ("dense1 backward", lambda k: k.dense_backward(xd, wd, dd)),
    ]


def bench_kernels(batch: int, repeat: int) -> None:
    print(f"\n== kernel timings, batch {batch} (median of {repeat}, ms) ==")
    print(f"{'kernel':<18} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    cases = _kernel_cases(batch)
    for name, call in cases:
        row = {}
        for backend_name in ("numpy", "cython"):
            try:
                mod = backend.select_backend(backend_name)
            except ImportError:
                row[backend_name] = None
                continue
            call(mod)  # warm up
            row[backend_name] = _median_time(lambda: call(mod), repeat) * 1e3
        numpy_ms = row["numpy"]
        cython_ms = row["cython"]
        if cython_ms is None:
            print(f"{name:<18} {numpy_ms:>10.3f} {'n/a':>10} {'n/a':>8}")
        else:
            print(f"{name:<18} {numpy_ms:>10.3f} {cython_ms:>10.3f} "
                  f"{numpy_ms / cython_ms:>7.2f}x")


def bench_train_step(repeat: int) -> None:
    """One epoch over a small corpus = a stream of full train steps."""
    corpus = generate_synthetic_corpus(n_per_class=13, seed=3)  # 65 samples, 3 batches
    print(f"\n== full training epoch, {len(corpus)} samples, batch 32 (median of {repeat}, ms) ==")
    results = {}
    for backend_name in ("numpy", "cython"):
        try:
            backend.use_backend(backend_name)
        except ImportError:
            results[backend_name] = None
            continue
        model = init_model(seed=0, table_fingerprint=corpus.table_fingerprint)
        tc = TrainConfig(epochs=1, seed=0)
        train(model, corpus, tc)  # warm up
        results[backend_name] = _median_time(lambda: train(model, corpus, tc), repeat) * 1e3
    backend.use_backend("auto")
    numpy_ms = results["numpy"]
    cython_ms = results["cython"]
    if cython_ms is None:
        print(f"{'epoch':<18} {numpy_ms:>10.1f} {'n/a':>10}")
    else:
        print(f"{'epoch':<18} {numpy_ms:>10.1f} {cython_ms:>10.1f} "
              f"{numpy_ms / cython_ms:>7.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--batch", type=int, nargs="*", default=[1, 32])
    args = parser.parse_args()
    print(f"active backend at import: {backend.BACKEND_NAME}")
    for batch in args.batch:
        bench_kernels(batch, args.repeat)
    bench_train_step(max(3, args.repeat // 2))


if __name__ == "__main__":
    main()
