"""Layer-level operations over the active kernel backend.

Convolution and pooling accept a single sample (channels, length) or a
batch (batch, channels, length); kernels always see the batched form.
Activations and losses are cheap elementwise/row ops and stay in NumPy
regardless of backend.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from . import backend


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    if x.ndim == 2:
        return x[None, :, :], True
    if x.ndim == 3:
        return x, False
    raise ShapeMismatchError(f"expected a 2-D or 3-D array, got shape {x.shape}")


def conv_forward(x: np.ndarray, kernels: np.ndarray, biases: np.ndarray) -> np.ndarray:
    """Valid stride-1 correlation: (…, C, L) -> (…, O, L-K+1)."""
    xb, squeeze = _as_batch(np.ascontiguousarray(x))
    w = np.ascontiguousarray(kernels)
    if w.ndim != 3 or biases.shape != (w.shape[0],):
        raise ShapeMismatchError(
            f"kernels must be (out, in, width) with matching biases, got {w.shape}"
        )
    if xb.shape[1] != w.shape[1]:
        raise ShapeMismatchError(f"input has {xb.shape[1]} channels, kernels take {w.shape[1]}")
    if xb.shape[2] < w.shape[2]:
        raise ShapeMismatchError(f"length {xb.shape[2]} shorter than kernel width {w.shape[2]}")
    out = backend.KERNELS.conv1d_forward(xb, w, np.ascontiguousarray(biases))
    return out[0] if squeeze else out


def conv_backward(
    x: np.ndarray, kernels: np.ndarray, dout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xb, squeeze = _as_batch(np.ascontiguousarray(x))
    doutb, _ = _as_batch(np.ascontiguousarray(dout))
    dx, dw, db = backend.KERNELS.conv1d_backward(xb, np.ascontiguousarray(kernels), doutb)
    return (dx[0] if squeeze else dx), dw, db


def maxpool_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Window-2/stride-2 max over the last axis; odd tail dropped.
    Returns (pooled, argmax) -- the argmax feeds the backward pass."""
    xb, squeeze = _as_batch(np.ascontiguousarray(x))
    if xb.shape[2] < 2:
        raise ShapeMismatchError(f"cannot pool length {xb.shape[2]} (< 2)")
    out, arg = backend.KERNELS.maxpool2_forward(xb)
    if squeeze:
        return out[0], arg[0]
    return out, arg


def maxpool_backward(dout: np.ndarray, arg: np.ndarray, length: int) -> np.ndarray:
    doutb, squeeze = _as_batch(np.ascontiguousarray(dout))
    argb, _ = _as_batch(np.ascontiguousarray(arg))
    dx = backend.KERNELS.maxpool2_backward(doutb, argb, length)
    return dx[0] if squeeze else dx


def dense_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray) -> np.ndarray:
    if x.ndim != 2 or weights.ndim != 2 or x.shape[1] != weights.shape[1]:
        raise ShapeMismatchError(
            f"dense expects x (B, F) and weights (U, F); got {x.shape} and {weights.shape}"
        )
    return backend.KERNELS.dense_forward(
        np.ascontiguousarray(x), np.ascontiguousarray(weights), np.ascontiguousarray(biases)
    )


def dense_backward(
    x: np.ndarray, weights: np.ndarray, dout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return backend.KERNELS.dense_backward(
        np.ascontiguousarray(x), np.ascontiguousarray(weights), np.ascontiguousarray(dout)
    )


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(dout: np.ndarray, pre_activation: np.ndarray) -> np.ndarray:
    return dout * (pre_activation > 0)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax over the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean negative log-likelihood of the target classes."""
    rows = np.arange(probs.shape[0])
    picked = np.clip(probs[rows, targets], 1e-12, None)
    return float(-np.log(picked).mean())


def softmax_xent_backward(probs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """d loss / d logits for softmax + mean cross-entropy."""
    grad = probs.copy()
    rows = np.arange(probs.shape[0])
    grad[rows, targets] -= 1
    return grad / probs.shape[0]
