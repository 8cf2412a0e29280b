"""Pure-NumPy kernel implementations (the fallback backend).

Shapes follow the batched convention used throughout the network:
  x    (B, C, L)   batch, channels, token axis
  w    (O, C, K)   output channels, input channels, kernel width
  out  (B, O, L-K+1)
All convolutions are valid (no padding), stride 1; pooling is window 2,
stride 2.  Dtypes are preserved (float32 in training, float64 in
gradient-check tests).
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import as_strided


def _im2col(x: np.ndarray, kernel_width: int) -> np.ndarray:
    """(B, C, L) -> (B, L_out, C, K) sliding windows (a zero-copy view)."""
    batch, channels, length = x.shape
    l_out = length - kernel_width + 1
    s0, s1, s2 = x.strides
    return as_strided(
        x,
        shape=(batch, l_out, channels, kernel_width),
        strides=(s0, s2, s1, s2),
        writeable=False,
    )


def conv1d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    batch, channels, length = x.shape
    n_out, _, kernel_width = w.shape
    l_out = length - kernel_width + 1
    cols = _im2col(x, kernel_width).reshape(batch, l_out, channels * kernel_width)
    w2 = w.reshape(n_out, channels * kernel_width)
    out = cols @ w2.T  # (B, L_out, O)
    out += b
    return np.ascontiguousarray(out.transpose(0, 2, 1))


def conv1d_backward(
    x: np.ndarray, w: np.ndarray, dout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    batch, channels, length = x.shape
    n_out, _, kernel_width = w.shape
    l_out = length - kernel_width + 1
    cols = _im2col(x, kernel_width).reshape(batch, l_out, channels * kernel_width)
    dout_t = dout.transpose(0, 2, 1)  # (B, L_out, O)
    db = dout.sum(axis=(0, 2))
    dw = np.tensordot(dout_t, cols, axes=([0, 1], [0, 1])).reshape(w.shape)
    dcols = (dout_t @ w.reshape(n_out, -1)).reshape(batch, l_out, channels, kernel_width)
    dx = np.zeros_like(x)
    for k in range(kernel_width):
        dx[:, :, k : k + l_out] += dcols[:, :, :, k].transpose(0, 2, 1)
    return dx, dw, db


def maxpool2_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Window-2/stride-2 max over the last axis; ties pick the first
    element.  Returns (pooled, argmax in {0,1} as uint8)."""
    length = x.shape[2]
    l_out = length // 2
    pairs = x[:, :, : 2 * l_out].reshape(x.shape[0], x.shape[1], l_out, 2)
    arg = (pairs[..., 1] > pairs[..., 0]).astype(np.uint8)
    out = np.where(arg, pairs[..., 1], pairs[..., 0])
    return out, arg


def maxpool2_backward(dout: np.ndarray, arg: np.ndarray, length: int) -> np.ndarray:
    batch, channels, l_out = dout.shape
    dx = np.zeros((batch, channels, length), dtype=dout.dtype)
    sel = arg.astype(bool)
    zero = dout.dtype.type(0)
    dx[:, :, 0 : 2 * l_out : 2] = np.where(sel, zero, dout)
    dx[:, :, 1 : 2 * l_out : 2] = np.where(sel, dout, zero)
    return dx


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x (B, F) @ w (U, F)^T + b -> (B, U)."""
    return x @ w.T + b


def dense_backward(
    x: np.ndarray, w: np.ndarray, dout: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dx = dout @ w
    dw = dout.T @ x
    db = dout.sum(axis=0)
    return dx, dw, db
