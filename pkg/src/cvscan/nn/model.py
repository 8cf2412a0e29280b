"""The classifier: conv -> pool -> conv -> pool -> dense -> dense -> softmax.

A Model is a config plus a dict of float32 weight arrays plus the
fingerprint of the token table it was trained under.  The forward and
backward passes are pure functions over that dict, so the gradient tests
can run the identical code at float64.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..dataset import LABELS, Label
from ..encoding import BITS, INPUT_LENGTH, EncodedFunction
from ..errors import (
    CorruptFileError,
    ShapeMismatchError,
    TableMismatchError,
    VersionMismatchError,
)
from . import layers

MAGIC = b"CVSC"
FORMAT_VERSION = 1

WEIGHT_ORDER = (
    "conv1_w", "conv1_b",
    "conv2_w", "conv2_b",
    "dense1_w", "dense1_b",
    "dense2_w", "dense2_b",
)


@dataclass(frozen=True)
class ModelConfig:
    input_len: int = INPUT_LENGTH
    input_width: int = BITS
    conv1_filters: int = 64
    conv1_width: int = 5
    pool_window: int = 2
    pool_stride: int = 2
    conv2_filters: int = 128
    conv2_width: int = 5
    dense1_units: int = 64
    n_classes: int = len(LABELS)

    def __post_init__(self):
        if (self.pool_window, self.pool_stride) != (2, 2):
            raise ShapeMismatchError("only pool window 2 / stride 2 is supported")
        for name in (
            "input_len", "input_width", "conv1_filters", "conv1_width",
            "conv2_filters", "conv2_width", "dense1_units", "n_classes",
        ):
            if getattr(self, name) < 1:
                raise ShapeMismatchError(f"{name} must be positive")
        # Walking the chain validates it: every stage must stay >= 1.
        self.flat_features  # noqa: B018

    @property
    def conv1_out(self) -> int:
        n = self.input_len - self.conv1_width + 1
        if n < 1:
            raise ShapeMismatchError("input shorter than the first kernel")
        return n

    @property
    def pool1_out(self) -> int:
        n = self.conv1_out // 2
        if n < 1:
            raise ShapeMismatchError("nothing left to pool after conv1")
        return n

    @property
    def conv2_out(self) -> int:
        n = self.pool1_out - self.conv2_width + 1
        if n < 1:
            raise ShapeMismatchError("pooled length shorter than the second kernel")
        return n

    @property
    def pool2_out(self) -> int:
        n = self.conv2_out // 2
        if n < 1:
            raise ShapeMismatchError("nothing left to pool after conv2")
        return n

    @property
    def flat_features(self) -> int:
        return self.pool2_out * self.conv2_filters

    def weight_shapes(self) -> dict[str, tuple[int, ...]]:
        return {
            "conv1_w": (self.conv1_filters, self.input_width, self.conv1_width),
            "conv1_b": (self.conv1_filters,),
            "conv2_w": (self.conv2_filters, self.conv1_filters, self.conv2_width),
            "conv2_b": (self.conv2_filters,),
            "dense1_w": (self.dense1_units, self.flat_features),
            "dense1_b": (self.dense1_units,),
            "dense2_w": (self.n_classes, self.dense1_units),
            "dense2_b": (self.n_classes,),
        }


@dataclass(frozen=True, eq=False)
class Model:
    config: ModelConfig
    weights: dict[str, np.ndarray]
    table_fingerprint: str

    def __post_init__(self):
        if self.table_fingerprint and (
            len(self.table_fingerprint) != 2 * _FINGERPRINT_BYTES
            or any(c not in "0123456789abcdef" for c in self.table_fingerprint)
        ):
            raise ValueError("table_fingerprint must be a sha256 hex digest or empty")
        shapes = self.config.weight_shapes()
        if set(self.weights) != set(shapes):
            raise ShapeMismatchError(
                f"weights must be exactly {sorted(shapes)}, got {sorted(self.weights)}"
            )
        for name, want in shapes.items():
            arr = self.weights[name]
            if arr.shape != want:
                raise ShapeMismatchError(f"{name}: expected shape {want}, got {arr.shape}")
            if arr.dtype != np.float32:
                raise ShapeMismatchError(f"{name}: weights must be float32, got {arr.dtype}")

    def copy_weights(self) -> dict[str, np.ndarray]:
        return {name: self.weights[name].copy() for name in WEIGHT_ORDER}


def init_model(
    config: Optional[ModelConfig] = None,
    seed: int = 0,
    table_fingerprint: str = "",
) -> Model:
    """Fan-in-scaled uniform init for weights, zeros for biases; the
    draw order is fixed by WEIGHT_ORDER so a seed pins every byte."""
    if config is None:
        config = ModelConfig()
    rng = np.random.default_rng(seed)
    weights: dict[str, np.ndarray] = {}
    for name, shape in ((n, config.weight_shapes()[n]) for n in WEIGHT_ORDER):
        if name.endswith("_b"):
            weights[name] = np.zeros(shape, dtype=np.float32)
        else:
            fan_in = int(np.prod(shape[1:]))
            limit = 1.0 / np.sqrt(fan_in)
            weights[name] = rng.uniform(-limit, limit, size=shape).astype(np.float32)
    return Model(config=config, weights=weights, table_fingerprint=table_fingerprint)


def encoded_to_array(sample: EncodedFunction) -> np.ndarray:
    """(input_len, 8) bit matrix -> (8, input_len) float32 network input."""
    return np.ascontiguousarray(sample.matrix.T, dtype=np.float32)


def batch_to_array(batch: Union[np.ndarray, Sequence[EncodedFunction]]) -> np.ndarray:
    if isinstance(batch, np.ndarray):
        x = batch
    else:
        x = np.stack([encoded_to_array(s) for s in batch])
    if x.ndim != 3:
        raise ShapeMismatchError(f"expected a (batch, width, length) array, got {x.shape}")
    return np.ascontiguousarray(x)


def _check_input(config: ModelConfig, x: np.ndarray) -> None:
    if x.shape[1:] != (config.input_width, config.input_len):
        raise ShapeMismatchError(
            f"input shape {x.shape[1:]} does not match "
            f"({config.input_width}, {config.input_len})"
        )


def forward_cached(weights: dict[str, np.ndarray], x: np.ndarray) -> tuple[np.ndarray, dict]:
    """Full forward pass; the cache holds every intermediate needed by
    backward_cached.  Works at any float dtype."""
    cache: dict = {"x": x}
    z1 = layers.conv_forward(x, weights["conv1_w"], weights["conv1_b"])
    a1 = layers.relu(z1)
    p1, arg1 = layers.maxpool_forward(a1)
    z2 = layers.conv_forward(p1, weights["conv2_w"], weights["conv2_b"])
    a2 = layers.relu(z2)
    p2, arg2 = layers.maxpool_forward(a2)
    flat = p2.reshape(p2.shape[0], -1)
    z3 = layers.dense_forward(flat, weights["dense1_w"], weights["dense1_b"])
    a3 = layers.relu(z3)
    z4 = layers.dense_forward(a3, weights["dense2_w"], weights["dense2_b"])
    probs = layers.softmax(z4)
    cache.update(
        z1=z1, a1=a1, arg1=arg1, p1=p1, z2=z2, a2=a2, arg2=arg2, p2=p2,
        flat=flat, z3=z3, a3=a3, probs=probs,
    )
    return probs, cache


def backward_cached(
    weights: dict[str, np.ndarray], cache: dict, targets: np.ndarray
) -> tuple[dict[str, np.ndarray], float]:
    """Gradients of mean cross-entropy w.r.t. every weight array."""
    probs = cache["probs"]
    loss = layers.cross_entropy(probs, targets)
    dz4 = layers.softmax_xent_backward(probs, targets)
    da3, dw4, db4 = layers.dense_backward(cache["a3"], weights["dense2_w"], dz4)
    dz3 = layers.relu_backward(da3, cache["z3"])
    dflat, dw3, db3 = layers.dense_backward(cache["flat"], weights["dense1_w"], dz3)
    dp2 = dflat.reshape(cache["p2"].shape)
    da2 = layers.maxpool_backward(dp2, cache["arg2"], cache["a2"].shape[2])
    dz2 = layers.relu_backward(da2, cache["z2"])
    dp1, dw2, db2 = layers.conv_backward(cache["p1"], weights["conv2_w"], dz2)
    da1 = layers.maxpool_backward(dp1, cache["arg1"], cache["a1"].shape[2])
    dz1 = layers.relu_backward(da1, cache["z1"])
    _, dw1, db1 = layers.conv_backward(cache["x"], weights["conv1_w"], dz1)
    grads = {
        "conv1_w": dw1, "conv1_b": db1,
        "conv2_w": dw2, "conv2_b": db2,
        "dense1_w": dw3, "dense1_b": db3,
        "dense2_w": dw4, "dense2_b": db4,
    }
    return grads, loss


def forward(
    model: Model, batch: Union[np.ndarray, Sequence[EncodedFunction]]
) -> np.ndarray:
    """Class probabilities, one row per sample, rows summing to 1."""
    x = batch_to_array(batch)
    _check_input(model.config, x)
    probs, _ = forward_cached(model.weights, x)
    return probs


def backward(
    model: Model,
    batch: Union[np.ndarray, Sequence[EncodedFunction]],
    targets: Sequence[int],
) -> tuple[dict[str, np.ndarray], float]:
    x = batch_to_array(batch)
    _check_input(model.config, x)
    y = np.asarray(targets, dtype=np.int64)
    if y.shape != (x.shape[0],):
        raise ShapeMismatchError(f"{x.shape[0]} samples but {y.shape} targets")
    if y.size and (y.min() < 0 or y.max() >= model.config.n_classes):
        raise ShapeMismatchError("target class indices out of range")
    _, cache = forward_cached(model.weights, x)
    return backward_cached(model.weights, cache, y)


def predict(
    model: Model,
    sample: EncodedFunction,
    table_fingerprint: Optional[str] = None,
) -> tuple[Label, float, np.ndarray]:
    """(label, confidence, all probabilities) for one sample.  Ties pick
    the lowest class index.  When a fingerprint is passed it must match
    the model's."""
    if table_fingerprint is not None and table_fingerprint != model.table_fingerprint:
        raise TableMismatchError(
            "token table fingerprint does not match the one the model was trained with"
        )
    probs = forward(model, [sample])[0]
    idx = int(np.argmax(probs))  # argmax returns the first maximum
    return LABELS[idx], float(probs[idx]), probs


# --- Persistence -------------------------------------------------------

_CONFIG_FIELDS = (
    "input_len", "input_width", "conv1_filters", "conv1_width",
    "pool_window", "pool_stride", "conv2_filters", "conv2_width",
    "dense1_units", "n_classes",
)
_CONFIG_STRUCT = struct.Struct("<" + "I" * len(_CONFIG_FIELDS))
_FINGERPRINT_BYTES = 32


def save_model(model: Model, path) -> None:
    """Binary layout: magic, version byte, config block, raw fingerprint,
    float32-LE weights in WEIGHT_ORDER, trailing CRC32 of everything."""
    blob = bytearray()
    blob += MAGIC
    blob += bytes([FORMAT_VERSION])
    blob += _CONFIG_STRUCT.pack(*(getattr(model.config, f) for f in _CONFIG_FIELDS))
    blob += bytes.fromhex(model.table_fingerprint) if model.table_fingerprint else bytes(
        _FINGERPRINT_BYTES
    )
    for name in WEIGHT_ORDER:
        arr = np.ascontiguousarray(model.weights[name], dtype="<f4")
        blob += arr.tobytes()
    blob += struct.pack("<I", zlib.crc32(bytes(blob)))
    with open(path, "wb") as fh:
        fh.write(bytes(blob))


def load_model(path) -> Model:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CorruptFileError(f"cannot read model file {path}: {exc}") from exc
    if len(blob) < len(MAGIC) + 1 + _CONFIG_STRUCT.size + _FINGERPRINT_BYTES + 4:
        raise CorruptFileError(f"{path}: file too short to be a model")
    if blob[: len(MAGIC)] != MAGIC:
        raise CorruptFileError(f"{path}: bad magic bytes")
    # Version before CRC: future formats keep the version byte here but
    # may change everything after it, including the trailer.
    version = blob[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    (stored_crc,) = struct.unpack("<I", blob[-4:])
    if zlib.crc32(blob[:-4]) != stored_crc:
        raise CorruptFileError(f"{path}: checksum mismatch")
    offset = len(MAGIC) + 1
    values = _CONFIG_STRUCT.unpack_from(blob, offset)
    offset += _CONFIG_STRUCT.size
    try:
        config = ModelConfig(**dict(zip(_CONFIG_FIELDS, values)))
    except ShapeMismatchError as exc:
        raise CorruptFileError(f"{path}: invalid config block ({exc})") from exc
    fingerprint_raw = blob[offset : offset + _FINGERPRINT_BYTES]
    offset += _FINGERPRINT_BYTES
    fingerprint = "" if fingerprint_raw == bytes(_FINGERPRINT_BYTES) else fingerprint_raw.hex()
    weights: dict[str, np.ndarray] = {}
    body = blob[:-4]
    for name, shape in ((n, config.weight_shapes()[n]) for n in WEIGHT_ORDER):
        count = int(np.prod(shape))
        end = offset + 4 * count
        if end > len(body):
            raise CorruptFileError(f"{path}: truncated weight data at {name}")
        weights[name] = (
            np.frombuffer(body, dtype="<f4", count=count, offset=offset)
            .reshape(shape)
            .astype(np.float32, copy=True)
        )
        offset = end
    if offset != len(body):
        raise CorruptFileError(f"{path}: {len(body) - offset} unexpected trailing bytes")
    return Model(config=config, weights=weights, table_fingerprint=fingerprint)
