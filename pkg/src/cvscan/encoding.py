"""Binary token encoding: each token id becomes 8 LSB-first bits.

A function is a fixed 500x8 uint8 matrix.  Row i holds the bits of the
i-th token id (bit k of row i is `(id >> k) & 1`); rows past the last
token are all-zero padding, which is exactly the encoding of PAD (id 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NotATokenError, OutOfRangeError
from .lexer import PAD_ID, VOCAB_SIZE, Token

INPUT_LENGTH = 500
BITS = 8


def encode_token(token_id: int) -> np.ndarray:
    """8 LSB-first bits of one token id, as uint8."""
    if not 0 <= token_id < VOCAB_SIZE:
        raise OutOfRangeError(f"token id {token_id} outside 0..{VOCAB_SIZE - 1}")
    return (token_id >> np.arange(BITS, dtype=np.uint8)) & 1


def decode_token(bits: Sequence[int]) -> int:
    """Inverse of encode_token; rejects rows that exceed the vocabulary."""
    arr = np.asarray(bits, dtype=np.int64)
    if arr.shape != (BITS,) or not np.isin(arr, (0, 1)).all():
        raise NotATokenError(f"expected {BITS} bits of 0/1, got {bits!r}")
    value = int((arr << np.arange(BITS)).sum())
    if value >= VOCAB_SIZE:
        raise NotATokenError(f"bit pattern decodes to {value}, outside the vocabulary")
    return value


@dataclass(frozen=True)
class EncodedFunction:
    """A single model input: (INPUT_LENGTH, BITS) uint8 matrix."""

    matrix: np.ndarray
    true_length: int  # tokens actually encoded (after any truncation)
    truncated: bool


def encode_tokens(
    token_ids: Sequence[int],
    max_len: int = INPUT_LENGTH,
) -> EncodedFunction:
    """Pack token ids into the fixed-size matrix, truncating past the cap.

    Ids must be real tokens (PAD is never a lexed token, so id 0 is
    rejected): padding exists only in the rows after `true_length`.
    """
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.ndim != 1:
        raise OutOfRangeError("token ids must be a flat sequence")
    if ids.size and (ids.min() < 0 or ids.max() >= VOCAB_SIZE):
        bad = ids[(ids < 0) | (ids >= VOCAB_SIZE)][0]
        raise OutOfRangeError(f"token id {int(bad)} outside 0..{VOCAB_SIZE - 1}")
    if np.any(ids == PAD_ID):
        raise NotATokenError("PAD (id 0) cannot appear in a token stream")
    truncated = ids.size > max_len
    kept = ids[:max_len]
    matrix = np.zeros((max_len, BITS), dtype=np.uint8)
    if kept.size:
        matrix[: kept.size] = (kept[:, None] >> np.arange(BITS)) & 1
    return EncodedFunction(matrix=matrix, true_length=int(kept.size), truncated=truncated)


def encode_function(
    tokens: Sequence[Token],
    max_len: int = INPUT_LENGTH,
) -> EncodedFunction:
    return encode_tokens([t.token_id for t in tokens], max_len)


def decode_matrix(matrix: np.ndarray) -> list[int]:
    """Recover the token id sequence from a matrix (padding rows dropped).

    Raises NotATokenError if a non-binary value appears, a row decodes
    outside the vocabulary, or a non-PAD row follows a PAD row.
    """
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[1] != BITS:
        raise NotATokenError(f"expected an (N, {BITS}) matrix, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise NotATokenError("matrix contains values other than 0/1")
    values = (arr.astype(np.int64) << np.arange(BITS)).sum(axis=1)
    if values.size and values.max() >= VOCAB_SIZE:
        row = int(np.argmax(values >= VOCAB_SIZE))
        raise NotATokenError(f"row {row} decodes to {int(values[row])}, outside the vocabulary")
    pad_rows = np.flatnonzero(values == PAD_ID)
    true_length = int(pad_rows[0]) if pad_rows.size else int(values.size)
    if np.any(values[true_length:] != PAD_ID):
        raise NotATokenError("non-padding row found after padding began")
    return [int(v) for v in values[:true_length]]


def format_matrix(enc: EncodedFunction, name: Optional[str] = None) -> str:
    """Human-inspectable dump: optional `# function <name>` header, then
    one line of 8 bits (LSB first) per input row."""
    lines = []
    if name is not None:
        lines.append(f"# function {name}")
    for row in enc.matrix:
        lines.append("".join(str(int(b)) for b in row))
    return "\n".join(lines) + "\n"
