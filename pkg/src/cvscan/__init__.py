"""cvscan: ML-based vulnerability detection for C functions.

The pipeline: extract functions from C source, tokenize them into a
fixed 91-category vocabulary, encode token ids as 500x8 LSB-first bit
matrices, classify with a small convolutional network into {BUFFER,
LOGIC, MEMORY, NUMERICAL, CLEAN}, and report findings above a
confidence threshold.
"""

from .dataset import (
    Corpus,
    CweMap,
    Label,
    LabeledSample,
    balance,
    deduplicate,
    default_cwe_map,
    generate_synthetic_corpus,
    ingest,
    label_for_cwe_ids,
    load_cwe_map,
    map_cwe_to_label,
    save_corpus,
    split,
)
from .encoding import (
    EncodedFunction,
    decode_matrix,
    decode_token,
    encode_function,
    encode_token,
    encode_tokens,
)
from .errors import CvscanError
from .evaluation import (
    PRCurve,
    PRPoint,
    confusion_matrix,
    pr_curve,
    pr_curves_per_class,
    precision_at_recall,
)
from .lexer import (
    FunctionSpan,
    Token,
    TokenTable,
    default_token_table,
    extract_functions,
    load_token_table,
    save_token_table,
    tokenize,
)
from .nn import (
    Model,
    ModelConfig,
    TrainConfig,
    init_model,
    load_model,
    predict,
    save_model,
    train,
)
from .scanner import Finding, ScanSummary, scan

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CvscanError",
    "CweMap",
    "EncodedFunction",
    "Finding",
    "FunctionSpan",
    "Label",
    "LabeledSample",
    "Model",
    "ModelConfig",
    "PRCurve",
    "PRPoint",
    "ScanSummary",
    "Token",
    "TokenTable",
    "TrainConfig",
    "balance",
    "confusion_matrix",
    "decode_matrix",
    "decode_token",
    "deduplicate",
    "default_cwe_map",
    "default_token_table",
    "encode_function",
    "encode_token",
    "encode_tokens",
    "extract_functions",
    "generate_synthetic_corpus",
    "ingest",
    "init_model",
    "label_for_cwe_ids",
    "load_cwe_map",
    "load_model",
    "load_token_table",
    "map_cwe_to_label",
    "pr_curve",
    "pr_curves_per_class",
    "precision_at_recall",
    "predict",
    "save_corpus",
    "save_model",
    "save_token_table",
    "scan",
    "split",
    "tokenize",
    "train",
]
