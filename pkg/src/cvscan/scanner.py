"""Recursive source scanning: find functions a trained model flags.

A finding is a function whose predicted label is not CLEAN with
confidence at or above the threshold.  Scanning is read-only and
deterministic: findings are ordered by (file path, start byte).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .dataset import LABELS, Label
from .encoding import encode_tokens
from .errors import (
    CorruptFileError,
    CvscanError,
    ModelLoadError,
    NoInputsError,
    TableMismatchError,
    VersionMismatchError,
)
from .lexer import TokenTable, default_token_table, extract_functions, tokenize
from .nn.model import Model, batch_to_array, forward_cached, load_model

SOURCE_SUFFIXES = (".c", ".h")
DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class Finding:
    file: str
    function_name: str
    start_byte: int
    end_byte: int
    label: Label
    confidence: float
    truncated: bool


@dataclass(frozen=True)
class ScanSummary:
    files_scanned: int
    files_skipped: int
    functions_analyzed: int
    findings_by_label: dict[str, int]

    @property
    def total_findings(self) -> int:
        return sum(self.findings_by_label.values())


def discover_source_files(paths: Sequence) -> list[Path]:
    """Expand files and directories into a sorted list of .c/.h files."""
    found: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            found.extend(q for q in sorted(p.rglob("*")) if q.suffix in SOURCE_SUFFIXES and q.is_file())
        elif p.is_file():
            if p.suffix in SOURCE_SUFFIXES:
                found.append(p)
        else:
            raise NoInputsError(f"path does not exist: {p}")
    unique = sorted(set(found))
    if not unique:
        raise NoInputsError("no .c or .h files under the given paths")
    return unique


def scan_model(paths: Sequence, model: Model, threshold: float = DEFAULT_THRESHOLD,
               table: Optional[TokenTable] = None) -> tuple[list[Finding], ScanSummary]:
    """Scan with an already-loaded model (the library-level entry)."""
    if table is None:
        table = default_token_table()
    if model.table_fingerprint and model.table_fingerprint != table.fingerprint():
        raise TableMismatchError(
            "the active token table does not match the one the model was trained with"
        )
    files = discover_source_files(paths)
    findings: list[Finding] = []
    files_scanned = 0
    files_skipped = 0
    functions_analyzed = 0
    by_label = {label.name: 0 for label in LABELS if label is not Label.CLEAN}
    for path in files:
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
            spans = extract_functions(text)
            encoded = []
            for span in spans:
                ids = [t.token_id for t in tokenize(span.text, table)]
                encoded.append(encode_tokens(ids, model.config.input_len))
        except (OSError, CvscanError):
            files_skipped += 1
            continue
        files_scanned += 1
        if not spans:
            continue
        functions_analyzed += len(spans)
        x = batch_to_array(encoded)
        probs, _ = forward_cached(model.weights, x)
        top = probs.argmax(axis=1)
        for span, enc, row, idx in zip(spans, encoded, probs, top):
            label = LABELS[int(idx)]
            confidence = float(row[int(idx)])
            if label is Label.CLEAN or confidence < threshold:
                continue
            findings.append(
                Finding(
                    file=str(path),
                    function_name=span.name,
                    start_byte=span.start_byte,
                    end_byte=span.end_byte,
                    label=label,
                    confidence=confidence,
                    truncated=enc.truncated,
                )
            )
            by_label[label.name] += 1
    findings.sort(key=lambda f: (f.file, f.start_byte))
    summary = ScanSummary(
        files_scanned=files_scanned,
        files_skipped=files_skipped,
        functions_analyzed=functions_analyzed,
        findings_by_label=by_label,
    )
    return findings, summary


def scan(paths: Sequence, model_path, threshold: float = DEFAULT_THRESHOLD,
         table: Optional[TokenTable] = None) -> tuple[list[Finding], ScanSummary]:
    """Load the model at `model_path` and scan `paths`."""
    try:
        model = load_model(model_path)
    except (CorruptFileError, VersionMismatchError) as exc:
        raise ModelLoadError(str(exc)) from exc
    return scan_model(paths, model, threshold, table)
