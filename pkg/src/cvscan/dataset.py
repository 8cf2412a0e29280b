"""Corpus handling: CWE labeling, ingestion, dedup, balancing, splitting.

A corpus is an ordered list of labeled function samples bound to one token
table (by fingerprint).  The on-disk format is line-delimited JSON with
fields `source` (required), `cwe_ids` (optional), `origin` (optional);
labels and token sequences are recomputed on load so a corpus file never
goes stale against a different table or CWE mapping.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    CvscanError,
    DegenerateCorpusError,
    EmptyCorpusError,
    FileUnreadableError,
    TableFormatError,
)
from .lexer import TokenTable, default_token_table, tokenize


class Label(enum.Enum):
    """The five output classes, in class-index order."""

    BUFFER = 0
    LOGIC = 1
    MEMORY = 2
    NUMERICAL = 3
    CLEAN = 4

    @property
    def class_index(self) -> int:
        return self.value


LABELS: tuple[Label, ...] = tuple(Label)
N_CLASSES = len(LABELS)


@dataclass(frozen=True)
class CweMap:
    """CWE id -> Label mapping with a default for unmapped ids."""

    mapping: Mapping[int, Label]
    default: Label

    def lookup(self, cwe_id: int) -> Label:
        return self.mapping.get(int(cwe_id), self.default)


# Buffer overflows (120-122) and range violations (119) are BUFFER;
# null dereference (476), pointer-subtraction size (469) and
# use-after-free (416) are MEMORY; improper validation (20) and
# uninitialized variables (457) are NUMERICAL; always-incorrect
# operator/expression (480) and bad comparison (697) are LOGIC.
_DEFAULT_CWE_ROWS: tuple[tuple[int, Label], ...] = (
    (120, Label.BUFFER),
    (121, Label.BUFFER),
    (122, Label.BUFFER),
    (119, Label.BUFFER),
    (476, Label.MEMORY),
    (469, Label.MEMORY),
    (416, Label.MEMORY),
    (20, Label.NUMERICAL),
    (457, Label.NUMERICAL),
    (480, Label.LOGIC),
    (697, Label.LOGIC),
)


def default_cwe_map() -> CweMap:
    return CweMap(mapping=dict(_DEFAULT_CWE_ROWS), default=Label.NUMERICAL)


def load_cwe_map(path) -> CweMap:
    """Parse `<cwe_id> <LABEL>` lines plus one `DEFAULT <LABEL>` line."""
    mapping: dict[int, Label] = {}
    default: Optional[Label] = None
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadableError(f"cannot read CWE map {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise TableFormatError(f"{path}:{lineno}: expected '<cwe_id> <LABEL>'")
            key, name = parts
            try:
                label = Label[name]
            except KeyError:
                raise TableFormatError(f"{path}:{lineno}: unknown label {name!r}") from None
            if key == "DEFAULT":
                if default is not None:
                    raise TableFormatError(f"{path}:{lineno}: duplicate DEFAULT line")
                default = label
            else:
                try:
                    cwe_id = int(key)
                except ValueError:
                    raise TableFormatError(f"{path}:{lineno}: bad CWE id {key!r}") from None
                mapping[cwe_id] = label
    if default is None:
        raise TableFormatError(f"{path}: missing DEFAULT line")
    return CweMap(mapping=mapping, default=default)


def save_cwe_map(cwe_map: CweMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cwe_id in sorted(cwe_map.mapping):
            fh.write(f"{cwe_id} {cwe_map.mapping[cwe_id].name}\n")
        fh.write(f"DEFAULT {cwe_map.default.name}\n")


def map_cwe_to_label(cwe_id: int, mapping: Optional[CweMap] = None) -> Label:
    if mapping is None:
        mapping = default_cwe_map()
    return mapping.lookup(cwe_id)


def label_for_cwe_ids(cwe_ids: Sequence[int], mapping: Optional[CweMap] = None) -> Label:
    """Empty means CLEAN; otherwise the first listed CWE id decides."""
    if not cwe_ids:
        return Label.CLEAN
    return map_cwe_to_label(cwe_ids[0], mapping)


@dataclass(frozen=True)
class LabeledSample:
    source: str
    tokens: tuple[int, ...]
    cwe_ids: tuple[int, ...]
    label: Label
    origin: str = ""


@dataclass(frozen=True)
class Corpus:
    samples: tuple[LabeledSample, ...]
    table_fingerprint: str

    def __len__(self) -> int:
        return len(self.samples)

    def label_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in LABELS}
        for s in self.samples:
            counts[s.label] += 1
        return counts

    def buggy_fraction(self) -> float:
        if not self.samples:
            return 0.0
        buggy = sum(1 for s in self.samples if s.label is not Label.CLEAN)
        return buggy / len(self.samples)


def make_sample(
    source: str,
    cwe_ids: Sequence[int] = (),
    origin: str = "",
    table: Optional[TokenTable] = None,
    cwe_map: Optional[CweMap] = None,
) -> LabeledSample:
    if table is None:
        table = default_token_table()
    tokens = tuple(t.token_id for t in tokenize(source, table))
    return LabeledSample(
        source=source,
        tokens=tokens,
        cwe_ids=tuple(int(c) for c in cwe_ids),
        label=label_for_cwe_ids(tuple(cwe_ids), cwe_map),
        origin=origin,
    )


def ingest(
    path,
    table: Optional[TokenTable] = None,
    cwe_map: Optional[CweMap] = None,
    diagnostics: Optional[list[str]] = None,
) -> Corpus:
    """Load a line-delimited record file into a Corpus.

    Malformed lines (bad JSON, missing/invalid fields, untokenizable
    source) are skipped; one diagnostic per skip is appended when a list
    is supplied.
    """
    if table is None:
        table = default_token_table()
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadableError(f"cannot read corpus {path}: {exc}") from exc
    samples: list[LabeledSample] = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                if diagnostics is not None:
                    diagnostics.append(f"{path}:{lineno}: bad JSON ({exc.msg})")
                continue
            if not isinstance(record, dict) or not isinstance(record.get("source"), str):
                if diagnostics is not None:
                    diagnostics.append(f"{path}:{lineno}: missing string field 'source'")
                continue
            cwe_ids = record.get("cwe_ids", [])
            if not (
                isinstance(cwe_ids, list)
                and all(isinstance(c, int) and not isinstance(c, bool) for c in cwe_ids)
            ):
                if diagnostics is not None:
                    diagnostics.append(f"{path}:{lineno}: 'cwe_ids' must be an integer array")
                continue
            origin = record.get("origin", "")
            if not isinstance(origin, str):
                if diagnostics is not None:
                    diagnostics.append(f"{path}:{lineno}: 'origin' must be a string")
                continue
            try:
                samples.append(make_sample(record["source"], cwe_ids, origin, table, cwe_map))
            except CvscanError as exc:
                if diagnostics is not None:
                    diagnostics.append(f"{path}:{lineno}: untokenizable source ({exc})")
                continue
    if not samples:
        raise EmptyCorpusError(f"{path}: no valid records")
    return Corpus(samples=tuple(samples), table_fingerprint=table.fingerprint())


def save_corpus(corpus: Corpus, path) -> None:
    """Write the line-delimited record format (labels are derived data
    and are not stored)."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in corpus.samples:
            record: dict = {"source": s.source}
            if s.cwe_ids:
                record["cwe_ids"] = list(s.cwe_ids)
            if s.origin:
                record["origin"] = s.origin
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def deduplicate(corpus: Corpus) -> Corpus:
    """Keep the first sample per distinct token-id sequence."""
    seen: set[tuple[int, ...]] = set()
    kept = []
    for s in corpus.samples:
        if s.tokens in seen:
            continue
        seen.add(s.tokens)
        kept.append(s)
    return replace(corpus, samples=tuple(kept))


def balance(
    corpus: Corpus,
    target_buggy_fraction: float = 0.5,
    *,
    seed: int,
) -> Corpus:
    """Duplicate buggy samples until their fraction is ~target, then shuffle.

    Balancing only ever adds copies of buggy samples: if the buggy
    fraction already meets or exceeds the target, the corpus is returned
    shuffled but otherwise unchanged (clean samples are never duplicated
    or dropped).  Deterministic given (corpus, seed).
    """
    if not 0.0 < target_buggy_fraction < 1.0:
        raise DegenerateCorpusError(
            f"target buggy fraction must be in (0, 1), got {target_buggy_fraction}"
        )
    buggy = [s for s in corpus.samples if s.label is not Label.CLEAN]
    clean = [s for s in corpus.samples if s.label is Label.CLEAN]
    if not buggy or not clean:
        raise DegenerateCorpusError(
            f"balancing needs both classes: {len(buggy)} buggy, {len(clean)} clean"
        )
    rng = np.random.default_rng(seed)
    n_b, n_c = len(buggy), len(clean)
    t = target_buggy_fraction
    # Closest achievable buggy count (never below what is already there).
    exact = t * n_c / (1.0 - t)
    candidates = {int(np.floor(exact)), int(np.ceil(exact))}
    want = min(candidates, key=lambda m: (abs(m / (m + n_c) - t) if m + n_c else 1.0, m))
    want = max(want, n_b)
    extras = [buggy[int(i)] for i in rng.integers(0, n_b, size=want - n_b)]
    combined = list(corpus.samples) + extras
    order = rng.permutation(len(combined))
    return replace(corpus, samples=tuple(combined[int(i)] for i in order))


def split(
    corpus: Corpus,
    train_fraction: float = 0.8,
    *,
    seed: int,
) -> tuple[Corpus, Corpus]:
    """Seeded shuffle-and-split that keeps duplicate token sequences on
    one side, so balancing copies can never leak into the test set."""
    if not 0.0 < train_fraction < 1.0:
        raise DegenerateCorpusError(f"train fraction must be in (0, 1), got {train_fraction}")
    if not corpus.samples:
        raise EmptyCorpusError("cannot split an empty corpus")
    groups: dict[tuple[int, ...], list[LabeledSample]] = {}
    for s in corpus.samples:
        groups.setdefault(s.tokens, []).append(s)
    keys = list(groups)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(keys))
    target = int(round(train_fraction * len(corpus.samples)))
    train: list[LabeledSample] = []
    test: list[LabeledSample] = []
    for i in order:
        group = groups[keys[int(i)]]
        side = train if len(train) < target else test
        side.extend(group)
    return (
        replace(corpus, samples=tuple(train)),
        replace(corpus, samples=tuple(test)),
    )


# --- Synthetic corpus -------------------------------------------------

_STRUCT_NAMES = ("req", "node", "conn", "frame", "record", "bucket")
_GETTER_NAMES = ("find_slot", "lookup_item", "next_frame", "peek_node", "fetch_entry")
_FIELD_NAMES = ("key", "value", "name", "data", "tag", "path")
_VAR_NAMES = (
    "buf", "tmp", "len", "count", "idx", "total", "limit", "pos",
    "acc", "size", "left", "span", "mark", "step", "base", "wide",
)
_WORDS = ("alpha", "delta", "omega", "probe", "relay", "token")
_FN_VERBS = ("copy", "load", "merge", "parse", "apply", "route", "pack", "emit")
_FN_NOUNS = ("frame", "entry", "field", "chunk", "batch", "range", "label", "block")

_SIGNATURES = (
    ("int", "void", ()),
    ("int", "int {a}", ("{a}",)),
    ("long", "int {a}, char *{b}", ("{a}", "{b}")),
    ("void", "char *{a}", ("{a}",)),
    ("int", "struct {T} *{a}, int {b}", ("{a}", "{b}")),
    ("int", "struct {T} *{a}, const char *{b}, const char *{c}", ("{a}", "{b}", "{c}")),
)


class _Names:
    """Per-function identifier allocator: realistic names, no reuse."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._used: set[str] = set()
        self.ints: list[str] = []  # declared, initialized int variables

    def fresh(self, pool: Sequence[str]) -> str:
        name = pool[int(self._rng.integers(len(pool)))]
        while name in self._used:
            name = f"{pool[int(self._rng.integers(len(pool)))]}{int(self._rng.integers(2, 100))}"
        self._used.add(name)
        return name

    def int_var(self) -> str:
        name = self.fresh(_VAR_NAMES)
        self.ints.append(name)
        return name

    def some_int(self) -> str:
        return self.ints[int(self._rng.integers(len(self.ints)))]


def _num(rng: np.random.Generator) -> int:
    return int(rng.integers(1, 4096))


def _bufsize(rng: np.random.Generator) -> int:
    return int(2 ** rng.integers(3, 10))


def _filler(rng: np.random.Generator, names: _Names) -> list[str]:
    """One class-neutral statement.  Every declaration is initialized;
    conditions always use ==/</> against a literal, so no filler can
    collide with a class payload pattern."""
    kind = int(rng.integers(8))
    if kind in (4, 5) and len(names.ints) < 2:
        kind = 0
    if kind != 0 and not names.ints:
        kind = 0
    if kind == 0:
        return [f"int {names.int_var()} = {_num(rng)};"]
    a = names.some_int()
    if kind == 1:
        return [f"{a} = {a} + {_num(rng)};"]
    if kind == 2:
        return [f"{a} = {a} * {_num(rng)};"]
    if kind == 3:
        return [f"if ({a} == {_num(rng)}) {{ {a} = {_num(rng)}; }}"]
    if kind == 4:
        b = names.some_int()
        return [
            f"for ({a} = 0; {a} < {_num(rng)}; {a}++) {{ {b} = {b} + {_num(rng)}; }}"
        ]
    if kind == 5:
        b = names.some_int()
        return [f"while ({a} > {_num(rng)}) {{ {a} = {a} - {_num(rng)}; {b} = {b} + 1; }}"]
    if kind == 6:
        return [f"{a} = {a} << {int(rng.integers(1, 8))};"]
    return [f"{a} = {a} % {_num(rng)};"]


def _src_string_decl(rng: np.random.Generator, names: _Names) -> tuple[str, str]:
    q = names.fresh(_VAR_NAMES)
    word = _WORDS[int(rng.integers(len(_WORDS)))]
    return q, f'char *{q} = "{word}";'


# Payload builders.  Each returns (statement lines, cwe ids).  The token
# pattern of each payload is what separates the classes, so no two
# builders in different classes may share a distinguishing n-gram.

def _buffer_payload(rng: np.random.Generator, names: _Names) -> tuple[list[str], list[int]]:
    variant = int(rng.integers(7))
    d = names.fresh(_VAR_NAMES)
    if variant == 0:
        q, decl = _src_string_decl(rng, names)
        return [f"char {d}[{_bufsize(rng)}];", decl, f"strcpy({d}, {q});"], [120]
    if variant == 1:
        q, decl = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            f"{d}[0] = 0;",
            f"strcat({d}, {q});",
        ], [120]
    if variant == 2:
        q, decl = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            f"strncpy({d}, {q}, strlen({q}) + 1);",
        ], [121]
    if variant == 3:
        t = _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))]
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        r = names.fresh(_VAR_NAMES)
        f1, f2 = _FIELD_NAMES[0], _FIELD_NAMES[1]
        a1 = names.fresh(_FIELD_NAMES[2:])
        a2 = names.fresh(_FIELD_NAMES[2:])
        return [
            f"struct {t} *{r} = {g}({a1});",
            f"strncpy({r}->{f1}, {a1}, strlen({a1}) + 1);",
            f"strncpy({r}->{f2}, {a2}, strlen({a2}) + 1);",
        ], [121]
    if variant == 4:
        q, decl = _src_string_decl(rng, names)
        q2, decl2 = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            decl2,
            f'sprintf({d}, "%s%s", {q}, {q2});',
        ], [122]
    if variant == 5:
        return [f"char {d}[{_bufsize(rng)}];", f"gets({d});"], [120]
    q, decl = _src_string_decl(rng, names)
    return [
        f"char {d}[{_bufsize(rng)}];",
        decl,
        f"memcpy({d}, {q}, strlen({q}) + 1);",
    ], [119]


def _memory_payload(rng: np.random.Generator, names: _Names) -> tuple[list[str], list[int]]:
    variant = int(rng.integers(5))
    p = names.fresh(_VAR_NAMES)
    if variant == 0:
        t = _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))]
        f1 = _FIELD_NAMES[int(rng.integers(len(_FIELD_NAMES)))]
        return [
            f"struct {t} *{p} = malloc(sizeof(struct {t}));",
            f"{p}->{f1} = {_num(rng)};",
        ], [476]
    if variant == 1:
        return [
            f"int *{p} = malloc({_num(rng)} * sizeof(int));",
            f"*{p} = {_num(rng)};",
        ], [476]
    if variant == 2:
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        q = names.fresh(_VAR_NAMES)
        sz = names.fresh(_VAR_NAMES)
        return [
            f"char *{p} = {g}();",
            f"char *{q} = {p} + {_num(rng)};",
            f"int {sz} = {q} - {p};",
            f"memset({p}, 0, {sz});",
        ], [469]
    if variant == 3:
        t = _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))]
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        f1 = _FIELD_NAMES[int(rng.integers(len(_FIELD_NAMES)))]
        return [
            f"struct {t} *{p} = {g}();",
            f"free({p});",
            f"{p}->{f1} = {_num(rng)};",
        ], [416]
    g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
    return [
        f"int *{p} = {g}();",
        f"free({p});",
        f"*{p} = {_num(rng)};",
    ], [416]


def _numerical_payload(rng: np.random.Generator, names: _Names) -> tuple[list[str], list[int]]:
    variant = int(rng.integers(5))
    if variant == 0:
        a = names.fresh(_VAR_NAMES)
        v = _num(rng)
        return [f"int {a};", f"{a} = {a} + {v};"], [457]
    if variant == 1:
        a = names.fresh(_VAR_NAMES)
        i = names.int_var()
        return [
            f"int {i} = 0;",
            f"int {a};",
            f"for ({i} = 0; {i} < {_num(rng)}; {i}++) {{ {a} = {a} + {i}; }}",
        ], [457]
    if variant == 2:
        arr = names.fresh(_VAR_NAMES)
        i = names.fresh(_VAR_NAMES)
        return [
            f"int {arr}[{_bufsize(rng)}];",
            f"int {i} = 0;",
            f'scanf("%d", &{i});',
            f"{arr}[{i}] = {_num(rng)};",
        ], [20]
    if variant == 3:
        d = names.fresh(_VAR_NAMES)
        s = names.fresh(_VAR_NAMES)
        ln = names.fresh(_VAR_NAMES)
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        return [
            f"char {d}[{_bufsize(rng)}];",
            f"char *{s} = {g}();",
            f"int {ln} = message_size({s});",
            f"memcpy({d}, {s}, {ln});",
        ], [20]
    big = names.fresh(_VAR_NAMES)
    s2 = names.fresh(_VAR_NAMES)
    arr = names.fresh(_VAR_NAMES)
    g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
    return [
        f"int {arr}[{_bufsize(rng)}];",
        f"int {big} = {g}();",
        f"short {s2} = (short) {big};",
        f"{arr}[{s2}] = {_num(rng)};",
    ], [197]


def _logic_payload(rng: np.random.Generator, names: _Names) -> tuple[list[str], list[int]]:
    variant = int(rng.integers(4))
    x = names.int_var()
    if variant == 0:
        y = names.int_var()
        return [
            f"int {x} = {_num(rng)};",
            f"int {y} = {_num(rng)};",
            f"if ({x} = {y}) {{ {x} = {x} + {_num(rng)}; }}",
        ], [480]
    if variant == 1:
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        h = names.fresh(_VAR_NAMES)
        c = names.int_var()
        return [
            f"int {x} = 0;",
            f"int {c} = 0;",
            f"while ({x} = {g}({h})) {{ {c} = {c} + 1; }}",
        ], [480]
    if variant == 2:
        lo, hi = _num(rng), _num(rng)
        return [
            f"int {x} = {_num(rng)};",
            f"if ({x} < {lo} && {x} > {hi}) {{ return {_num(rng)}; }}",
        ], [697]
    y = names.int_var()
    return [
        f"int {x} = {_num(rng)};",
        f"int {y} = {_num(rng)};",
        f"if (!{x} == {y}) {{ {x} = {_num(rng)}; }}",
    ], [480]


def _clean_payload(rng: np.random.Generator, names: _Names) -> tuple[list[str], list[int]]:
    variant = int(rng.integers(12))
    if variant == 0:
        d = names.fresh(_VAR_NAMES)
        q, decl = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            f"strlcpy({d}, {q}, sizeof({d}));",
        ], []
    if variant == 1:
        d = names.fresh(_VAR_NAMES)
        q, decl = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            f"{d}[0] = 0;",
            f"strncat({d}, {q}, sizeof({d}) - 1);",
        ], []
    if variant == 2:
        d = names.fresh(_VAR_NAMES)
        q, decl = _src_string_decl(rng, names)
        return [
            f"char {d}[{_bufsize(rng)}];",
            decl,
            f'snprintf({d}, sizeof({d}), "%s", {q});',
        ], []
    if variant == 3:
        t = _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))]
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        r = names.fresh(_VAR_NAMES)
        f1, f2 = _FIELD_NAMES[0], _FIELD_NAMES[1]
        a1 = names.fresh(_FIELD_NAMES[2:])
        a2 = names.fresh(_FIELD_NAMES[2:])
        return [
            f"struct {t} *{r} = {g}({a1});",
            f"strlcpy({r}->{f1}, {a1}, sizeof({r}->{f1}));",
            f"strlcpy({r}->{f2}, {a2}, sizeof({r}->{f2}));",
        ], []
    if variant == 4:
        t = _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))]
        p = names.fresh(_VAR_NAMES)
        f1 = _FIELD_NAMES[int(rng.integers(len(_FIELD_NAMES)))]
        return [
            f"struct {t} *{p} = malloc(sizeof(struct {t}));",
            f"if ({p} == NULL) {{ return -1; }}",
            f"{p}->{f1} = {_num(rng)};",
        ], []
    if variant == 5:
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        p = names.fresh(_VAR_NAMES)
        return [
            f"char *{p} = {g}();",
            f"use_buffer({p});",
            f"free({p});",
            f"{p} = NULL;",
        ], []
    if variant == 6:
        arr = names.fresh(_VAR_NAMES)
        i = names.fresh(_VAR_NAMES)
        cap = _bufsize(rng)
        return [
            f"int {arr}[{cap}];",
            f"int {i} = 0;",
            f'if (scanf("%d", &{i}) != 1 || {i} < 0 || {i} >= {cap}) {{ return -1; }}',
            f"{arr}[{i}] = {_num(rng)};",
        ], []
    if variant == 7:
        a = names.int_var()
        return [f"int {a} = 0;", f"{a} = {a} + {_num(rng)};"], []
    if variant == 8:
        d = names.fresh(_VAR_NAMES)
        s = names.fresh(_VAR_NAMES)
        ln = names.fresh(_VAR_NAMES)
        g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
        return [
            f"char {d}[{_bufsize(rng)}];",
            f"char *{s} = {g}();",
            f"int {ln} = message_size({s});",
            f"if ({ln} > sizeof({d})) {{ return -1; }}",
            f"memcpy({d}, {s}, {ln});",
        ], []
    if variant == 9:
        x = names.int_var()
        y = names.int_var()
        return [
            f"int {x} = {_num(rng)};",
            f"int {y} = {_num(rng)};",
            f"if ({x} == {y}) {{ {x} = {x} + {_num(rng)}; }}",
        ], []
    if variant == 10:
        x = names.int_var()
        lo, hi = _num(rng), _num(rng)
        return [
            f"int {x} = {_num(rng)};",
            f"if ({x} > {lo} && {x} < {hi}) {{ return {_num(rng)}; }}",
        ], []
    x = names.int_var()
    g = _GETTER_NAMES[int(rng.integers(len(_GETTER_NAMES)))]
    h = names.fresh(_VAR_NAMES)
    c = names.int_var()
    return [
        f"int {x} = 0;",
        f"int {c} = 0;",
        f"while (({x} = {g}({h})) != 0) {{ {c} = {c} + 1; }}",
    ], []


_PAYLOADS = {
    Label.BUFFER: _buffer_payload,
    Label.MEMORY: _memory_payload,
    Label.NUMERICAL: _numerical_payload,
    Label.LOGIC: _logic_payload,
    Label.CLEAN: _clean_payload,
}


def _render_function(rng: np.random.Generator, label: Label) -> tuple[str, list[int]]:
    names = _Names(rng)
    ret, params, args = _SIGNATURES[int(rng.integers(len(_SIGNATURES)))]
    fields = {
        "T": _STRUCT_NAMES[int(rng.integers(len(_STRUCT_NAMES)))],
        "a": names.fresh(_VAR_NAMES),
        "b": names.fresh(_VAR_NAMES),
        "c": names.fresh(_VAR_NAMES),
    }
    params = params.format(**fields)
    verb = _FN_VERBS[int(rng.integers(len(_FN_VERBS)))]
    noun = _FN_NOUNS[int(rng.integers(len(_FN_NOUNS)))]
    fn_name = f"{verb}_{noun}"
    payload, cwe_ids = _PAYLOADS[label](rng, names)
    n_fillers = int(rng.integers(1, 5))
    insert_at = int(rng.integers(0, n_fillers + 1))
    body: list[str] = []
    for slot in range(n_fillers + 1):
        if slot == insert_at:
            body.extend(payload)
        if slot < n_fillers:
            body.extend(_filler(rng, names))
    if ret == "void":
        if rng.integers(2):
            body.append("return;")
    elif names.ints and rng.integers(2):
        body.append(f"return {names.some_int()};")
    else:
        body.append(f"return {_num(rng)};")
    lines = [f"{ret} {fn_name}({params})", "{"]
    lines.extend(f"    {stmt}" for stmt in body)
    lines.append("}")
    return "\n".join(lines) + "\n", cwe_ids


def generate_synthetic_corpus(
    n_per_class: int,
    seed: int,
    table: Optional[TokenTable] = None,
) -> Corpus:
    """Template-generated corpus: n_per_class functions per label.

    Bug payloads carry the class signal; filler statements, signatures,
    and identifier spellings are drawn from class-neutral pools.  Each
    buggy sample's cwe_ids round-trip through the default CWE mapping to
    its label, so saved corpora re-ingest identically.
    """
    if n_per_class < 1:
        raise EmptyCorpusError("n_per_class must be >= 1")
    if table is None:
        table = default_token_table()
    rng = np.random.default_rng(seed)
    cwe_map = default_cwe_map()
    samples = []
    for label in LABELS:
        for k in range(n_per_class):
            source, cwe_ids = _render_function(rng, label)
            samples.append(
                make_sample(source, cwe_ids, f"synth/{label.name.lower()}/{k}", table, cwe_map)
            )
    return Corpus(samples=tuple(samples), table_fingerprint=table.fingerprint())
