"""C function extraction and tokenization over a fixed 91-entry vocabulary.

Every lexeme maps into one of 91 token ids: a reserved padding id, one id
per C89 keyword, one per punctuator/operator, catch-all ids for numeric,
string and character literals, one id per risk-relevant library function,
and a single catch-all for every other identifier.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    TableFormatError,
    UnbalancedBracesError,
    UnterminatedCommentError,
    UnterminatedStringError,
)

PAD = "PAD"
KEYWORD = "KEYWORD"
SYMBOL = "SYMBOL"
NUMBER = "NUMBER"
STRING = "STRING"
CHAR = "CHAR"
FUNCTION = "FUNCTION"
IDENTIFIER = "IDENTIFIER"

GROUPS = (PAD, KEYWORD, SYMBOL, NUMBER, STRING, CHAR, FUNCTION, IDENTIFIER)

# Groups whose entries carry an exact lexeme; the rest are catch-alls.
_EXACT_GROUPS = (KEYWORD, SYMBOL, FUNCTION)

C89_KEYWORDS = (
    "auto", "break", "case", "char", "const", "continue", "default", "do",
    "double", "else", "enum", "extern", "float", "for", "goto", "if",
    "int", "long", "register", "return", "short", "signed", "sizeof",
    "static", "struct", "switch", "typedef", "union", "unsigned", "void",
    "volatile", "while",
)

# 41 punctuators/operators.  %= and ^= are intentionally absent: maximal
# munch splits them into two tokens, keeping the symbol count at 41.
C_SYMBOLS = (
    "(", ")", "[", "]", "{", "}", ",", ";", ":", "?", ".", "~",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "&=", "|=",
)

RISKY_FUNCTIONS = (
    "strcpy", "strncpy", "strcat", "strncat", "sprintf", "snprintf",
    "memcpy", "memmove", "memset", "gets", "scanf", "malloc", "free",
)

VOCAB_SIZE = 91
PAD_ID = 0

_CATCHALL_LEXEME = "*"


@dataclass(frozen=True)
class TableEntry:
    token_id: int
    group: str
    lexeme: str  # exact lexeme, or "*" for catch-all entries


@dataclass(frozen=True)
class Token:
    token_id: int
    group: str
    lexeme: str
    byte_offset: int


@dataclass(frozen=True)
class FunctionSpan:
    """One top-level function definition located in a source file.

    Offsets index the decoded source string (identical to byte offsets
    for ASCII input).
    """

    name: str
    start_byte: int
    end_byte: int
    text: str


class TokenTable:
    """Immutable 91-entry vocabulary with exact-lexeme and catch-all rows."""

    def __init__(self, entries: Iterable[TableEntry]):
        entries = sorted(entries, key=lambda e: e.token_id)
        ids = [e.token_id for e in entries]
        if ids != list(range(VOCAB_SIZE)):
            raise TableFormatError(
                f"table must cover ids 0..{VOCAB_SIZE - 1} exactly, got {len(ids)} entries"
            )
        if entries[PAD_ID].group != PAD:
            raise TableFormatError("token id 0 must be the PAD entry")
        exact: dict[str, TableEntry] = {}
        catchall: dict[str, TableEntry] = {}
        for e in entries:
            if e.group not in GROUPS:
                raise TableFormatError(f"unknown group {e.group!r} for id {e.token_id}")
            if e.group in _EXACT_GROUPS:
                # "*" is a real lexeme here (multiplication); only the
                # catch-all groups treat it as a placeholder.
                if not e.lexeme:
                    raise TableFormatError(f"id {e.token_id}: {e.group} needs an exact lexeme")
                if e.lexeme in exact:
                    raise TableFormatError(f"duplicate lexeme {e.lexeme!r}")
                exact[e.lexeme] = e
            else:
                if e.group in catchall:
                    raise TableFormatError(f"group {e.group} must have a single entry")
                catchall[e.group] = e
        missing = {NUMBER, STRING, CHAR, IDENTIFIER, PAD} - set(catchall)
        if missing:
            raise TableFormatError(f"missing catch-all entries: {sorted(missing)}")
        self.entries: tuple[TableEntry, ...] = tuple(entries)
        self._exact = exact
        self._catchall = catchall
        # Word-shaped lexemes (keywords + named functions) vs punctuation.
        self._words = {lex: e for lex, e in exact.items() if lex[0].isalpha() or lex[0] == "_"}
        syms = [lex for lex in exact if lex not in self._words]
        self._sym2 = {s for s in syms if len(s) == 2}
        self._sym1 = {s for s in syms if len(s) == 1}
        if any(len(s) > 2 for s in syms):
            raise TableFormatError("symbols longer than 2 characters are not supported")

    def __len__(self) -> int:
        return len(self.entries)

    def entry_for_lexeme(self, lexeme: str) -> Optional[TableEntry]:
        return self._exact.get(lexeme)

    def catchall(self, group: str) -> TableEntry:
        return self._catchall[group]

    def to_text(self) -> str:
        lines = [f"{e.token_id} {e.group} {e.lexeme}" for e in self.entries]
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """Hex digest binding corpora and models to this vocabulary."""
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def default_token_table() -> TokenTable:
    """The canonical 91-entry table: PAD + 32 keywords + 41 symbols +
    NUMBER/STRING/CHAR + 13 named functions + IDENTIFIER."""
    entries = [TableEntry(PAD_ID, PAD, _CATCHALL_LEXEME)]
    next_id = 1
    for kw in C89_KEYWORDS:
        entries.append(TableEntry(next_id, KEYWORD, kw))
        next_id += 1
    for sym in C_SYMBOLS:
        entries.append(TableEntry(next_id, SYMBOL, sym))
        next_id += 1
    for group in (NUMBER, STRING, CHAR):
        entries.append(TableEntry(next_id, group, _CATCHALL_LEXEME))
        next_id += 1
    for fn in RISKY_FUNCTIONS:
        entries.append(TableEntry(next_id, FUNCTION, fn))
        next_id += 1
    entries.append(TableEntry(next_id, IDENTIFIER, _CATCHALL_LEXEME))
    return TokenTable(entries)


def load_token_table(path) -> TokenTable:
    """Parse a table file: one `<id> <GROUP> <lexeme-or-*>` entry per line."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise TableFormatError(f"{path}:{lineno}: expected '<id> <GROUP> <lexeme>'")
            try:
                token_id = int(parts[0])
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: bad token id {parts[0]!r}") from None
            entries.append(TableEntry(token_id, parts[1], parts[2]))
    return TokenTable(entries)


def save_token_table(table: TokenTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(table.to_text())


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(
    r"(?:0[xX][0-9a-fA-F]+|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)[uUlLfF]*"
)
_STRING_RE = re.compile(r'"(?:[^"\\\n]|\\(?:.|\n))*"')
_CHAR_RE = re.compile(r"'(?:[^'\\\n]|\\(?:.|\n))+'")
_WS = " \t\r\f\v"


def _skip_block_comment(text: str, i: int) -> int:
    """i points at '/' of an opening '/*'; returns index past '*/'."""
    end = text.find("*/", i + 2)
    if end < 0:
        raise UnterminatedCommentError(i)
    return end + 2


def _skip_directive(text: str, i: int) -> int:
    """i points at '#'; returns index of the terminating newline (or EOF).

    Handles backslash continuations, comments, and quoted filenames so a
    brace or quote inside a directive never leaks into tokenization.
    """
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] == "\n":
            i += 2
        elif c == "\n":
            return i
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            i = _skip_block_comment(text, i)
        elif c == "/" and i + 1 < n and text[i + 1] == "/":
            i = text.find("\n", i)
            return n if i < 0 else i
        elif c in "\"'":
            quote = c
            i += 1
            while i < n and text[i] not in (quote, "\n"):
                i += 2 if text[i] == "\\" else 1
            if i < n and text[i] == quote:
                i += 1
        else:
            i += 1
    return n


def tokenize(
    function_text: str,
    table: Optional[TokenTable] = None,
    diagnostics: Optional[list[str]] = None,
) -> list[Token]:
    """Lex one function's text into vocabulary tokens.

    Comments and preprocessor lines are stripped.  Maximal munch applies,
    so a numeric literal or a two-character operator is always a single
    token.  Unknown bytes are skipped; a note per skip is appended to
    `diagnostics` when a list is supplied.
    """
    if table is None:
        table = default_token_table()
    tokens: list[Token] = []
    text = function_text
    n = len(text)
    number_id = table.catchall(NUMBER).token_id
    string_id = table.catchall(STRING).token_id
    char_id = table.catchall(CHAR).token_id
    ident_id = table.catchall(IDENTIFIER).token_id
    i = 0
    bol = True  # only whitespace seen since the last newline
    while i < n:
        c = text[i]
        if c == "\n":
            bol = True
            i += 1
            continue
        if c in _WS:
            i += 1
            continue
        if c == "#" and bol:
            i = _skip_directive(text, i)
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            i = _skip_block_comment(text, i)
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            nl = text.find("\n", i)
            i = n if nl < 0 else nl
            continue
        bol = False
        if c == '"':
            m = _STRING_RE.match(text, i)
            if not m:
                raise UnterminatedStringError(i)
            tokens.append(Token(string_id, STRING, m.group(), i))
            i = m.end()
            continue
        if c == "'":
            m = _CHAR_RE.match(text, i)
            if not m:
                raise UnterminatedStringError(i)
            tokens.append(Token(char_id, CHAR, m.group(), i))
            i = m.end()
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            tokens.append(Token(number_id, NUMBER, m.group(), i))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            m = _IDENT_RE.match(text, i)
            word = m.group()
            entry = table.entry_for_lexeme(word)
            if entry is not None:
                tokens.append(Token(entry.token_id, entry.group, word, i))
            else:
                tokens.append(Token(ident_id, IDENTIFIER, word, i))
            i = m.end()
            continue
        pair = text[i : i + 2]
        if pair in table._sym2:
            entry = table.entry_for_lexeme(pair)
            tokens.append(Token(entry.token_id, SYMBOL, pair, i))
            i += 2
            continue
        if c in table._sym1:
            entry = table.entry_for_lexeme(c)
            tokens.append(Token(entry.token_id, SYMBOL, c, i))
            i += 1
            continue
        if diagnostics is not None:
            diagnostics.append(f"skipped unknown byte {c!r} at offset {i}")
        i += 1
    return tokens


def mask_non_code(text: str) -> str:
    """Blank out comments, literal contents, and preprocessor lines.

    The result has the same length as the input with every masked
    character replaced by a space (newlines are preserved), so offsets
    remain valid for brace matching.  Unterminated constructs are masked
    to the end of line/file rather than raised, because extraction must
    survive dirty input.
    """
    out = list(text)
    n = len(text)

    def blank(a: int, b: int) -> None:
        for j in range(a, b):
            if out[j] != "\n":
                out[j] = " "

    i = 0
    bol = True
    while i < n:
        c = text[i]
        if c == "\n":
            bol = True
            i += 1
            continue
        if c in _WS:
            i += 1
            continue
        if c == "#" and bol:
            end = _skip_directive(text, i)
            blank(i, end)
            i = end
            continue
        bol = False
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            end = n if end < 0 else end + 2
            blank(i, end)
            i = end
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            end = text.find("\n", i)
            end = n if end < 0 else end
            blank(i, end)
            i = end
            continue
        if c in "\"'":
            quote = c
            j = i + 1
            while j < n and text[j] not in (quote, "\n"):
                j += 2 if text[j] == "\\" else 1
            end = j + 1 if j < n and text[j] == quote else min(j + 1, n)
            blank(i, end)
            i = end
            continue
        i += 1
    return "".join(out)


_SIG_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(")
_NOT_FUNCTION_NAMES = frozenset(
    {"if", "for", "while", "switch", "do", "else", "return", "sizeof", "case"}
)


def _brace_depths(masked: str) -> list[int]:
    """depth[i] = brace nesting level just before masked[i] (floored at 0)."""
    depths = [0] * (len(masked) + 1)
    d = 0
    for i, c in enumerate(masked):
        depths[i] = d
        if c == "{":
            d += 1
        elif c == "}":
            d = max(0, d - 1)
    depths[len(masked)] = d
    return depths


def extract_functions(source_text: str) -> list[FunctionSpan]:
    """Locate top-level function definitions by signature + brace matching.

    Comments, literal contents, and preprocessor lines are ignored during
    matching.  Raises UnbalancedBracesError if the file ends inside a
    function body.
    """
    masked = mask_non_code(source_text)
    depths = _brace_depths(masked)
    n = len(masked)
    spans: list[FunctionSpan] = []
    last_end = 0
    pos = 0
    while True:
        m = _SIG_RE.search(masked, pos)
        if m is None:
            break
        name = m.group(1)
        name_start = m.start(1)
        if name in _NOT_FUNCTION_NAMES or depths[name_start] != 0 or name_start < last_end:
            pos = m.end()
            continue
        # Find the ')' matching the signature's '('.
        j = m.end() - 1
        pdepth = 1
        k = j + 1
        while k < n and pdepth > 0:
            if masked[k] == "(":
                pdepth += 1
            elif masked[k] == ")":
                pdepth -= 1
            k += 1
        if pdepth != 0:
            pos = m.end()
            continue
        t = k
        while t < n and masked[t].isspace():
            t += 1
        if t >= n or masked[t] != "{":
            pos = m.end()
            continue
        # Find the '}' closing the body.
        bdepth = 0
        e = t
        while e < n:
            if masked[e] == "{":
                bdepth += 1
            elif masked[e] == "}":
                bdepth -= 1
                if bdepth == 0:
                    break
            e += 1
        if e >= n:
            raise UnbalancedBracesError(t)
        # Walk back over the return type / qualifiers to the span start.
        s = name_start
        while s > last_end and masked[s - 1] not in ";}{":
            s -= 1
        while s < name_start and masked[s].isspace():
            s += 1
        spans.append(FunctionSpan(name, s, e + 1, source_text[s : e + 1]))
        last_end = e + 1
        pos = e + 1
    return spans
