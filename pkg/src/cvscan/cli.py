"""Command-line interface.

Exit codes are stable for CI use: 0 success (and no findings for scan),
1 scan findings exist, 2 usage or operational error.  Subcommands with
randomness all require --seed.  The token table defaults to the built-in
91-entry one; --table or the CVSCAN_TOKEN_TABLE environment variable
substitute a compatible file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import dataset as ds
from . import evaluation as ev
from . import scanner
from .encoding import encode_tokens, format_matrix
from .errors import CvscanError, TableMismatchError
from .lexer import TokenTable, default_token_table, extract_functions, load_token_table, tokenize
from .nn.model import ModelConfig, init_model, load_model, save_model
from .nn.train import TrainConfig, train

TABLE_ENV_VAR = "CVSCAN_TOKEN_TABLE"


def _active_table(args) -> TokenTable:
    path = getattr(args, "table", None) or os.environ.get(TABLE_ENV_VAR)
    if path:
        return load_token_table(path)
    return default_token_table()


def _active_cwe_map(args) -> Optional[ds.CweMap]:
    path = getattr(args, "cwe_map", None)
    if path:
        return ds.load_cwe_map(path)
    return None


def _emit_corpus_summary(args, corpus: ds.Corpus, output: str, skipped: int = 0) -> None:
    counts = {label.name: n for label, n in corpus.label_counts().items()}
    if args.format == "json":
        print(json.dumps(
            {"output": output, "samples": len(corpus), "label_counts": counts,
             "skipped": skipped},
            sort_keys=True,
        ))
    else:
        parts = ", ".join(f"{name} {n}" for name, n in counts.items())
        print(f"wrote {len(corpus)} samples to {output} ({parts})")
        if skipped:
            print(f"skipped {skipped} malformed records", file=sys.stderr)


def _cmd_tokenize(args) -> int:
    table = _active_table(args)
    with open(args.file, "r", encoding="utf-8", errors="replace") as fh:
        text = fh.read()
    spans = extract_functions(text)
    for span in spans:
        ids = [t.token_id for t in tokenize(span.text, table)]
        if args.encoded:
            enc = encode_tokens(ids)
            sys.stdout.write(format_matrix(enc, name=span.name))
        elif args.format == "json":
            print(json.dumps(
                {"name": span.name, "start_byte": span.start_byte,
                 "end_byte": span.end_byte, "tokens": ids},
                sort_keys=True,
            ))
        else:
            print(span.name + " " + " ".join(str(i) for i in ids))
    return 0


def _cmd_ingest(args) -> int:
    table = _active_table(args)
    diagnostics: list[str] = []
    corpus = ds.ingest(args.input, table, _active_cwe_map(args), diagnostics)
    ds.save_corpus(corpus, args.output)
    for note in diagnostics:
        print(note, file=sys.stderr)
    _emit_corpus_summary(args, corpus, args.output, skipped=len(diagnostics))
    return 0


def _cmd_dedup(args) -> int:
    table = _active_table(args)
    corpus = ds.ingest(args.input, table)
    deduped = ds.deduplicate(corpus)
    ds.save_corpus(deduped, args.output)
    _emit_corpus_summary(args, deduped, args.output)
    return 0


def _cmd_balance(args) -> int:
    table = _active_table(args)
    corpus = ds.ingest(args.input, table)
    balanced = ds.balance(corpus, args.target, seed=args.seed)
    ds.save_corpus(balanced, args.output)
    _emit_corpus_summary(args, balanced, args.output)
    return 0


def _cmd_split(args) -> int:
    table = _active_table(args)
    corpus = ds.ingest(args.input, table)
    train_part, test_part = ds.split(corpus, args.fraction, seed=args.seed)
    ds.save_corpus(train_part, args.train_out)
    ds.save_corpus(test_part, args.test_out)
    if args.format == "json":
        print(json.dumps(
            {"train_out": args.train_out, "train_samples": len(train_part),
             "test_out": args.test_out, "test_samples": len(test_part)},
            sort_keys=True,
        ))
    else:
        print(f"wrote {len(train_part)} samples to {args.train_out}, "
              f"{len(test_part)} to {args.test_out}")
    return 0


def _cmd_synth(args) -> int:
    table = _active_table(args)
    corpus = ds.generate_synthetic_corpus(args.n, args.seed, table)
    ds.save_corpus(corpus, args.output)
    _emit_corpus_summary(args, corpus, args.output)
    return 0


def _cmd_train(args) -> int:
    table = _active_table(args)
    corpus = ds.ingest(args.input, table)
    model = init_model(ModelConfig(), seed=args.seed, table_fingerprint=corpus.table_fingerprint)
    tc = TrainConfig(
        epochs=args.epochs,
        seed=args.seed,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
    )
    trained, history = train(model, corpus, tc)
    save_model(trained, args.output)
    if args.format == "json":
        print(json.dumps(
            {"model": args.output, "samples": len(corpus),
             "epochs": [
                 {"epoch": m.epoch, "loss": m.loss, "accuracy": m.accuracy}
                 for m in history
             ]},
            sort_keys=True,
        ))
    else:
        for m in history:
            print(f"epoch {m.epoch:3d}  loss {m.loss:.4f}  accuracy {m.accuracy:.4f}")
        print(f"wrote model to {args.output}")
    return 0


def _cmd_eval(args) -> int:
    table = _active_table(args)
    model = load_model(args.model)
    if model.table_fingerprint and model.table_fingerprint != table.fingerprint():
        raise TableMismatchError(
            "the active token table does not match the one the model was trained with"
        )
    corpus = ds.ingest(args.input, table)
    curves, skipped = ev.pr_curves_per_class(model, corpus)
    matrix, abstained = ev.confusion_matrix(model, corpus, args.threshold)
    label_names = [label.name for label in ds.LABELS]
    if args.format == "json":
        print(json.dumps(
            {
                "curves": {
                    label.name: {
                        "auc": curve.auc,
                        "points": [[p.threshold, p.precision, p.recall] for p in curve.points],
                    }
                    for label, curve in curves.items()
                },
                "skipped": [label.name for label in skipped],
                "labels": label_names,
                "threshold": args.threshold,
                "confusion": matrix.tolist(),
                "abstained": abstained,
                "macro_accuracy": ev.macro_accuracy(matrix),
            },
            sort_keys=True,
        ))
        return 0
    print("# PR points: class\tthreshold\tprecision\trecall")
    for label, curve in curves.items():
        for p in curve.points:
            print(f"{label.name}\t{p.threshold:.6f}\t{p.precision:.6f}\t{p.recall:.6f}")
    print("# AUC per class")
    for label, curve in curves.items():
        print(f"{label.name}\t{curve.auc:.6f}")
    for label in skipped:
        print(f"# skipped {label.name}: no positives in the test corpus")
    print(f"# confusion matrix at threshold {args.threshold} "
          f"(rows true, cols predicted; order {' '.join(label_names)})")
    for row in matrix:
        print("\t".join(str(int(v)) for v in row))
    print(f"# abstained: {abstained}")
    print(f"# macro accuracy (classified samples): {ev.macro_accuracy(matrix):.6f}")
    return 0


def _cmd_scan(args) -> int:
    table = _active_table(args)
    findings, summary = scanner.scan(args.paths, args.model, args.threshold, table)
    if args.format == "json":
        for f in findings:
            print(json.dumps(
                {"file": f.file, "function": f.function_name,
                 "start_byte": f.start_byte, "end_byte": f.end_byte,
                 "label": f.label.name, "confidence": f.confidence,
                 "truncated": f.truncated},
                sort_keys=True,
            ))
        print(json.dumps(
            {"files_scanned": summary.files_scanned,
             "files_skipped": summary.files_skipped,
             "functions_analyzed": summary.functions_analyzed,
             "findings_by_label": summary.findings_by_label},
            sort_keys=True,
        ), file=sys.stderr)
    else:
        for f in findings:
            flag = " [truncated]" if f.truncated else ""
            print(f"{f.file}:{f.start_byte}-{f.end_byte} {f.function_name} "
                  f"{f.label.name} confidence {f.confidence:.3f}{flag}")
        per_label = ", ".join(f"{k} {v}" for k, v in summary.findings_by_label.items())
        # Summary on stderr in both formats: stdout carries findings only.
        print(f"scanned {summary.files_scanned} files "
              f"({summary.files_skipped} skipped), "
              f"{summary.functions_analyzed} functions; findings: {per_label}",
              file=sys.stderr)
    return 1 if findings else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvscan",
        description="ML-based vulnerability scanning for C functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, table=True):
        if table:
            p.add_argument("--table", help="token table file (overrides the built-in table)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("tokenize", help="extract and tokenize functions from a C file")
    p.add_argument("file")
    p.add_argument("--encoded", action="store_true",
                   help="dump the 500x8 bit matrix per function instead of token ids")
    add_common(p)
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("ingest", help="normalize a record file into a corpus")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--cwe-map", help="CWE mapping file (overrides the built-in mapping)")
    add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("dedup", help="drop samples with duplicate token sequences")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_dedup)

    p = sub.add_parser("balance", help="duplicate buggy samples toward a target fraction")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--target", type=float, default=0.5,
                   help="target buggy fraction (default 0.5)")
    add_common(p)
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser("split", help="seeded train/test split, duplicates kept together")
    p.add_argument("input")
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--n", type=int, required=True, help="samples per class")
    p.add_argument("--seed", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a model on a corpus")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="PR curves, AUC, and confusion matrix on a corpus")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--threshold", type=float, default=scanner.DEFAULT_THRESHOLD)
    add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("scan", help="scan C sources and report flagged functions")
    p.add_argument("model")
    p.add_argument("paths", nargs="+")
    p.add_argument("--threshold", type=float, default=scanner.DEFAULT_THRESHOLD)
    add_common(p)
    p.set_defaults(func=_cmd_scan)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except CvscanError as exc:
        print(f"cvscan: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cvscan: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))
