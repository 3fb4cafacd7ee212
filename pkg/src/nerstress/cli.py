"""Command line interface.

Subcommands: perturb, score, merge, stats, baseline, run.  Machine-readable
output (JSON or CoNLL) goes to stdout or the named file; diagnostics go to
stderr.  Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attacks import AttackConfig, QWERTY, apply_attack, AlignmentRecord, load_layout
from .baseline import dump_gazetteer, tag, train_gazetteer
from .corpus import corpus_stats, parse_conll, serialize_conll
from .errors import NerstressError
from .evaluation import EvalReport, confusion, degradation, score
from .lexicon import load_lexicon
from .pipeline import load_manifest, merge_training, normalize_attack, run_experiment
from .selection import SelectionPolicy, load_vocabulary
from . import tables

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for data
    # errors, so remap usage problems to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, content: str) -> None:
    Path(path).write_text(content, encoding="utf-8", newline="\n")


def _emit_json(data: dict, path: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _write(path, text)


def _emit_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _write(path, text)


def _build_policy(args) -> SelectionPolicy:
    vocabulary = None
    if args.policy in ("vocabulary", "union"):
        vocabulary = (
            load_vocabulary(_read(args.vocab)) if args.vocab is not None else frozenset()
        )
    elif args.vocab is not None:
        raise _UsageError(f"--vocab is only meaningful with --policy vocabulary or union")
    return SelectionPolicy(args.policy, vocabulary, args.min_word_length)


def _cmd_perturb(args) -> int:
    attack = normalize_attack(args.attack)
    corpus = parse_conll(_read(args.input), name=args.input, strict=not args.lenient)
    if attack == "synonym":
        if args.lexicon is None:
            raise _UsageError("--attack synonym requires --lexicon")
        config = AttackConfig(kind="synonym", seed=args.seed, lexicon=load_lexicon(_read(args.lexicon)))
        for warning in config.lexicon.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    else:
        layout = load_layout(_read(args.layout)) if args.layout is not None else QWERTY
        config = AttackConfig(
            kind=attack, seed=args.seed, policy=_build_policy(args), layout=layout
        )
    perturbed, alignment = apply_attack(corpus, config)
    _write(args.output, serialize_conll(perturbed))
    alignment_path = args.alignment or f"{args.output}.alignment.json"
    _emit_json(alignment.to_dict(), alignment_path)
    stats = corpus_stats(corpus, perturbed, alignment)
    if args.table:
        _emit_text(tables.format_stats(stats) + "\n", args.stats)
    else:
        _emit_json(stats.to_dict(), args.stats)
    return EXIT_OK


def _cmd_score(args) -> int:
    gold = parse_conll(_read(args.gold), name=args.gold)
    pred = parse_conll(_read(args.pred), name=args.pred, strict=False)
    report = score(gold, pred)
    matrix = None
    if args.confusion or args.per_type_confusion:
        matrix = confusion(gold, pred, per_type=args.per_type_confusion)
    drop = None
    if args.baseline_report is not None:
        original = EvalReport.from_dict(json.loads(_read(args.baseline_report)))
        drop = degradation(original, report)
    if args.table:
        parts = [tables.format_eval_report(report)]
        if matrix is not None:
            parts.append(tables.format_confusion(matrix))
        if drop is not None:
            parts.append(tables.format_degradation(drop))
        _emit_text("\n\n".join(parts) + "\n", args.output)
    else:
        data = report.to_dict()
        if matrix is not None:
            data["confusion"] = matrix.to_dict()
        if drop is not None:
            data["degradation"] = drop.to_dict()
        _emit_json(data, args.output)
    return EXIT_OK


def _cmd_merge(args) -> int:
    first = parse_conll(_read(args.first), name=args.first)
    second = parse_conll(_read(args.second), name=args.second)
    merged = merge_training(first, second, args.seed)
    _write(args.output, serialize_conll(merged))
    return EXIT_OK


def _cmd_stats(args) -> int:
    original = parse_conll(_read(args.original), name=args.original, strict=False)
    perturbed = parse_conll(_read(args.perturbed), name=args.perturbed, strict=False)
    alignment = None
    if args.alignment is not None:
        alignment = AlignmentRecord.from_dict(json.loads(_read(args.alignment)))
    stats = corpus_stats(original, perturbed, alignment)
    if args.table:
        _emit_text(tables.format_stats(stats) + "\n", args.output)
    else:
        _emit_json(stats.to_dict(), args.output)
    return EXIT_OK


def _cmd_baseline(args) -> int:
    train = parse_conll(_read(args.train), name=args.train)
    test = parse_conll(_read(args.test), name=args.test)
    gazetteer = train_gazetteer(train)
    predictions = tag(gazetteer, test)
    report = score(test, predictions)
    if args.predictions is not None:
        _write(args.predictions, serialize_conll(predictions))
    if args.gazetteer is not None:
        _write(args.gazetteer, dump_gazetteer(gazetteer))
    if args.table:
        _emit_text(tables.format_eval_report(report) + "\n", args.output)
    else:
        _emit_json(report.to_dict(), args.output)
    return EXIT_OK


def _cmd_run(args) -> int:
    manifest = load_manifest(args.manifest)
    result = run_experiment(manifest, workers=args.workers)
    _emit_json(
        {"output_dir": result.output_dir, "artifacts": list(result.artifacts)}, args.output
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nerstress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("perturb", help="write an attacked variant of a corpus")
    p.add_argument("input", help="CoNLL corpus to perturb")
    p.add_argument("output", help="where to write the perturbed corpus")
    p.add_argument("--attack", required=True, help="k/keyboard, w/swap, or s/synonym")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    p.add_argument(
        "--policy",
        choices=["entity_only", "vocabulary", "content_words", "union"],
        default="union",
        help="token selection policy for keyboard/swap (default union)",
    )
    p.add_argument("--vocab", help="vocabulary file, one lowercased term per line")
    p.add_argument("--min-word-length", type=int, default=3, help="selection length floor")
    p.add_argument("--lexicon", help="synonym lexicon (tab-separated), required for s")
    p.add_argument("--layout", help="JSON keyboard layout overriding built-in QWERTY")
    p.add_argument("--alignment", help="alignment output path (default OUTPUT.alignment.json)")
    p.add_argument("--stats", help="stats output path (default stdout)")
    p.add_argument("--lenient", action="store_true", help="accept orphan I- labels in the input")
    p.add_argument("--table", action="store_true", help="human-readable stats instead of JSON")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("score", help="exact-span P/R/F1 of predictions against gold")
    p.add_argument("gold", help="gold corpus (strict IOB2)")
    p.add_argument("pred", help="predicted corpus (lenient IOB2)")
    p.add_argument("--confusion", action="store_true", help="include a B/I/O confusion matrix")
    p.add_argument(
        "--per-type-confusion", action="store_true", help="confusion over full labels instead"
    )
    p.add_argument(
        "--baseline-report",
        help="prior score report (JSON); adds degradation relative to it",
    )
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--table", action="store_true", help="human-readable table instead of JSON")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("merge", help="deterministically shuffle two corpora together")
    p.add_argument("first", help="first corpus (typically the original training set)")
    p.add_argument("second", help="second corpus (typically an attacked variant)")
    p.add_argument("output", help="where to write the merged corpus")
    p.add_argument("--seed", type=int, default=0, help="shuffle seed")
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("stats", help="summarize a perturbation against its original")
    p.add_argument("original", help="original corpus")
    p.add_argument("perturbed", help="perturbed corpus")
    p.add_argument("--alignment", help="alignment record, required when token counts differ")
    p.add_argument("--output", help="write the stats here instead of stdout")
    p.add_argument("--table", action="store_true", help="human-readable table instead of JSON")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("baseline", help="train the gazetteer baseline and score it")
    p.add_argument("train", help="training corpus (strict IOB2)")
    p.add_argument("test", help="test corpus (strict IOB2)")
    p.add_argument("--predictions", help="write the tagged test corpus here")
    p.add_argument("--gazetteer", help="dump the trained gazetteer here (tab-separated)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--table", action="store_true", help="human-readable table instead of JSON")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("run", help="run every condition of an experiment manifest")
    p.add_argument("manifest", help="JSON manifest file")
    p.add_argument("--workers", type=int, default=1, help="concurrent conditions")
    p.add_argument("--output", help="write the artifact index here instead of stdout")
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except NerstressError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
