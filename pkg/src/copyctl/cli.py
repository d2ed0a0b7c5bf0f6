"""Command-line entry point: ``copyctl <subcommand> ...``.

Exit codes: 0 on success, 2 for bad input or flags, 3 when an internal
invariant is violated.
"""

from __future__ import annotations

import argparse
import glob
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import load_parallel, read_lines, tokenize
from .decoder import PenaltyConfig, decode_corpus, penalty_sweep
from .exceptions import CopyctlError, InputError
from .metrics import (
    bucket_by_pos,
    copy_stats,
    corpus_bleu,
    count_high_overlap,
    group_by_key,
    learning_curve,
)
from .report import STATS_COLUMNS, fixed, stats_record, to_json, to_tsv
from .toymodel import build_lexicon

logger = logging.getLogger("copyctl")

DEFAULT_ALPHAS = "0.5,0.7,1.0,1.5,2.0"
THREADS_ENV = "COPYCTL_THREADS"


def positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def fraction(text):
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def alpha_list(text):
    try:
        values = [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if not values or any(not a > 0 for a in values):
        raise argparse.ArgumentTypeError("alphas must be positive")
    return values


def threads_from_env():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lowercase", action="store_true", help="match words case-insensitively")
    common.add_argument("--merge-subwords", action="store_true", help="merge @@ / ▁ subword pieces into words")
    common.add_argument(
        "--keep-punct-denominator",
        action="store_true",
        help="count punctuation in the ratio denominator",
    )
    common.add_argument("--format", choices=["json", "tsv"], default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    decoding = argparse.ArgumentParser(add_help=False)
    decoding.add_argument("lexicon", help="lexicon file for the toy scoring model")
    decoding.add_argument("src")
    decoding.add_argument("--beam", type=positive_int, default=5)
    decoding.add_argument("--length-exp", type=float, default=0.0)
    decoding.add_argument("--max-len", type=positive_int, default=200)
    decoding.add_argument("--oracle", action="store_true", help="exhaustive search instead of beam search")

    parser = argparse.ArgumentParser(prog="copyctl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="copying ratio, CER, #S and BLEU")
    p.add_argument("src")
    p.add_argument("hyp")
    p.add_argument("ref", nargs="?")
    p.add_argument("--threshold", type=fraction, default=0.5, help="overlap threshold for #S")

    p = sub.add_parser("curve", parents=[common], help="ratio/CER per checkpoint output")
    p.add_argument("src")
    p.add_argument("ref")
    p.add_argument("hyps", nargs="+", help="hypothesis files or glob patterns, in checkpoint order")

    p = sub.add_parser("pos", parents=[common], help="ratio/CER* per POS bucket")
    p.add_argument("src")
    p.add_argument("hyp")
    p.add_argument("ref")
    p.add_argument("pos")
    p.add_argument("--tagmap", help="TSV file mapping tag -> bucket")

    p = sub.add_parser("group", parents=[common], help="ratio/CER per metadata value")
    p.add_argument("src")
    p.add_argument("hyp")
    p.add_argument("ref")
    p.add_argument("meta")
    p.add_argument("--key", required=True)

    p = sub.add_parser("decode", parents=[common, decoding], help="translate with the copying penalty")
    p.add_argument("--alpha", type=positive_float, default=1.0)
    p.add_argument("--scores", help="write per-sentence scores as TSV to this file")

    p = sub.add_parser("sweep", parents=[common, decoding], help="ratio/CER/BLEU per alpha")
    p.add_argument("ref")
    p.add_argument("--alphas", type=alpha_list, default=alpha_list(DEFAULT_ALPHAS))
    return parser


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _expand(patterns):
    paths = []
    for pat in patterns:
        if glob.has_magic(pat):
            matches = sorted(glob.glob(pat))
            if not matches:
                raise InputError(f"no files match {pat!r}")
            paths.extend(matches)
        else:
            paths.append(pat)
    return paths


def _read_tagmap(path):
    mapping = {}
    for lineno, line in enumerate(read_lines(path), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'TAG<TAB>BUCKET'")
        mapping[parts[0]] = parts[1]
    return mapping


def cmd_analyze(args) -> str:
    corpus = load_parallel(args.src, args.hyp, args.ref, merge_subwords=args.merge_subwords)
    stats = copy_stats(corpus, args.lowercase, args.keep_punct_denominator)
    record = {"name": Path(args.hyp).stem, "sentences": len(corpus), **stats_record(stats)}
    record["high_overlap"] = count_high_overlap(corpus, args.threshold, args.lowercase)
    record["threshold"] = fixed(args.threshold)
    columns = ["name", "sentences", *STATS_COLUMNS, "high_overlap", "threshold"]
    if args.ref is not None:
        record["bleu"] = fixed(
            corpus_bleu([ex.hypothesis for ex in corpus], [ex.reference for ex in corpus], lowercase=args.lowercase)
        )
        columns.append("bleu")
    if (args.format or "json") == "json":
        return to_json(record)
    return to_tsv(columns, [record])


def _table(args, label_col: str, named_stats, default_format: str) -> str:
    rows = [{label_col: name, **stats_record(stats)} for name, stats in named_stats]
    if (args.format or default_format) == "json":
        return to_json(rows)
    return to_tsv([label_col, *STATS_COLUMNS], rows)


def cmd_curve(args) -> str:
    points = learning_curve(
        args.src,
        args.ref,
        _expand(args.hyps),
        args.lowercase,
        args.keep_punct_denominator,
        args.merge_subwords,
    )
    return _table(args, "label", [(p.label, p.stats) for p in points], "tsv")


def cmd_pos(args) -> str:
    corpus = load_parallel(args.src, args.hyp, args.ref, pos_path=args.pos, merge_subwords=args.merge_subwords)
    tagmap = _read_tagmap(args.tagmap) if args.tagmap else None
    result = bucket_by_pos(corpus, tagmap, args.lowercase, args.keep_punct_denominator)
    named = [("Total", result.total), *result.buckets.items()]
    return _table(args, "bucket", named, "json")


def cmd_group(args) -> str:
    corpus = load_parallel(args.src, args.hyp, args.ref, meta_path=args.meta, merge_subwords=args.merge_subwords)
    groups = group_by_key(corpus, args.key, args.lowercase, args.keep_punct_denominator)
    return _table(args, args.key, list(groups.items()), "json")


def _decoder_inputs(args, alpha):
    config = PenaltyConfig(alpha, args.length_exp, args.beam, args.max_len)
    n_jobs = threads_from_env()
    model = build_lexicon(args.lexicon)
    sources = [tokenize(line, args.merge_subwords) for line in read_lines(args.src)]
    return config, n_jobs, model, sources


def cmd_decode(args) -> str:
    config, n_jobs, model, sources = _decoder_inputs(args, args.alpha)
    best = decode_corpus(model, sources, model.vocab, config, oracle=args.oracle, n_jobs=n_jobs)
    if args.scores:
        rows = [
            {
                "line": i,
                "raw_logprob": h.raw_logprob,
                "penalized_logprob": h.penalized_logprob,
                "copy_count": h.copy_count,
                "score": h.score,
            }
            for i, h in enumerate(best, 1)
        ]
        Path(args.scores).write_text(
            to_tsv(["line", "raw_logprob", "penalized_logprob", "copy_count", "score"], rows), encoding="utf-8"
        )
    lines = [" ".join(model.vocab.words(h.tokens)) for h in best]
    if args.format is None:
        return "".join(line + "\n" for line in lines)
    records = [
        {
            "translation": text,
            "raw_logprob": h.raw_logprob,
            "penalized_logprob": h.penalized_logprob,
            "copy_count": h.copy_count,
            "score": h.score,
        }
        for text, h in zip(lines, best)
    ]
    if args.format == "json":
        return to_json(records)
    return to_tsv(["translation", "raw_logprob", "penalized_logprob", "copy_count", "score"], records)


def cmd_sweep(args) -> str:
    config, n_jobs, model, sources = _decoder_inputs(args, 1.0)
    refs = [tokenize(line, args.merge_subwords) for line in read_lines(args.ref)]
    if len(refs) != len(sources):
        raise InputError(f"{args.ref}: has {len(refs)} lines, expected {len(sources)}")
    rows = penalty_sweep(
        model, sources, refs, model.vocab, config, args.alphas,
        oracle=args.oracle, n_jobs=n_jobs, lowercase=args.lowercase,
    )
    records = [
        {"alpha": fixed(r.alpha), "ratio": fixed(r.ratio), "cer": fixed(r.cer), "bleu": fixed(r.bleu)}
        for r in rows
    ]
    if (args.format or "tsv") == "json":
        return to_json(records)
    return to_tsv(["alpha", "ratio", "cer", "bleu"], records)


COMMANDS = {
    "analyze": cmd_analyze,
    "curve": cmd_curve,
    "pos": cmd_pos,
    "group": cmd_group,
    "decode": cmd_decode,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    logging.basicConfig(format="copyctl: %(message)s", level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except (InputError, OSError, UnicodeDecodeError) as exc:
        logger.error("error: %s", exc)
        return 2
    except (CopyctlError, ValueError, AssertionError) as exc:
        logger.error("internal error: %s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
