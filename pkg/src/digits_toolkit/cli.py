"""``digits-toolkit`` command line.

Exit codes: 0 success, 1 domain error (bad input data), 2 usage error.
Data goes to stdout or files, diagnostics to stderr. ``--manifest`` switches
any subcommand's stdout to a single JSON document.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import curation, evaluation, grammar, model_spec
from .audio import AudioError
from .constrained_decode import DEFAULT_MAX_DISTANCE, constrained_text

log = logging.getLogger("digits_toolkit")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _nonneg(value):
    x = float(value)
    if not x >= 0 or math.isnan(x):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return x


def _ratio(value):
    x = float(value)
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"must be strictly between 0 and 1, got {value}")
    return x


def _length(value):
    n = int(value)
    if not 1 <= n <= grammar.MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"must be in 1..{grammar.MAX_DIGITS}, got {value}")
    return n


def _policy(args) -> grammar.ParsePolicy:
    return grammar.ParsePolicy(expected_length=args.expected_length, allow_and=not args.no_and)


def _emit(args, out, text: str, payload) -> None:
    if args.manifest:
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        out.write(text)


def _read_lines(path):
    if path == "-":
        return sys.stdin.read().splitlines()
    return Path(path).read_text(encoding="utf-8").splitlines()


# ---------------------------------------------------------------------------
# subcommands

def cmd_verbalize(args, out):
    if args.vocab:
        _emit(args, out, grammar.vocabulary_text(), [t.value for t in grammar.VOCABULARY])
        return
    if not args.digits:
        raise UsageError("verbalize: digits required unless --vocab")
    d = grammar.validate_digits(args.digits)
    if args.style == "all":
        seqs = grammar.sorted_verbalizations(d)
    else:
        seqs = [grammar.canonical_verbalization(d, args.style)]
    _emit(args, out, "".join(grammar.to_text(s) + "\n" for s in seqs),
          {"digits": d, "verbalizations": [grammar.to_text(s) for s in seqs]})


def cmd_parse(args, out):
    text = " ".join(args.text)
    tokens = grammar.tokenize(text)
    digits = grammar.parse(tokens, _policy(args))
    _emit(args, out, "".join(d + "\n" for d in digits),
          {"tokens": grammar.to_text(tokens), "digits": digits})
    if not digits:
        log.error("no digit reading for %r", text)
        raise SystemExit(EXIT_DOMAIN)


def cmd_score(args, out):
    if len(args.files) == 1:
        records = evaluation.read_scoring_lines(_read_lines(args.files[0]))
    elif len(args.files) == 2:
        refs = evaluation.read_two_column(_read_lines(args.files[0]))
        hyps = evaluation.read_two_column(_read_lines(args.files[1]))
        records = evaluation.join_refs_hyps(refs, hyps)
    else:
        raise UsageError("score: expects SCORING_TSV or REFS_TSV HYPS_TSV")
    result = evaluation.score_records(records)
    text = result.summary()
    if args.per_utterance:
        text += "".join(f"{u}\t{r.summary_line()}\n" for u, r in result.per_utterance.items())
    _emit(args, out, text, result.as_dict())


def cmd_rtf(args, out):
    if args.timing:
        rows = evaluation.read_timing_lines(_read_lines(args.timing))
        total = evaluation.corpus_rtf(r for _, r in rows)
    elif args.time is not None and args.duration is not None:
        rows = []
        total = evaluation.rtf(args.time, args.duration)
    else:
        raise UsageError("rtf: give TIMING_TSV or both --time and --duration")
    text = "".join(f"{u}\t{r.rtf:.5g}\n" for u, r in rows) + total.summary_line() + "\n"
    _emit(args, out, text, {
        "utterances": {u: r.rtf for u, r in rows},
        "rtf": total.rtf, "T": total.transcribe_time, "D": total.audio_duration,
        "realtime": total.realtime,
    })


def cmd_snap(args, out):
    lines = _read_lines(args.input)
    rows = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        utt_id, sep, hyp = line.partition("\t")
        if not sep:
            raise evaluation.ScoringError(f"line {lineno}: expected utt_id<TAB>hypothesis")
        result = constrained_text(hyp, args.max_distance, _policy(args))
        rows.append((utt_id, result))
    text = "".join(f"{u}\t{r.best or ''}\t{r.total_distance}\n" for u, r in rows)
    _emit(args, out, text, [
        {"utt_id": u, "digits": list(r.digits), "snapped": grammar.to_text(r.snapped),
         "total_distance": r.total_distance, "dropped": [list(d) for d in r.dropped]}
        for u, r in rows
    ])


def cmd_netspec(args, out):
    spec = model_spec.build_network(args.name, args.num_targets)
    count = model_spec.param_count(spec)
    text = model_spec.emit_config(spec)
    if args.count:
        text = f"{spec.name}\t{count}\t{model_spec.COUNT_CONVENTION}\n"
    _emit(args, out, text, {
        "name": spec.name, "param_count": count, "convention": model_spec.COUNT_CONVENTION,
        "config": model_spec.emit_config(spec),
    })


def _manifest_payload(m: curation.Manifest):
    return [e.__dict__ for e in m.entries]


def cmd_curate(args, out):
    docs = [curation.load_word_stamp_file(p, epsilon=args.epsilon) for p in args.alignments]
    result = curation.curate(
        docs, args.out, max_gap=args.max_gap, boundary_pad=args.boundary_pad,
        lead=args.lead, trail=args.trail, ratio=args.ratio, seed=args.seed,
        per_source=args.per_source, require_parse=args.require_parse,
    )
    text = (f"clips {len(result.corpus)} train {len(result.train)} test {len(result.test)}"
            f" out {args.out}\n")
    _emit(args, out, text, {
        "corpus": _manifest_payload(result.corpus),
        "train": [e.utt_id for e in result.train.entries],
        "test": [e.utt_id for e in result.test.entries],
    })


def cmd_split(args, out):
    manifest = curation.read_data_dir(args.data_dir)
    train, test = curation.split_train_test(
        manifest, args.ratio, args.seed, (lambda e: e.speaker) if args.per_source else None)
    curation.write_data_dir(train, Path(args.out) / "train")
    curation.write_data_dir(test, Path(args.out) / "test")
    _emit(args, out, f"train {len(train)} test {len(test)}\n",
          {"train": [e.utt_id for e in train.entries], "test": [e.utt_id for e in test.entries]})


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--manifest", action="store_true", help="write JSON to stdout")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parse_opts = _Parser(add_help=False)
    parse_opts.add_argument("--expected-length", type=_length)
    parse_opts.add_argument("--no-and", action="store_true", help="reject sequences containing 'and'")

    split_opts = _Parser(add_help=False)
    split_opts.add_argument("--ratio", type=_ratio, default=0.9)
    split_opts.add_argument("--seed", type=int, default=0)
    split_opts.add_argument("--per-source", action="store_true",
                            help="apply the ratio within each source instead of globally")

    p = _Parser(prog="digits-toolkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verbalize", parents=[common], help="list readings of a digit string")
    s.add_argument("digits", nargs="?")
    s.add_argument("--style", choices=("all", "digit_by_digit", "compact"), default="all")
    s.add_argument("--vocab", action="store_true", help="print the 33-token vocabulary")
    s.set_defaults(func=cmd_verbalize)

    s = sub.add_parser("parse", parents=[common, parse_opts], help="spoken words to digit strings")
    s.add_argument("text", nargs="+")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("score", parents=[common], help="WER with the per-length error breakdown")
    s.add_argument("files", nargs="+", metavar="TSV")
    s.add_argument("--per-utterance", action="store_true")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("rtf", parents=[common], help="real-time factor")
    s.add_argument("timing", nargs="?", metavar="TIMING_TSV")
    s.add_argument("--time", type=_nonneg)
    s.add_argument("--duration", type=float)
    s.set_defaults(func=cmd_rtf)

    s = sub.add_parser("snap", parents=[common, parse_opts], help="constrain hypotheses to the vocabulary")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--max-distance", type=int, default=DEFAULT_MAX_DISTANCE)
    s.set_defaults(func=cmd_snap)

    s = sub.add_parser("netspec", parents=[common], help="emit a network config")
    s.add_argument("name", choices=("dense", "light"))
    s.add_argument("--num-targets", type=int, default=model_spec.DEFAULT_NUM_TARGETS)
    s.add_argument("--count", action="store_true", help="print the parameter estimate only")
    s.set_defaults(func=cmd_netspec)

    s = sub.add_parser("curate", parents=[common, split_opts], help="build a clip corpus")
    s.add_argument("alignments", nargs="+", metavar="JSON",
                   help="word-timestamp files; audio is the same-stem .wav or the document's audio_path")
    s.add_argument("--out", required=True)
    s.add_argument("--max-gap", type=_nonneg, default=math.inf)
    s.add_argument("--boundary-pad", type=_nonneg, default=0.0)
    s.add_argument("--lead", type=_nonneg, default=1.0)
    s.add_argument("--trail", type=_nonneg, default=1.0)
    s.add_argument("--epsilon", type=_nonneg, default=0.01)
    s.add_argument("--require-parse", action="store_true")
    s.set_defaults(func=cmd_curate)

    s = sub.add_parser("split", parents=[common, split_opts], help="split a data directory")
    s.add_argument("data_dir")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_split)
    return p


DOMAIN_ERRORS = (
    grammar.GrammarError, evaluation.ScoringError, curation.CurationError,
    model_spec.ConfigError, model_spec.UnknownName, AudioError, OSError,
)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args, stdout)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as e:
        return int(e.code or 0)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
