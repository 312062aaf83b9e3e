"""Word error rate, real-time factor and per-length error breakdown."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from . import grammar


class ScoringError(ValueError):
    pass


class EmptyReference(ScoringError):
    pass


class EmptyCorpus(ScoringError):
    pass


class ZeroDuration(ScoringError):
    pass


class UnparseableReference(ScoringError):
    pass


class OpKind(str, Enum):
    MATCH = "match"
    SUB = "sub"
    DEL = "del"
    INS = "ins"


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    ref: str | None = None
    hyp: str | None = None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]

    def _count(self, kind):
        return sum(1 for op in self.ops if op.kind is kind)

    @property
    def S(self) -> int:
        return self._count(OpKind.SUB)

    @property
    def D(self) -> int:
        return self._count(OpKind.DEL)

    @property
    def I(self) -> int:  # noqa: E743
        return self._count(OpKind.INS)

    @property
    def N(self) -> int:
        return sum(1 for op in self.ops if op.kind is not OpKind.INS)

    @property
    def edits(self) -> int:
        return sum(1 for op in self.ops if op.kind is not OpKind.MATCH)


@dataclass(frozen=True)
class WerReport:
    S: int
    D: int
    I: int  # noqa: E741
    N: int

    def __post_init__(self):
        if self.N <= 0:
            raise EmptyReference("WER needs at least one reference word")
        if min(self.S, self.D, self.I) < 0:
            raise ValueError("negative edit count")

    @property
    def errors(self) -> int:
        return self.S + self.D + self.I

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.errors, self.N)

    @property
    def wer(self) -> float:
        return float(self.ratio)

    @property
    def percent(self) -> float:
        return float(self.ratio * 100)

    def format_percent(self, places: int = 2) -> str:
        # exact decimal rounding of the rational value, half-up
        value = Decimal(self.ratio.numerator * 100) / Decimal(self.ratio.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))

    def summary_line(self) -> str:
        return f"WER {self.format_percent()} S {self.S} D {self.D} I {self.I} N {self.N}"


@dataclass(frozen=True)
class RtfReport:
    transcribe_time: float
    audio_duration: float

    @property
    def rtf(self) -> float:
        return self.transcribe_time / self.audio_duration

    @property
    def realtime(self) -> bool:
        """True when decoding is faster than the audio plays."""
        return self.rtf < 1.0

    def summary_line(self) -> str:
        flag = "" if self.realtime else " (>= real time)"
        return f"RTF {self.rtf:.5g} T {self.transcribe_time:.6g} D {self.audio_duration:.6g}{flag}"


def _as_words(tokens: Iterable) -> list[str]:
    return [t.value if isinstance(t, grammar.Token) else str(t) for t in tokens]


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Unit-cost Levenshtein distance between two sequences (strings work too)."""
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def align(ref: Sequence, hyp: Sequence) -> Alignment:
    """Minimal edit alignment of ``hyp`` against ``ref``.

    Backtrace prefers MATCH, then SUB, then DEL, then INS among equal-cost moves.
    Tokens and plain strings compare by surface form.
    """
    ref = _as_words(ref)
    hyp = _as_words(hyp)
    if not ref:
        raise EmptyReference("reference is empty")
    n, m = len(ref), len(hyp)
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        cost[i][0] = i
    for j in range(m + 1):
        cost[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost[i][j] = min(
                cost[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                cost[i - 1][j] + 1,
                cost[i][j - 1] + 1,
            )

    ops = []
    i, j = n, m
    while i or j:
        c = cost[i][j]
        if i and j and ref[i - 1] == hyp[j - 1] and c == cost[i - 1][j - 1]:
            ops.append(EditOp(OpKind.MATCH, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i and j and c == cost[i - 1][j - 1] + 1:
            ops.append(EditOp(OpKind.SUB, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i and c == cost[i - 1][j] + 1:
            ops.append(EditOp(OpKind.DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(OpKind.INS, None, hyp[j - 1]))
            j -= 1
    ops.reverse()
    return Alignment(tuple(ops))


def wer(alignment: Alignment) -> WerReport:
    return WerReport(alignment.S, alignment.D, alignment.I, alignment.N)


def score(ref: Sequence, hyp: Sequence) -> WerReport:
    return wer(align(ref, hyp))


def score_text(ref: str, hyp: str) -> WerReport:
    """Score two transcripts after the grammar's word normalization.

    Out-of-vocabulary hypothesis words are scored as raw strings.
    """
    return score(grammar.normalize_words(ref), grammar.normalize_words(hyp))


def corpus_wer(reports: Iterable[WerReport]) -> WerReport:
    """Micro-average: summed edits over summed reference words."""
    totals = Counter()
    count = 0
    for r in reports:
        totals.update(S=r.S, D=r.D, I=r.I, N=r.N)
        count += 1
    if not count:
        raise EmptyCorpus("no utterances to aggregate")
    return WerReport(totals["S"], totals["D"], totals["I"], totals["N"])


def rtf(transcribe_time: float, audio_duration: float) -> RtfReport:
    if not audio_duration > 0 or not math.isfinite(audio_duration):
        raise ZeroDuration(f"audio duration must be positive, got {audio_duration}")
    if transcribe_time < 0:
        raise ValueError(f"negative transcription time {transcribe_time}")
    return RtfReport(float(transcribe_time), float(audio_duration))


def corpus_rtf(reports: Iterable[RtfReport]) -> RtfReport:
    reports = list(reports)
    if not reports:
        raise EmptyCorpus("no timing records")
    return rtf(sum(r.transcribe_time for r in reports), sum(r.audio_duration for r in reports))


# ---------------------------------------------------------------------------
# error categories by reference length

class Category(str, Enum):
    SINGLE_DIGIT_0_9 = "single-digit (0-9)"
    TWO_DIGIT_11_99 = "two-digit (11-99)"
    MULTI_DIGIT_GT_99 = "multi-digit (>99)"


OUTCOMES = ("blank_output", "substitution_error", "exact_match", "other")


@dataclass
class ErrorBucket:
    category: Category
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def line(self) -> str:
        parts = " ".join(f"{k} {self.counts[k]}" for k in OUTCOMES)
        return f"BUCKET {self.category.name} utterances {self.total} {parts}"


def categorize_value(value: int, ten_as_two_digit: bool = True) -> Category:
    if value <= 9:
        return Category.SINGLE_DIGIT_0_9
    if value == 10 and not ten_as_two_digit:
        return Category.SINGLE_DIGIT_0_9
    if value <= 99:
        return Category.TWO_DIGIT_11_99
    return Category.MULTI_DIGIT_GT_99


def classify(ref: Sequence, hyp: Sequence) -> str:
    """One outcome label per record.

    Edits containing a substitution are ``substitution_error``; edits made of
    deletions or insertions only (a dropped "and") are ``other``.
    """
    if not hyp:
        return "blank_output"
    a = align(ref, hyp)
    if a.edits == 0:
        return "exact_match"
    return "substitution_error" if a.S else "other"


def categorize_errors(records: Iterable[tuple[Sequence, Sequence]],
                      ten_as_two_digit: bool = True) -> list[ErrorBucket]:
    buckets = {c: ErrorBucket(c) for c in Category}
    for ref, hyp in records:
        ref_tokens = _reference_tokens(ref)
        parses = grammar.parse(ref_tokens) if ref_tokens else []
        if not parses:
            raise UnparseableReference(f"reference {' '.join(_as_words(ref))!r} has no digit reading")
        category = categorize_value(int(parses[0]), ten_as_two_digit)
        buckets[category].counts[classify(ref_tokens, _as_words(hyp))] += 1
    return list(buckets.values())


def _reference_tokens(ref: Sequence) -> grammar.TokenSeq | None:
    tokens = []
    for word in _as_words(ref):
        tok = grammar.lookup(word)
        if tok is None:
            return None
        tokens.append(tok)
    return tuple(tokens)


# ---------------------------------------------------------------------------
# line-oriented I/O

@dataclass(frozen=True)
class ScoreRecord:
    utt_id: str
    reference: str
    hypothesis: str


def read_scoring_lines(lines: Iterable[str]) -> list[ScoreRecord]:
    """Parse ``utt_id<TAB>reference<TAB>hypothesis`` lines; the hypothesis may be empty."""
    records = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 2:
            fields.append("")
        if len(fields) != 3:
            raise ScoringError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        records.append(ScoreRecord(*fields))
    return records


def read_two_column(lines: Iterable[str]) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        utt_id, _, text = line.partition("\t")
        if utt_id in out:
            raise ScoringError(f"line {lineno}: duplicate utterance id {utt_id!r}")
        out[utt_id] = text
    return out


def join_refs_hyps(refs: dict[str, str], hyps: dict[str, str]) -> list[ScoreRecord]:
    """Pair references with hypotheses by id; a missing hypothesis is a blank output."""
    unknown = sorted(set(hyps) - set(refs))
    if unknown:
        raise ScoringError(f"hypotheses without reference: {', '.join(unknown[:5])}")
    return [ScoreRecord(u, refs[u], hyps.get(u, "")) for u in sorted(refs)]


def read_timing_lines(lines: Iterable[str]) -> list[tuple[str, RtfReport]]:
    out = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ScoringError(f"line {lineno}: expected utt_id, seconds, seconds")
        try:
            out.append((fields[0], rtf(float(fields[1]), float(fields[2]))))
        except ValueError as e:
            if isinstance(e, ScoringError):
                raise
            raise ScoringError(f"line {lineno}: {e}") from None
    return out


@dataclass
class CorpusScore:
    total: WerReport
    per_utterance: dict[str, WerReport]
    buckets: list[ErrorBucket] | None

    def summary(self) -> str:
        lines = [self.total.summary_line()]
        for b in self.buckets or ():
            lines.append(b.line())
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        def rep(r):
            return {"wer": r.format_percent(), "S": r.S, "D": r.D, "I": r.I, "N": r.N}

        return {
            "total": rep(self.total),
            "utterances": {u: rep(r) for u, r in self.per_utterance.items()},
            "buckets": [
                {"category": b.category.name, **{k: b.counts[k] for k in OUTCOMES}}
                for b in self.buckets or ()
            ],
        }


def score_records(records: Sequence[ScoreRecord]) -> CorpusScore:
    """Score a corpus. Buckets are filled only when every reference parses as a number."""
    if not records:
        raise EmptyCorpus("no records to score")
    per_utt = {}
    pairs = []
    for rec in records:
        ref = grammar.normalize_words(rec.reference)
        hyp = grammar.normalize_words(rec.hypothesis)
        if rec.utt_id in per_utt:
            raise ScoringError(f"duplicate utterance id {rec.utt_id!r}")
        per_utt[rec.utt_id] = score(ref, hyp)
        pairs.append((ref, hyp))
    try:
        buckets = categorize_errors(pairs)
    except UnparseableReference:
        buckets = None
    return CorpusScore(corpus_wer(per_utt.values()), per_utt, buckets)
