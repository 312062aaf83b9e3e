"""Closed digit vocabulary, number verbalizations and their inverse parser.

A digit string of one to five characters is read aloud by splitting it into
contiguous groups of 1, 2 or 3 digits and reading each group, or (for 4 and 5
digit strings) through a single top-level ``THOUSAND`` reading::

    >>> [" ".join(t.value for t in v) for v in sorted_verbalizations("653")]
    ['six five three', 'six fifty three', 'sixty five three', 'six hundred fifty three', 'six hundred and fifty three']
    >>> parse(tokenize("four hundred and eighty"))
    ['480']
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

MAX_DIGITS = 5


class Token(str, Enum):
    # Definition order is the vocabulary table read row by row.
    ONE = "one"
    ELEVEN = "eleven"
    TWENTY = "twenty"
    TWO = "two"
    TWELVE = "twelve"
    THIRTY = "thirty"
    THREE = "three"
    THIRTEEN = "thirteen"
    FORTY = "forty"
    FOUR = "four"
    FOURTEEN = "fourteen"
    FIFTY = "fifty"
    FIVE = "five"
    FIFTEEN = "fifteen"
    SIXTY = "sixty"
    SIX = "six"
    SIXTEEN = "sixteen"
    SEVENTY = "seventy"
    SEVEN = "seven"
    SEVENTEEN = "seventeen"
    EIGHTY = "eighty"
    EIGHT = "eight"
    EIGHTEEN = "eighteen"
    NINETY = "ninety"
    NINE = "nine"
    NINETEEN = "nineteen"
    HUNDRED = "hundred"
    OH = "oh"
    O = "o"  # noqa: E741
    TEN = "ten"
    THOUSAND = "thousand"
    AND = "and"
    ZERO = "zero"

    def __str__(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return _TOKEN_INDEX[self]


VOCABULARY: tuple[Token, ...] = tuple(Token)
_TOKEN_INDEX = {tok: i for i, tok in enumerate(VOCABULARY)}
_BY_SURFACE = {tok.value: tok for tok in VOCABULARY}

TokenSeq = tuple[Token, ...]

UNITS = {
    1: Token.ONE, 2: Token.TWO, 3: Token.THREE, 4: Token.FOUR, 5: Token.FIVE,
    6: Token.SIX, 7: Token.SEVEN, 8: Token.EIGHT, 9: Token.NINE,
}
TEENS = {
    11: Token.ELEVEN, 12: Token.TWELVE, 13: Token.THIRTEEN, 14: Token.FOURTEEN,
    15: Token.FIFTEEN, 16: Token.SIXTEEN, 17: Token.SEVENTEEN,
    18: Token.EIGHTEEN, 19: Token.NINETEEN,
}
TENS = {
    20: Token.TWENTY, 30: Token.THIRTY, 40: Token.FORTY, 50: Token.FIFTY,
    60: Token.SIXTY, 70: Token.SEVENTY, 80: Token.EIGHTY, 90: Token.NINETY,
}
ZERO_FORMS: TokenSeq = (Token.ZERO, Token.OH, Token.O)


class GrammarError(ValueError):
    pass


class InvalidDigitString(GrammarError):
    pass


class OutOfVocabulary(GrammarError):
    def __init__(self, word: str, position: int):
        super().__init__(f"{word!r} at position {position} is not in the vocabulary")
        self.word = word
        self.position = position


@dataclass(frozen=True)
class ParsePolicy:
    """Filtering applied by :func:`parse`.

    ``expected_length`` drops every candidate of another length (e.g. 3 for a
    CVV prompt). With ``allow_and=False`` any sequence containing AND fails.
    """

    expected_length: int | None = None
    allow_and: bool = True

    def __post_init__(self):
        if self.expected_length is not None and not 1 <= self.expected_length <= MAX_DIGITS:
            raise ValueError(f"expected_length must be in [1, {MAX_DIGITS}], got {self.expected_length}")


DEFAULT_POLICY = ParsePolicy()


class Derivation(NamedTuple):
    tokens: TokenSeq
    group_lengths: tuple[int, ...]


def validate_digits(digits: str) -> str:
    if not isinstance(digits, str) or not 1 <= len(digits) <= MAX_DIGITS:
        raise InvalidDigitString(f"expected 1-{MAX_DIGITS} digits, got {digits!r}")
    if not all(c in "0123456789" for c in digits):
        raise InvalidDigitString(f"non-digit character in {digits!r}")
    return digits


# ---------------------------------------------------------------------------
# text normalization

_PUNCT = re.compile(r"[^\w\s-]|_")
_SPLIT = re.compile(r"[\s-]+")


def normalize_words(text: str) -> list[str]:
    """Lowercase, drop punctuation and split on whitespace and hyphens.

    Words outside the vocabulary are kept; scoring needs them verbatim.
    """
    return [w for w in _SPLIT.split(_PUNCT.sub("", text.lower())) if w]


def lookup(word: str) -> Token | None:
    return _BY_SURFACE.get(word.lower())


def tokenize(text: str) -> TokenSeq:
    words = normalize_words(text)
    if not words:
        raise GrammarError(f"no words in {text!r}")
    tokens = []
    for pos, word in enumerate(words):
        tok = _BY_SURFACE.get(word)
        if tok is None:
            raise OutOfVocabulary(word, pos)
        tokens.append(tok)
    return tuple(tokens)


def to_text(tokens: Iterable[Token]) -> str:
    return " ".join(t.value for t in tokens)


# ---------------------------------------------------------------------------
# generation

def _two_digit(value: int) -> TokenSeq:
    if value == 10:
        return (Token.TEN,)
    if value in TEENS:
        return (TEENS[value],)
    tens, unit = divmod(value, 10)
    if unit == 0:
        return (TENS[value],)
    return (TENS[tens * 10], UNITS[unit])


def _below_hundred(value: int) -> TokenSeq:
    return _two_digit(value) if value >= 10 else (UNITS[value],)


@lru_cache(maxsize=None)
def group_readings(group: str) -> tuple[TokenSeq, ...]:
    """All readings of a single group of 1-3 digits (empty if the group is invalid)."""
    if len(group) == 1:
        if group == "0":
            return tuple((z,) for z in ZERO_FORMS)
        return ((UNITS[int(group)],),)
    if group[0] == "0":
        return ()
    value = int(group)
    if len(group) == 2:
        return (_two_digit(value),)
    hundreds, rest = divmod(value, 100)
    head = (UNITS[hundreds], Token.HUNDRED)
    if rest == 0:
        return (head,)
    tail = _below_hundred(rest)
    return (head + tail, head + (Token.AND,) + tail)


@lru_cache(maxsize=None)
def _tail_readings(tail: str) -> tuple[TokenSeq, ...]:
    # the three digits after THOUSAND, including a leading AND where allowed
    if tail == "000":
        return ((),)
    if tail[0] != "0":
        return group_readings(tail)
    rest = _below_hundred(int(tail))
    return (rest, (Token.AND,) + rest)


def _thousand_readings(digits: str) -> Iterator[TokenSeq]:
    prefix, tail = digits[:-3], digits[-3:]
    if prefix[0] == "0":
        return
    for head in group_readings(prefix):
        for rest in _tail_readings(tail):
            yield head + (Token.THOUSAND,) + rest


@lru_cache(maxsize=None)
def _partition_derivations(digits: str) -> tuple[Derivation, ...]:
    if not digits:
        return (Derivation((), ()),)
    out = []
    for size in (1, 2, 3):
        if size > len(digits):
            break
        readings = group_readings(digits[:size])
        if not readings:
            continue
        for rest in _partition_derivations(digits[size:]):
            for reading in readings:
                out.append(Derivation(reading + rest.tokens, (size,) + rest.group_lengths))
    return tuple(out)


def derivations(digits: str) -> list[Derivation]:
    """Every (token sequence, group lengths) derivation of ``digits``.

    A THOUSAND reading counts as one group spanning the whole string.
    """
    validate_digits(digits)
    out = list(_partition_derivations(digits))
    if len(digits) >= 4:
        out.extend(Derivation(t, (len(digits),)) for t in _thousand_readings(digits))
    return out


def verbalizations(digits: str) -> frozenset[TokenSeq]:
    return frozenset(d.tokens for d in derivations(digits))


def _seq_key(tokens: TokenSeq) -> tuple:
    return (len(tokens), [t.index for t in tokens])


def sorted_verbalizations(digits: str) -> list[TokenSeq]:
    """Verbalizations in derivation order: finer partitions first, THOUSAND readings last."""
    return list(dict.fromkeys(d.tokens for d in derivations(digits)))


def canonical_verbalization(digits: str, style: str = "digit_by_digit") -> TokenSeq:
    """One reference reading of ``digits``.

    ``digit_by_digit`` reads each digit with ZERO for 0. ``compact`` picks the
    fewest tokens without AND (ZERO as the zero word); ties go to fewer groups,
    then to the shorter leading group, so 653 reads ``six fifty three``.
    """
    validate_digits(digits)
    if style == "digit_by_digit":
        return tuple(Token.ZERO if c == "0" else UNITS[int(c)] for c in digits)
    if style != "compact":
        raise ValueError(f"unknown style {style!r}")
    candidates = [
        d for d in derivations(digits)
        if Token.AND not in d.tokens and Token.OH not in d.tokens and Token.O not in d.tokens
    ]
    best = min(
        candidates,
        key=lambda d: (len(d.tokens), len(d.group_lengths), d.group_lengths, _seq_key(d.tokens)),
    )
    return best.tokens


# ---------------------------------------------------------------------------
# parsing

def _build_indexes():
    groups: dict[TokenSeq, str] = {}
    for size in (1, 2, 3):
        for value in range(10 ** size):
            group = str(value).zfill(size)
            for reading in group_readings(group):
                assert reading not in groups, reading
                groups[reading] = group
    prefixes = {r: g for r, g in groups.items() if len(g) <= 2 and g[0] != "0"}
    tails: dict[TokenSeq, str] = {}
    for value in range(1000):
        tail = str(value).zfill(3)
        for reading in _tail_readings(tail):
            assert reading not in tails, reading
            tails[reading] = tail
    return groups, prefixes, tails


_GROUPS, _PREFIXES, _TAILS = _build_indexes()
_MAX_GROUP_TOKENS = max(len(r) for r in _GROUPS)


@lru_cache(maxsize=65536)
def _parse_all(tokens: TokenSeq) -> dict[str, int]:
    """Map every digit string (<= 5 digits) whose grammar yields ``tokens``
    to the fewest groups among its derivations."""
    n = len(tokens)
    if Token.THOUSAND in tokens:
        if tokens.count(Token.THOUSAND) != 1:
            return {}
        at = tokens.index(Token.THOUSAND)
        prefix = _PREFIXES.get(tokens[:at])
        tail = _TAILS.get(tokens[at + 1:])
        if prefix is None or tail is None:
            return {}
        return {prefix + tail: 1}

    # suffix[i]: digits -> min groups for tokens[i:]
    suffix: list[dict[str, int]] = [{} for _ in range(n + 1)]
    suffix[n][""] = 0
    for i in range(n - 1, -1, -1):
        here = suffix[i]
        for size in range(1, min(_MAX_GROUP_TOKENS, n - i) + 1):
            group = _GROUPS.get(tokens[i:i + size])
            if group is None:
                continue
            for rest, count in suffix[i + size].items():
                digits = group + rest
                if len(digits) > MAX_DIGITS:
                    continue
                if count + 1 < here.get(digits, MAX_DIGITS + 1):
                    here[digits] = count + 1
    return suffix[0]


def parse(tokens: Sequence[Token], policy: ParsePolicy | None = None) -> list[str]:
    """Digit strings that ``tokens`` verbalizes, best first.

    Ranking: fewer groups in the best derivation, then fewer digits, then
    lexicographic order. An empty list means no parse exists.
    """
    policy = policy or DEFAULT_POLICY
    tokens = tuple(tokens)
    if not tokens:
        raise GrammarError("cannot parse an empty token sequence")
    if not policy.allow_and and Token.AND in tokens:
        return []
    found = _parse_all(tokens)
    if policy.expected_length is not None:
        found = {d: c for d, c in found.items() if len(d) == policy.expected_length}
    return sorted(found, key=lambda d: (found[d], len(d), d))


def parse_text(text: str, policy: ParsePolicy | None = None) -> list[str]:
    return parse(tokenize(text), policy)


# ---------------------------------------------------------------------------
# text exports

def dump_verbalizations(digits: str) -> str:
    return "".join(to_text(v) + "\n" for v in sorted_verbalizations(digits))


def vocabulary_text() -> str:
    return "".join(t.value + "\n" for t in VOCABULARY)
