"""Snap free-form ASR hypotheses onto the closed digit vocabulary.

This is a post-decoder: it approximates, outside the recognizer, the effect of
decoding with a grammar restricted to the digit vocabulary. Matching is by
spelling (grapheme Levenshtein distance), not by sound, so "well" is three
edits away from "twelve" and needs ``max_distance >= 3`` to be recovered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from . import grammar
from .evaluation import edit_distance
from .grammar import ParsePolicy, Token

DEFAULT_MAX_DISTANCE = 1


class SnapCandidate(NamedTuple):
    original: str
    token: Token
    distance: int


@dataclass(frozen=True)
class ConstrainedResult:
    snapped: grammar.TokenSeq = ()
    total_distance: int = 0
    digits: tuple[str, ...] = ()
    dropped: tuple[tuple[str, str], ...] = field(default=())

    @property
    def best(self) -> str | None:
        return self.digits[0] if self.digits else None


def snap_to_vocab(word: str, max_distance: int = DEFAULT_MAX_DISTANCE) -> list[SnapCandidate]:
    """Vocabulary tokens within ``max_distance`` edits of ``word``, nearest first.

    Ties keep vocabulary order. An empty list means the word cannot be snapped.
    """
    if max_distance < 0:
        raise ValueError("max_distance must be non-negative")
    norm = "".join(grammar.normalize_words(word))
    if not norm:
        raise ValueError(f"{word!r} is empty after normalization")
    out = []
    for tok in grammar.VOCABULARY:
        # length difference is a lower bound on the distance
        if abs(len(tok.value) - len(norm)) > max_distance:
            continue
        d = edit_distance(norm, tok.value)
        if d <= max_distance:
            out.append(SnapCandidate(word, tok, d))
    out.sort(key=lambda c: (c.distance, c.token.index))
    return out


def constrained_transcript(hyp_words: Iterable[str],
                           max_distance: int = DEFAULT_MAX_DISTANCE,
                           policy: ParsePolicy | None = None) -> ConstrainedResult:
    """Greedily snap every hypothesis word and parse the snapped sequence.

    Hyphenated words are split first. Words with no candidate are dropped and
    reported with a reason; ``digits`` is empty when the snapped sequence has
    no reading.
    """
    snapped = []
    dropped = []
    total = 0
    for raw in hyp_words:
        pieces = grammar.normalize_words(raw)
        if not pieces:
            dropped.append((raw, "empty after normalization"))
            continue
        for piece in pieces:
            candidates = snap_to_vocab(piece, max_distance)
            if not candidates:
                dropped.append((piece, f"no vocabulary token within distance {max_distance}"))
                continue
            snapped.append(candidates[0].token)
            total += candidates[0].distance
    snapped = tuple(snapped)
    digits = tuple(grammar.parse(snapped, policy)) if snapped else ()
    return ConstrainedResult(snapped, total, digits, tuple(dropped))


def constrained_text(text: str, max_distance: int = DEFAULT_MAX_DISTANCE,
                     policy: ParsePolicy | None = None) -> ConstrainedResult:
    return constrained_transcript(text.split(), max_distance, policy)
