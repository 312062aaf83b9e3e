"""Turn (audio, word-timestamp) pairs into a corpus of spoken-number clips.

Pipeline per document: load the timestamp JSON, find maximal runs of
vocabulary words, cut each run out of the source audio (resampled to 8 kHz),
pad both ends with silence and write a 16-bit mono WAV. Metadata goes into a
Kaldi-style data directory (``wav.scp``, ``text``, ``utt2spk``), whose WAV
paths are relative to the directory itself.
"""

from __future__ import annotations

import json
import logging
import math
import os
import re
import wave
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import grammar
from .audio import AudioBuffer, pad_silence, read_wav, resample_to_8k, round_half_away, write_wav

log = logging.getLogger(__name__)

THREADS_ENV = "DIGITS_TOOLKIT_THREADS"
METADATA_FILES = ("wav.scp", "text", "utt2spk")


class CurationError(ValueError):
    pass


class MalformedDocument(CurationError):
    pass


class NegativeDuration(CurationError):
    pass


class OutOfRange(CurationError):
    pass


class EmptyManifest(CurationError):
    pass


class DuplicateUttId(CurationError):
    pass


@dataclass(frozen=True)
class WordStamp:
    text: str
    start: float
    end: float
    confidence: float | None = None


@dataclass(frozen=True)
class TranscriptDoc:
    audio_path: str
    words: tuple[WordStamp, ...]


@dataclass(frozen=True)
class ClipSpec:
    source: str
    start: float
    end: float
    tokens: grammar.TokenSeq
    utt_id: str
    digits: tuple[str, ...] = ()

    @property
    def transcript(self) -> str:
        return grammar.to_text(self.tokens)


@dataclass(frozen=True)
class ManifestEntry:
    utt_id: str
    wav_path: str
    transcript: str
    speaker: str


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    split: str | None = None
    # directory the wav paths are relative to
    root: Path | None = None

    def __len__(self):
        return len(self.entries)

    def sorted(self) -> Manifest:
        return replace(self, entries=sorted(self.entries, key=lambda e: e.utt_id))

    def check(self) -> Manifest:
        seen = set()
        for e in self.entries:
            if e.utt_id in seen:
                raise DuplicateUttId(e.utt_id)
            seen.add(e.utt_id)
            grammar.tokenize(e.transcript)
        return self


# ---------------------------------------------------------------------------
# timestamp documents

def _number(obj, key, where):
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedDocument(f"{where}: {key!r} must be a number, got {value!r}")
    return float(value)


def load_word_stamps(document: bytes | str, audio_path: str = "",
                     epsilon: float = 0.01) -> TranscriptDoc:
    """Parse a word-timestamp JSON document.

    The expected shape is ``{"words": [{"text", "start", "end", "confidence"?}]}``.
    Whisper's nested ``segments[].words[]`` with ``word``/``probability`` keys is
    accepted too. A word whose end precedes its start by at most ``epsilon``
    seconds is clamped to zero length; beyond that it is an error.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedDocument(f"not UTF-8: {e}") from None
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise MalformedDocument("top level must be an object")
    if "words" in data:
        raw_words = data["words"]
    elif isinstance(data.get("segments"), list):
        raw_words = [w for seg in data["segments"] for w in (seg.get("words") or [])]
    else:
        raise MalformedDocument("missing 'words' array")
    if not isinstance(raw_words, list):
        raise MalformedDocument("'words' must be an array")
    audio_path = audio_path or data.get("audio_path") or ""

    words = []
    for i, w in enumerate(raw_words):
        where = f"words[{i}]"
        if not isinstance(w, dict):
            raise MalformedDocument(f"{where}: expected an object")
        text = w.get("text", w.get("word"))
        if not isinstance(text, str):
            raise MalformedDocument(f"{where}: missing 'text'")
        start, end = _number(w, "start", where), _number(w, "end", where)
        if start < 0:
            raise MalformedDocument(f"{where}: negative start {start}")
        if end < start:
            if start - end > epsilon:
                raise NegativeDuration(f"{where} {text!r}: end {end} < start {start}")
            end = start
        conf = w.get("confidence", w.get("probability"))
        if conf is not None:
            conf = _number({"confidence": conf}, "confidence", where)
        words.append(WordStamp(text.strip(), start, end, conf))
    words.sort(key=lambda w: w.start)  # stable: equal starts keep source order
    return TranscriptDoc(audio_path, tuple(words))


def load_word_stamp_file(path, audio_path: str = "", epsilon: float = 0.01) -> TranscriptDoc:
    path = Path(path)
    doc = load_word_stamps(path.read_bytes(), audio_path, epsilon)
    if not doc.audio_path:
        doc = replace(doc, audio_path=str(path.with_suffix(".wav")))
    elif not os.path.isabs(doc.audio_path):
        doc = replace(doc, audio_path=str(path.parent / doc.audio_path))
    return doc


# ---------------------------------------------------------------------------
# run extraction

def source_stem(path: str) -> str:
    stem = Path(path).stem or "audio"
    return re.sub(r"[^\w.-]+", "_", stem)


def make_utt_id(source: str, run_index: int, start: float) -> str:
    return f"{source_stem(source)}-{run_index:04d}-{round_half_away(start * 1000):08d}"


def _word_tokens(text: str) -> grammar.TokenSeq | None:
    try:
        return grammar.tokenize(text)
    except grammar.GrammarError:
        return None


def extract_number_runs(doc: TranscriptDoc, max_gap: float = math.inf,
                        require_parse: bool = False) -> list[ClipSpec]:
    """Merge consecutive vocabulary words into clips.

    A run ends at a non-vocabulary word or when the silence between two words
    exceeds ``max_gap`` seconds. ``require_parse`` drops runs with no digit
    reading (a lone "and", say).
    """
    runs: list[list[tuple[WordStamp, grammar.TokenSeq]]] = []
    current: list = []
    for word in doc.words:
        tokens = _word_tokens(word.text)
        if tokens is None:
            if current:
                runs.append(current)
            current = []
            continue
        if current and word.start - current[-1][0].end > max_gap:
            runs.append(current)
            current = []
        current.append((word, tokens))
    if current:
        runs.append(current)

    clips = []
    for run in runs:
        start, end = run[0][0].start, run[-1][0].end
        tokens = tuple(t for _, toks in run for t in toks)
        if end <= start:
            log.warning("skipping zero-length run %r in %s", grammar.to_text(tokens), doc.audio_path)
            continue
        digits = tuple(grammar.parse(tokens))
        if require_parse and not digits:
            continue
        clips.append(ClipSpec(doc.audio_path, start, end, tokens,
                              make_utt_id(doc.audio_path, len(clips), start), digits))
    return clips


# ---------------------------------------------------------------------------
# audio

def slice_audio(audio: AudioBuffer, clip: ClipSpec, boundary_pad: float = 0.0) -> AudioBuffer:
    if boundary_pad < 0:
        raise ValueError("boundary_pad must be non-negative")
    if clip.start > audio.duration:
        raise OutOfRange(f"{clip.utt_id}: starts at {clip.start}s, audio lasts {audio.duration:.3f}s")
    start = max(0.0, clip.start - boundary_pad)
    end = min(audio.duration, clip.end + boundary_pad)
    a = round_half_away(start * audio.sample_rate)
    b = min(len(audio), round_half_away(end * audio.sample_rate))
    return AudioBuffer(audio.sample_rate, audio.samples[a:b].copy())


AudioStore = Mapping[str, AudioBuffer] | Callable[[str], AudioBuffer]


class _StandardizedAudio:
    # each source resampled once, however many clips it yields
    def __init__(self, store: AudioStore):
        self._store = store
        self._cache: dict[str, AudioBuffer] = {}

    def __call__(self, source: str) -> AudioBuffer:
        if source not in self._cache:
            raw = self._store(source) if callable(self._store) else self._store[source]
            self._cache[source] = resample_to_8k(raw)
        return self._cache[source]


def render_clip(audio_8k: AudioBuffer, clip: ClipSpec, lead: float = 1.0, trail: float = 1.0,
                boundary_pad: float = 0.0) -> AudioBuffer:
    return pad_silence(slice_audio(audio_8k, clip, boundary_pad), lead, trail)


# ---------------------------------------------------------------------------
# data directories

def write_data_dir(manifest: Manifest, out_dir) -> Path:
    """Write ``wav.scp``, ``text`` and ``utt2spk`` sorted by utterance id."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = manifest.sorted().check()
    scp, text, u2s = [], [], []
    for e in manifest.entries:
        path = e.wav_path
        if manifest.root is not None and not os.path.isabs(path):
            path = os.path.relpath(Path(manifest.root) / path, out_dir)
        scp.append(f"{e.utt_id} {Path(path).as_posix()}\n")
        text.append(f"{e.utt_id} {e.transcript}\n")
        u2s.append(f"{e.utt_id} {e.speaker}\n")
    for name, lines in zip(METADATA_FILES, (scp, text, u2s)):
        with open(out_dir / name, "w", encoding="utf-8", newline="\n") as f:
            f.writelines(lines)
    return out_dir


def _read_table(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, value = line.partition(" ")
            if key in out:
                raise DuplicateUttId(f"{path}:{lineno}: {key}")
            out[key] = value
    return out


def read_data_dir(data_dir, split: str | None = None) -> Manifest:
    data_dir = Path(data_dir)
    scp, text, u2s = (_read_table(data_dir / n) for n in METADATA_FILES)
    if not (scp.keys() == text.keys() == u2s.keys()):
        raise CurationError(f"{data_dir}: wav.scp, text and utt2spk list different utterances")
    entries = [ManifestEntry(u, scp[u], text[u], u2s[u]) for u in sorted(scp)]
    return Manifest(entries, split, data_dir).check()


def wav_duration(path) -> float:
    with wave.open(str(path), "rb") as w:
        return w.getnframes() / w.getframerate()


def emit_corpus(clips: Iterable[ClipSpec], audio_store: AudioStore, out_dir,
                lead: float = 1.0, trail: float = 1.0, boundary_pad: float = 0.0) -> Manifest:
    """Render every clip to ``out_dir/wav`` and write the data directory in ``out_dir``."""
    out_dir = Path(out_dir)
    clips = sorted(clips, key=lambda c: c.utt_id)
    ids = [c.utt_id for c in clips]
    if len(set(ids)) != len(ids):
        dup = next(u for u in ids if ids.count(u) > 1)
        raise DuplicateUttId(f"utterance id {dup!r} appears twice")
    wav_dir = out_dir / "wav"
    wav_dir.mkdir(parents=True, exist_ok=True)
    audio = _StandardizedAudio(audio_store)
    entries = []
    for clip in clips:
        rel = f"wav/{clip.utt_id}.wav"
        write_wav(out_dir / rel, render_clip(audio(clip.source), clip, lead, trail, boundary_pad))
        entries.append(ManifestEntry(clip.utt_id, rel, clip.transcript, source_stem(clip.source)))
    manifest = Manifest(entries, None, out_dir)
    write_data_dir(manifest, out_dir)
    return manifest


# ---------------------------------------------------------------------------
# train/test split

def split_train_test(manifest: Manifest, ratio: float = 0.9, seed: int = 0,
                     group_key: Callable[[ManifestEntry], str] | None = None
                     ) -> tuple[Manifest, Manifest]:
    """Seeded shuffle, then the first ``round(ratio * N)`` entries train.

    With ``group_key`` the ratio is applied inside each group (e.g. per
    source dataset) and the groups are merged.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    if not manifest.entries:
        raise EmptyManifest("nothing to split")
    groups: dict[str, list[ManifestEntry]] = {}
    for e in sorted(manifest.entries, key=lambda e: e.utt_id):
        groups.setdefault(group_key(e) if group_key else "", []).append(e)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for key in sorted(groups):
        members = groups[key]
        order = rng.permutation(len(members))
        n_train = round_half_away(ratio * len(members))
        train += [members[i] for i in order[:n_train]]
        test += [members[i] for i in order[n_train:]]
    return (Manifest(train, "train", manifest.root).sorted(),
            Manifest(test, "test", manifest.root).sorted())


# ---------------------------------------------------------------------------
# whole pipeline

def thread_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, value)
    return min(8, os.cpu_count() or 1)


@dataclass
class CurationResult:
    corpus: Manifest
    train: Manifest
    test: Manifest
    clips: list[ClipSpec]


def curate(documents: Sequence[TranscriptDoc], out_dir, *, max_gap: float = math.inf,
           boundary_pad: float = 0.0, lead: float = 1.0, trail: float = 1.0,
           ratio: float = 0.9, seed: int = 0, per_source: bool = False,
           require_parse: bool = False, audio_store: AudioStore | None = None) -> CurationResult:
    """Extract, render and split a corpus.

    Writes ``out_dir/{wav.scp,text,utt2spk}`` for the whole corpus plus
    ``out_dir/train`` and ``out_dir/test``. Sources are loaded in parallel
    (``DIGITS_TOOLKIT_THREADS`` caps the pool); output order depends only on
    utterance ids.
    """
    clips = [c for doc in documents for c in extract_number_runs(doc, max_gap, require_parse)]
    store = audio_store if audio_store is not None else read_wav
    sources = sorted({c.source for c in clips})
    load = store if callable(store) else store.__getitem__
    with ThreadPoolExecutor(thread_count()) as pool:
        loaded = dict(zip(sources, pool.map(lambda s: resample_to_8k(load(s)), sources)))
    corpus = emit_corpus(clips, loaded, out_dir, lead, trail, boundary_pad)
    if corpus.entries:
        train, test = split_train_test(corpus, ratio, seed, (lambda e: e.speaker) if per_source else None)
    else:
        train, test = Manifest([], "train", corpus.root), Manifest([], "test", corpus.root)
    write_data_dir(train, Path(out_dir) / "train")
    write_data_dir(test, Path(out_dir) / "test")
    return CurationResult(corpus, train, test, clips)


def summarize(manifest: Manifest) -> dict[str, tuple[int, float]]:
    """Files and hours per speaker (source), read from the WAV headers."""
    out: dict[str, tuple[int, float]] = {}
    for e in manifest.entries:
        path = Path(e.wav_path)
        if manifest.root is not None and not path.is_absolute():
            path = Path(manifest.root) / path
        files, hours = out.get(e.speaker, (0, 0.0))
        out[e.speaker] = (files + 1, hours + wav_duration(path) / 3600)
    return dict(sorted(out.items()))
