"""
Cutting number clips out of a long recording
============================================

A synthetic 16 kHz "call" with three number words inside a short
filler sentence, turned into an 8 kHz training directory.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from digits_toolkit import audio, curation

work = Path(tempfile.mkdtemp())

# twelve seconds of quiet noise with a chirp where the digits are spoken
rate = 16000
rng = np.random.default_rng(0)
signal = 0.01 * rng.standard_normal(12 * rate)
t = np.arange(int(1.6 * rate)) / rate
signal[4 * rate:4 * rate + len(t)] += 0.5 * np.sin(2 * np.pi * (300 + 200 * t) * t)
audio.write_wav(work / "call_07.wav", audio.from_float(signal, rate))

# what a word-timestamp recognizer might have produced for it
words = [("my", 3.1, 3.3), ("number", 3.3, 3.8), ("nine", 4.0, 4.4),
         ("oh", 4.45, 4.7), ("two", 4.8, 5.6), ("thanks", 6.0, 6.5)]
doc = {"words": [{"text": w, "start": s, "end": e, "confidence": 0.9} for w, s, e in words]}
(work / "call_07.json").write_text(json.dumps(doc))

# only the contiguous vocabulary run survives
stamps = curation.load_word_stamp_file(work / "call_07.json")
for clip in curation.extract_number_runs(stamps):
    print(clip.utt_id, clip.transcript, round(clip.end - clip.start, 2))

# render, pad one second either side, and split
result = curation.curate([stamps], work / "data", ratio=0.9, seed=0)
print((work / "data" / "text").read_text(), end="")
print((work / "data" / "wav.scp").read_text(), end="")
for speaker, (files, hours) in curation.summarize(result.corpus).items():
    print(speaker, files, f"{hours * 3600:.2f} s")
