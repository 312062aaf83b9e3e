import contextlib
import json
import struct
import time

import numpy as np
import pytest

from digits_toolkit.audio import tone, write_wav


def wav_header(path):
    """(format, channels, rate, byte_rate, block_align, bits, data_bytes) from a canonical WAV."""
    raw = open(path, "rb").read()
    assert raw[:4] == b"RIFF" and raw[8:16] == b"WAVEfmt "
    assert struct.unpack("<I", raw[4:8])[0] == len(raw) - 8
    fmt = struct.unpack("<IHHIIHH", raw[16:36])
    assert fmt[0] == 16
    assert raw[36:40] == b"data"
    data_bytes = struct.unpack("<I", raw[40:44])[0]
    assert data_bytes == len(raw) - 44
    return fmt[1:] + (data_bytes,)


@pytest.fixture
def sine_source(tmp_path):
    """10 s, 440 Hz at 16 kHz with a 3-word timestamp document beside it."""
    wav = tmp_path / "call_01.wav"
    write_wav(wav, tone(440, 10.0, 16000))
    doc = {"words": [
        {"text": "four", "start": 2.0, "end": 2.4, "confidence": 0.9},
        {"text": "five", "start": 2.4, "end": 2.9, "confidence": 0.95},
        {"text": "six", "start": 2.95, "end": 3.5, "confidence": 0.8},
    ]}
    js = tmp_path / "call_01.json"
    js.write_text(json.dumps(doc))
    return wav, js


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, repeated in the terminal summary so the
# verdicts survive output capture
ACCEPTANCE_LINES = []


@contextlib.contextmanager
def criterion(name):
    """Record PASS/FAIL for ``name``; the body asserts and may set ``detail``."""
    note = {"detail": ""}
    start = time.perf_counter()
    try:
        yield note
    except BaseException as exc:
        line = f"FAIL  {name}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    took = time.perf_counter() - start
    line = f"PASS  {name} [{took:.2f} s] {note['detail']}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
