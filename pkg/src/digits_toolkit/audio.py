"""Mono 16-bit PCM buffers, WAV I/O and resampling to the 8 kHz telephone rate."""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal
from scipy.io import wavfile

TARGET_RATE = 8000
# low-pass cutoff as a fraction of the lower of the two rates
CUTOFF_RATIO = 0.45
STOPBAND_DB = 80.0


class AudioError(ValueError):
    pass


class UnsupportedRate(AudioError):
    pass


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise UnsupportedRate(f"sample rate must be positive, got {self.sample_rate}")
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise AudioError("AudioBuffer holds a single channel")
        if samples.dtype != np.int16:
            if not np.issubdtype(samples.dtype, np.integer):
                raise AudioError(f"expected integer samples, got {samples.dtype}; see from_float")
            if samples.size and (
                    samples.min() < -32768 or samples.max() > 32767):
                raise AudioError("integer samples exceed the 16-bit range")
            samples = samples.astype(np.int16)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __eq__(self, other):
        if not isinstance(other, AudioBuffer):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(self.samples, other.samples)


def from_float(samples, sample_rate: int) -> AudioBuffer:
    """Quantize float samples in [-1, 1] to 16-bit."""
    x = np.clip(np.rint(np.asarray(samples, dtype=float) * 32767.0), -32768, 32767)
    return AudioBuffer(sample_rate, x.astype(np.int16))


def _to_int16(data: np.ndarray) -> np.ndarray:
    if data.dtype == np.int16:
        return data
    if data.dtype == np.uint8:
        return ((data.astype(np.int32) - 128) << 8).astype(np.int16)
    if data.dtype == np.int32:
        # 24-bit files come back left-justified in int32
        return (data >> 16).astype(np.int16)
    if np.issubdtype(data.dtype, np.floating):
        return np.clip(np.rint(data * 32767.0), -32768, 32767).astype(np.int16)
    raise AudioError(f"unsupported sample type {data.dtype}")


def read_wav(path) -> AudioBuffer:
    """Read a WAV file as mono 16-bit; channels are averaged."""
    try:
        rate, data = wavfile.read(path)
    except ValueError as e:
        raise AudioError(f"{path}: {e}") from None
    if data.ndim == 2:
        data = _to_int16(data).astype(np.int32).mean(axis=1)
        data = np.rint(data).astype(np.int16)
    return AudioBuffer(int(rate), _to_int16(data))


def write_wav(path, audio: AudioBuffer) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(audio.sample_rate)
        w.writeframes(audio.samples.astype("<i2").tobytes())


@lru_cache(maxsize=16)
def anti_alias_filter(rate_in: int, rate_out: int = TARGET_RATE) -> tuple[int, int, np.ndarray]:
    """Kaiser-windowed sinc for a rational ``rate_in -> rate_out`` conversion.

    Returns ``(up, down, taps)``. Cutoff is ``CUTOFF_RATIO`` times the lower
    rate, and the stopband begins at the lower Nyquist frequency with
    ``STOPBAND_DB`` attenuation.
    """
    g = math.gcd(rate_in, rate_out)
    up, down = rate_out // g, rate_in // g
    fs = rate_in * up
    low = min(rate_in, rate_out)
    cutoff = CUTOFF_RATIO * low
    width = 2 * (0.5 * low - cutoff)
    numtaps, beta = signal.kaiserord(STOPBAND_DB, width / (0.5 * fs))
    numtaps |= 1
    taps = signal.firwin(numtaps, cutoff, window=("kaiser", beta), fs=fs)
    taps.setflags(write=False)
    return up, down, taps


def resample(audio: AudioBuffer, rate_out: int) -> AudioBuffer:
    rate_in = audio.sample_rate
    if rate_out <= 0:
        raise UnsupportedRate(f"target rate must be positive, got {rate_out}")
    if rate_in == rate_out:
        return audio
    n_out = round_half_away(len(audio) * rate_out / rate_in)
    if len(audio) == 0:
        return AudioBuffer(rate_out, np.zeros(0, np.int16))
    up, down, taps = anti_alias_filter(rate_in, rate_out)
    y = signal.resample_poly(audio.samples.astype(float), up, down, window=np.array(taps))
    if len(y) < n_out:
        y = np.concatenate([y, np.zeros(n_out - len(y))])
    y = np.clip(np.rint(y[:n_out]), -32768, 32767).astype(np.int16)
    return AudioBuffer(rate_out, y)


def resample_to_8k(audio: AudioBuffer) -> AudioBuffer:
    return resample(audio, TARGET_RATE)


def pad_silence(audio: AudioBuffer, lead: float = 1.0, trail: float = 1.0) -> AudioBuffer:
    """Surround ``audio`` with digital-zero silence."""
    if lead < 0 or trail < 0:
        raise ValueError("padding must be non-negative")
    n_lead = round_half_away(lead * audio.sample_rate)
    n_trail = round_half_away(trail * audio.sample_rate)
    if not n_lead and not n_trail:
        return audio
    out = np.concatenate([
        np.zeros(n_lead, np.int16), audio.samples, np.zeros(n_trail, np.int16),
    ])
    return AudioBuffer(audio.sample_rate, out)


def tone(freq: float, seconds: float, rate: int, amplitude: float = 0.5) -> AudioBuffer:
    t = np.arange(round_half_away(seconds * rate)) / rate
    return from_float(amplitude * np.sin(2 * np.pi * freq * t), rate)
