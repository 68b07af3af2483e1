"""PCM audio primitives: WAV I/O, bounded noise, band-pass filtering, mixing.

All operations work on 16-bit mono PCM audio. Filtering is a frequency-domain
brick-wall filter (zero every DFT bin strictly outside the band, closed
interval at the edges), which makes out-of-band leakage exactly testable.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger("noiseflood")

SAMPLE_MIN = -32768
SAMPLE_MAX = 32767
CANONICAL_SAMPLE_RATE = 16000


class WavFormatError(ValueError):
    """The file is not a well-formed RIFF/WAVE container."""


class UnsupportedWavError(ValueError):
    """Well-formed WAV, but not PCM 16-bit mono."""


@dataclass(frozen=True, eq=False)
class AudioSignal:
    """Immutable 16-bit mono PCM audio: integer samples plus a sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("samples must be a non-empty 1-d sequence")
        as_int = np.asarray(arr, dtype=np.int64)
        if np.any(as_int != arr):
            raise ValueError("samples must be integers")
        if as_int.min() < SAMPLE_MIN or as_int.max() > SAMPLE_MAX:
            raise ValueError("samples outside the 16-bit range [-32768, 32767]")
        if not isinstance(self.sample_rate, (int, np.integer)) or self.sample_rate <= 0:
            raise ValueError("sample_rate must be a positive integer")
        frozen = as_int.astype(np.int16)
        frozen.flags.writeable = False
        object.__setattr__(self, "samples", frozen)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, AudioSignal):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )

    @property
    def nyquist(self) -> float:
        return self.sample_rate / 2


@dataclass(frozen=True)
class FrequencyBand:
    """Closed frequency interval [low_hz, high_hz] confining injected noise."""

    low_hz: float
    high_hz: float

    def __post_init__(self):
        if self.low_hz < 0:
            raise ValueError("low_hz must be >= 0")
        if self.high_hz <= self.low_hz:
            raise ValueError("high_hz must exceed low_hz")

    def __str__(self) -> str:
        return f"{self.low_hz:g}-{self.high_hz:g}Hz"


# ``None`` is the distinguished "unfiltered" band: the filter stage is skipped.
Band = FrequencyBand | None

# Canonical flooding plan: unfiltered plus four equal-width bands tiling the
# 0-8000 Hz range of 16 kHz audio, in the fixed order every score vector uses.
CANONICAL_BANDS: tuple[Band, ...] = (
    None,
    FrequencyBand(0, 2000),
    FrequencyBand(2000, 4000),
    FrequencyBand(4000, 6000),
    FrequencyBand(6000, 8000),
)
BAND_NAMES: tuple[str, ...] = (
    "unfiltered",
    "0_2000",
    "2000_4000",
    "4000_6000",
    "6000_8000",
)


def band_name(band: Band) -> str:
    """Canonical short name for a band (used in CSV headers and model files)."""
    if band is None:
        return "unfiltered"
    return f"{band.low_hz:g}_{band.high_hz:g}"


def parse_band(text: str) -> Band:
    """Inverse of :func:`band_name`; also accepts ``low-high`` spellings."""
    if text.strip().lower() == "unfiltered":
        return None
    for sep in ("_", "-"):
        if sep in text:
            low, _, high = text.partition(sep)
            try:
                return FrequencyBand(float(low), float(high))
            except ValueError as exc:
                raise ValueError(f"bad band spec {text!r}") from exc
    raise ValueError(f"bad band spec {text!r}")


_WAV_HEADER = struct.Struct("<4sI4s")
_FMT_CHUNK = struct.Struct("<HHIIHH")


def load_wav(path) -> AudioSignal:
    """Load a PCM 16-bit mono WAV file exactly as stored.

    Raises WavFormatError for a malformed container and UnsupportedWavError
    for valid WAV files that are not PCM, not 16-bit, or not mono.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise WavFormatError(f"{path}: too short to be a WAV file")
    riff, _, wave_id = _WAV_HEADER.unpack_from(data, 0)
    if riff != b"RIFF" or wave_id != b"WAVE":
        raise WavFormatError(f"{path}: missing RIFF/WAVE header")

    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, chunk_size = struct.unpack_from("<4sI", data, offset)
        body = data[offset + 8 : offset + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < _FMT_CHUNK.size:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            fmt = _FMT_CHUNK.unpack_from(body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise WavFormatError(f"{path}: truncated data chunk")
            payload = body
        # chunks are word-aligned
        offset += 8 + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise WavFormatError(f"{path}: no fmt chunk")
    if payload is None:
        raise WavFormatError(f"{path}: no data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedWavError(f"{path}: non-PCM encoding (format code {audio_format})")
    if bits != 16:
        raise UnsupportedWavError(f"{path}: {bits}-bit samples, only 16-bit supported")
    if channels != 1:
        raise UnsupportedWavError(f"{path}: {channels} channels, only mono supported")
    if sample_rate != CANONICAL_SAMPLE_RATE:
        logger.warning("%s: sample rate %d Hz (canonical datasets use %d Hz)",
                       path, sample_rate, CANONICAL_SAMPLE_RATE)

    samples = np.frombuffer(payload[: len(payload) - (len(payload) % 2)], dtype="<i2")
    if samples.size == 0:
        raise WavFormatError(f"{path}: empty data chunk")
    return AudioSignal(samples, sample_rate)


def save_wav(signal: AudioSignal, path) -> None:
    """Write PCM 16-bit mono little-endian WAV; round-trips with load_wav."""
    payload = signal.samples.astype("<i2").tobytes()
    sr = signal.sample_rate
    block_align = 2
    header = b"".join(
        [
            struct.pack("<4sI4s", b"RIFF", 36 + len(payload), b"WAVE"),
            struct.pack("<4sI", b"fmt ", 16),
            _FMT_CHUNK.pack(1, 1, sr, sr * block_align, block_align, 16),
            struct.pack("<4sI", b"data", len(payload)),
        ]
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def generate_noise(n: int, epsilon: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n independent uniform random integers from [-epsilon, epsilon]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    return rng.integers(-epsilon, epsilon, size=n, endpoint=True, dtype=np.int64)


def band_pass(noise: np.ndarray, band: Band, sample_rate: int) -> np.ndarray:
    """Confine a noise array to a frequency band.

    The unfiltered band returns the input unchanged. Otherwise every DFT bin
    strictly outside [low_hz, high_hz] is zeroed (bins exactly at an edge are
    retained) and the result is the real inverse transform.
    """
    if band is None:
        return noise
    if band.high_hz > sample_rate / 2:
        raise ValueError(
            f"band {band} exceeds the Nyquist frequency {sample_rate / 2:g} Hz"
        )
    values = np.asarray(noise, dtype=np.float64)
    spectrum = np.fft.rfft(values)
    freqs = np.fft.rfftfreq(values.size, d=1.0 / sample_rate)
    keep = (freqs >= band.low_hz) & (freqs <= band.high_hz)
    spectrum[~keep] = 0.0
    return np.fft.irfft(spectrum, n=values.size)


def mix(signal: AudioSignal, noise: np.ndarray) -> AudioSignal:
    """Add noise to a signal, rounding to integers and saturating to 16 bits."""
    values = np.asarray(noise)
    if values.shape != signal.samples.shape:
        raise ValueError(
            f"length mismatch: signal has {len(signal)} samples, noise has {values.size}"
        )
    mixed = np.rint(signal.samples.astype(np.float64) + values)
    clipped = np.clip(mixed, SAMPLE_MIN, SAMPLE_MAX).astype(np.int16)
    return AudioSignal(clipped, signal.sample_rate)
