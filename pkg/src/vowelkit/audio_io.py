"""WAV decode/encode and resampling.

Reader accepts RIFF/WAVE with 8/16/24/32-bit integer PCM (format code 1)
or 32-bit IEEE float (format code 3), mono or stereo. Writer always emits
16-bit PCM mono. Everything is little-endian per the RIFF spec.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AudioFormatError

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3


@dataclass(frozen=True, eq=False)
class AudioSignal:
    """Mono waveform: float samples (nominal range [-1, 1]) plus sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        arr = np.array(self.samples, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _decode_samples(payload: bytes, fmt: int, bits: int) -> np.ndarray:
    """Decode one channel-interleaved data payload to float64 in [-1, 1]."""
    if fmt == _FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise AudioFormatError(f"unsupported encoding: {bits}-bit float PCM")
        return np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if fmt != _FORMAT_PCM:
        raise AudioFormatError(f"unsupported encoding: format code {fmt}")
    if bits == 8:
        # 8-bit WAV is unsigned with a 128 offset
        return (np.frombuffer(payload, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals = np.where(vals >= 1 << 23, vals - (1 << 24), vals)
        return vals.astype(np.float64) / float(1 << 23)
    if bits == 32:
        return np.frombuffer(payload, dtype="<i4").astype(np.float64) / float(1 << 31)
    raise AudioFormatError(f"unsupported encoding: {bits}-bit integer PCM")


def read_wav(path: str) -> AudioSignal:
    """Decode a WAV file to a mono AudioSignal.

    Integer samples are scaled by the type's maximum magnitude; stereo
    frames are averaged to mono. Raises FileNotFoundError for a missing
    file and AudioFormatError for a malformed container or an encoding
    outside the supported set.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = channels = bits = rate = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioFormatError(f"{path}: truncated fmt chunk")
            fmt, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise AudioFormatError(f"{path}: missing fmt chunk")
    if payload is None:
        raise AudioFormatError(f"{path}: missing data chunk")
    if channels not in (1, 2):
        raise AudioFormatError(f"unsupported encoding: {channels} channels")

    samples = _decode_samples(payload, fmt, bits)
    if channels == 2:
        samples = samples[: 2 * (len(samples) // 2)].reshape(-1, 2).mean(axis=1)
    if len(samples) == 0:
        raise AudioFormatError(f"{path}: empty data chunk")
    return AudioSignal(samples, rate)


def write_wav(signal: AudioSignal, path: str) -> None:
    """Encode a signal as 16-bit PCM mono WAV.

    Samples outside [-1, 1] are clipped with a warning. The quantizer
    keeps the read-back error within one 16-bit step (1/32768) per sample.
    """
    x = signal.samples
    if len(x) == 0:
        raise ValueError("empty signal")
    if np.max(np.abs(x)) > 1.0:
        warnings.warn("samples outside [-1, 1] clipped on WAV write", stacklevel=2)
        x = np.clip(x, -1.0, 1.0)
    quantized = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    payload = quantized.tobytes()

    byte_rate = signal.sample_rate * 2
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, _FORMAT_PCM, 1,
                                    signal.sample_rate, byte_rate, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as fh:
        fh.write(header + payload)


def _lowpass_taps(cutoff: float, n_taps: int = 101) -> np.ndarray:
    """Hamming-windowed sinc FIR, cutoff in cycles/sample, unity DC gain."""
    mid = (n_taps - 1) / 2
    n = np.arange(n_taps) - mid
    taps = 2.0 * cutoff * np.sinc(2.0 * cutoff * n)
    taps *= 0.54 - 0.46 * np.cos(2.0 * np.pi * np.arange(n_taps) / (n_taps - 1))
    return taps / taps.sum()


def resample(signal: AudioSignal, target_rate: int) -> AudioSignal:
    """Resample via windowed-sinc low-pass followed by linear interpolation.

    Returns the input unchanged when the rate already matches. Output
    length is round(n * target/source), preserving duration to within
    one sample period.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == signal.sample_rate:
        return signal
    x = signal.samples
    src_rate = signal.sample_rate
    if target_rate < src_rate:
        # anti-alias below the new Nyquist before decimating
        taps = _lowpass_taps(0.45 * target_rate / src_rate)
        x = np.convolve(x, taps, mode="same")
    n_out = int(round(len(x) * target_rate / src_rate))
    positions = np.arange(n_out) * (src_rate / target_rate)
    out = np.interp(positions, np.arange(len(x)), x)
    return AudioSignal(out, target_rate)
