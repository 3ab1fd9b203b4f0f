"""Signal preparation: silence trimming, peak normalization, selection of a
stationary analysis frame, and Hamming windowing.

The stages compose in that order (see ``prepare``); the formant path
consumes the windowed frame, while the MFCC path starts from the raw
frame so pre-emphasis can run before the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioSignal
from .config import AnalysisConfig
from .errors import SilentSignalError


@dataclass(frozen=True, eq=False)
class PreparedFrame:
    """A fixed-duration analysis frame cut from a prepared signal.

    ``source_offset`` is the sample index of the frame start within the
    trimmed signal; ``windowed`` records whether the Hamming taper has
    already been applied.
    """

    samples: np.ndarray
    sample_rate: int
    source_offset: int
    windowed: bool = True

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _chunk_rms(x: np.ndarray, chunk_len: int) -> np.ndarray:
    """RMS of consecutive chunks; the trailing partial chunk counts too."""
    n_chunks = int(np.ceil(len(x) / chunk_len))
    out = np.empty(n_chunks)
    for i in range(n_chunks):
        chunk = x[i * chunk_len:(i + 1) * chunk_len]
        out[i] = np.sqrt(np.mean(chunk ** 2))
    return out


def trim_silence(signal: AudioSignal, rel_threshold: float = 0.05,
                 chunk_ms: float = 10.0) -> AudioSignal:
    """Drop leading/trailing chunks whose RMS falls below rel_threshold times
    the loudest chunk's RMS. Interior chunks are never touched."""
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError(f"rel_threshold must be in (0, 1), got {rel_threshold}")
    x = signal.samples
    if len(x) == 0:
        raise SilentSignalError("no voiced content: empty signal")
    chunk_len = max(1, int(round(signal.sample_rate * chunk_ms / 1000.0)))
    rms = _chunk_rms(x, chunk_len)
    peak = rms.max()
    if peak == 0.0:
        raise SilentSignalError("no voiced content: signal is silent")
    keep = rms >= rel_threshold * peak
    first = int(np.argmax(keep))
    last = len(keep) - 1 - int(np.argmax(keep[::-1]))
    start = first * chunk_len
    stop = min(len(x), (last + 1) * chunk_len)
    if start == 0 and stop == len(x):
        return signal
    return AudioSignal(x[start:stop], signal.sample_rate)


def normalize_amplitude(signal: AudioSignal) -> AudioSignal:
    """Scale so the peak absolute sample is exactly 1."""
    peak = np.max(np.abs(signal.samples)) if len(signal.samples) else 0.0
    if peak == 0.0:
        raise SilentSignalError("cannot normalize an all-zero signal")
    if peak == 1.0:
        return signal
    return AudioSignal(signal.samples / peak, signal.sample_rate)


def select_frame(signal: AudioSignal, duration: float,
                 chunk_ms: float = 10.0) -> PreparedFrame:
    """Pick the most stationary window of the given duration.

    Candidate offsets lie on the 10 ms chunk grid; the winner minimizes the
    variance of short-time energy across the window's sub-chunks (first
    minimum on ties). Returned frame is unwindowed.
    """
    x = signal.samples
    fs = signal.sample_rate
    frame_len = int(round(duration * fs))
    if frame_len > len(x):
        raise ValueError(
            f"signal of {len(x)} samples is shorter than the "
            f"{frame_len}-sample frame requested")
    chunk_len = max(1, int(round(fs * chunk_ms / 1000.0)))
    n_sub = max(1, frame_len // chunk_len)

    csum = np.concatenate([[0.0], np.cumsum(x ** 2)])
    offsets = range(0, len(x) - frame_len + 1, chunk_len)
    best_offset, best_var = 0, np.inf
    for off in offsets:
        starts = off + np.arange(n_sub) * chunk_len
        energies = csum[starts + chunk_len] - csum[starts]
        var = float(np.var(energies))
        if var < best_var:
            best_offset, best_var = off, var
    return PreparedFrame(samples=x[best_offset:best_offset + frame_len],
                         sample_rate=fs, source_offset=best_offset,
                         windowed=False)


def hamming_window(n_samples: int) -> np.ndarray:
    """w[n] = 0.54 - 0.46 cos(2 pi n / (N-1)), n = 0..N-1."""
    if n_samples < 2:
        raise ValueError(f"window needs at least 2 samples, got {n_samples}")
    n = np.arange(n_samples)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (n_samples - 1))


def prepare_segment(signal: AudioSignal, config: AnalysisConfig) -> PreparedFrame:
    """Trim -> normalize -> select the analysis frame, without windowing."""
    trimmed = trim_silence(signal, config.silence_rel_threshold, config.silence_chunk_ms)
    normalized = normalize_amplitude(trimmed)
    return select_frame(normalized, config.frame_duration_s, config.silence_chunk_ms)


def apply_window(frame: PreparedFrame) -> PreparedFrame:
    """Multiply by a Hamming window; no-op if the frame is already windowed."""
    if frame.windowed:
        return frame
    return PreparedFrame(samples=frame.samples * hamming_window(len(frame)),
                         sample_rate=frame.sample_rate,
                         source_offset=frame.source_offset, windowed=True)


def prepare(signal: AudioSignal, config: AnalysisConfig | None = None) -> PreparedFrame:
    """Full preparation chain: trim, normalize, select, Hamming-window."""
    config = config or AnalysisConfig()
    return apply_window(prepare_segment(signal, config))
