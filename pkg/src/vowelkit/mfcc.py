"""Mel frequency cepstral coefficients for a single prepared frame.

Chain: optional pre-emphasis (raw frames only) -> Hamming window ->
periodogram -> triangular mel filterbank -> log energies -> orthonormal
DCT-II -> drop coefficient 0, keep the next ``n_cep`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import AnalysisConfig
from .errors import SilentSignalError
from .preprocess import PreparedFrame, apply_window
from .spectral import dct2, dft_power, next_pow2


@dataclass(frozen=True, eq=False)
class MelFilterbank:
    """Triangular filters, one row per channel over the one-sided spectrum."""

    n_filters: int
    weights: np.ndarray
    low_hz: float
    high_hz: float

    def __post_init__(self):
        arr = np.array(self.weights, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)


@dataclass(frozen=True, eq=False)
class MfccVector:
    coeffs: np.ndarray
    label: str | None = None

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)


def hz_to_mel(f: float | np.ndarray):
    """m = 2595 log10(1 + f/700); monotone, zero at 0 Hz."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m: float | np.ndarray):
    m = np.asarray(m, dtype=np.float64)
    out = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _filterbank_cached(n_filters: int, fft_size: int, sample_rate: int,
                       low_hz: float, high_hz: float) -> MelFilterbank:
    n_bins = fft_size // 2 + 1
    edges_mel = np.linspace(hz_to_mel(low_hz), hz_to_mel(high_hz), n_filters + 2)
    # snap mel-uniform edge points onto the DFT bin grid
    bins = np.floor((fft_size + 1) * mel_to_hz(edges_mel) / sample_rate).astype(int)
    bins = np.minimum(bins, n_bins - 1)
    if np.any(np.diff(bins) < 1):
        raise ValueError(
            f"mel band [{low_hz}, {high_hz}] Hz too narrow for {n_filters} "
            f"filters on a {fft_size}-point grid: edges collide")

    weights = np.zeros((n_filters, n_bins))
    for j in range(n_filters):
        lo, mid, hi = bins[j], bins[j + 1], bins[j + 2]
        rise = np.arange(lo, mid)
        weights[j, rise] = (rise - lo) / (mid - lo)
        fall = np.arange(mid, hi)
        weights[j, fall] = (hi - fall) / (hi - mid)
    return MelFilterbank(n_filters=n_filters, weights=weights,
                         low_hz=low_hz, high_hz=high_hz)


def build_filterbank(n_filters: int, fft_size: int, sample_rate: int,
                     low_hz: float = 0.0, high_hz: float | None = None) -> MelFilterbank:
    """Build (or fetch from cache) a triangular mel filterbank.

    Edge points are uniform in mel between low_hz and high_hz; filter j
    rises from edge j to j+1 and falls to j+2, peaking at weight 1.
    """
    if n_filters < 2:
        raise ValueError(f"need at least 2 filters, got {n_filters}")
    if high_hz is None:
        high_hz = sample_rate / 2.0
    if not low_hz < high_hz <= sample_rate / 2.0:
        raise ValueError(f"band [{low_hz}, {high_hz}] invalid for fs={sample_rate}")
    return _filterbank_cached(n_filters, fft_size, sample_rate, float(low_hz), float(high_hz))


def preemphasis(x: np.ndarray, coeff: float) -> np.ndarray:
    """y[n] = x[n] - coeff * x[n-1], with y[0] = x[0]."""
    return np.concatenate([x[:1], x[1:] - coeff * x[:-1]])


def mfcc_stages(frame: PreparedFrame, config: AnalysisConfig | None = None) -> dict:
    """Run the MFCC chain and return every intermediate stage.

    Keys: 'windowed' (frame samples after pre-emphasis/window), 'power'
    (periodogram), 'energies', 'log_energies', 'cepstrum' (full DCT) and
    'coeffs' (the retained vector). Useful for wiring checks and reports.
    """
    config = config or AnalysisConfig()
    x = frame.samples
    if len(x) == 0 or np.max(np.abs(x)) == 0.0:
        raise SilentSignalError("all-zero frame")
    if not frame.windowed:
        # pre-emphasis belongs before the window, so only raw frames get it
        if config.preemph > 0.0:
            x = preemphasis(x, config.preemph)
        frame = PreparedFrame(samples=x, sample_rate=frame.sample_rate,
                              source_offset=frame.source_offset, windowed=False)
        frame = apply_window(frame)
        x = frame.samples

    fft_size = next_pow2(len(x))
    spectrum = dft_power(x, fft_size, sample_rate=frame.sample_rate)
    fb = build_filterbank(config.n_filters, fft_size, frame.sample_rate,
                          config.low_hz, config.effective_high_hz())
    energies = fb.weights @ spectrum.power
    log_energies = np.log(np.maximum(energies, config.log_floor))
    cepstrum = dct2(log_energies)
    if config.n_cep + 1 > len(cepstrum):
        raise ValueError(
            f"n_cep={config.n_cep} needs at least {config.n_cep + 1} filters, "
            f"got {config.n_filters}")
    return {
        "windowed": x,
        "power": spectrum.power,
        "energies": energies,
        "log_energies": log_energies,
        "cepstrum": cepstrum,
        "coeffs": cepstrum[1:config.n_cep + 1],
    }


def mfcc(frame: PreparedFrame, config: AnalysisConfig | None = None,
         label: str | None = None) -> MfccVector:
    """Compute the retained cepstral coefficients for one frame.

    The DCT index-0 term (overall log energy) is discarded, which makes
    the retained coefficients invariant to signal scaling.
    """
    return MfccVector(coeffs=mfcc_stages(frame, config)["coeffs"], label=label)


def mfcc_multiframe(signal, config: AnalysisConfig | None = None,
                    label: str | None = None) -> MfccVector:
    """Experimental mode: average per-window vectors over the voiced signal.

    The trimmed, peak-normalized signal is cut into overlapping windows
    (multiframe_window_s long, multiframe_step_s apart) and the retained
    coefficients are averaged across windows.
    """
    from .preprocess import normalize_amplitude, trim_silence

    config = config or AnalysisConfig()
    voiced = normalize_amplitude(trim_silence(signal, config.silence_rel_threshold,
                                              config.silence_chunk_ms))
    fs = voiced.sample_rate
    window = int(round(config.multiframe_window_s * fs))
    step = max(1, int(round(config.multiframe_step_s * fs)))
    if len(voiced.samples) < window:
        raise ValueError(f"signal of {len(voiced.samples)} samples shorter "
                         f"than one {window}-sample window")
    vectors = []
    for start in range(0, len(voiced.samples) - window + 1, step):
        frame = PreparedFrame(samples=voiced.samples[start:start + window],
                              sample_rate=fs, source_offset=start, windowed=False)
        vectors.append(mfcc_stages(frame, config)["coeffs"])
    return MfccVector(coeffs=np.mean(vectors, axis=0), label=label)
