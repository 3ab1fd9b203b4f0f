"""Synthetic vowel generation with exactly known formants.

Source-filter synthesis: an impulse train at the fundamental drives a
cascade of two-pole resonators, one per formant, with pole radius
e^(-pi*b/fs) and pole angle 2*pi*f/fs. These signals are the ground
truth the analysis chain is tested against.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .audio_io import AudioSignal, write_wav

# Reference F1/F2 centers (Hz) for the studied phonemes.
VOWEL_TABLE = {
    "ax": (631.0, 1049.0),
    "ae": (720.0, 1644.0),
    "aa": (573.0, 1311.0),
    "ah": (693.0, 1182.0),
}

# Typical centers for the additional phonemes of the second comparison;
# only used to make fully synthetic corpora cover all experiments.
EXTENDED_VOWEL_TABLE = {
    **VOWEL_TABLE,
    "ee": (530.0, 1840.0),
    "uu": (300.0, 870.0),
    "oo": (500.0, 900.0),
}

DEFAULT_BANDWIDTHS_HZ = (80.0, 100.0)
F0_RANGE_HZ = (90.0, 220.0)


@dataclass(frozen=True)
class VowelSpec:
    """Formant list (frequency, bandwidth), fundamental, duration, rate, peak."""

    formants: tuple[tuple[float, float], ...]
    f0: float
    duration: float = 1.0
    sample_rate: int = 10000
    amplitude: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "formants",
                           tuple((float(f), float(b)) for f, b in self.formants))
        if self.f0 <= 0:
            raise ValueError(f"f0 must be positive, got {self.f0}")
        for f, b in self.formants:
            if f >= self.sample_rate / 2.0:
                raise ValueError(f"formant {f} Hz at or above Nyquist "
                                 f"({self.sample_rate / 2:.0f} Hz)")
            if b <= 0:
                raise ValueError(f"bandwidth must be positive, got {b}")


def resonator_coeffs(freq_hz: float, bw_hz: float, sample_rate: float) -> tuple[float, float]:
    """Denominator a1, a2 of the two-pole resonator 1/(1 + a1 z^-1 + a2 z^-2)."""
    r = np.exp(-np.pi * bw_hz / sample_rate)
    theta = 2.0 * np.pi * freq_hz / sample_rate
    return -2.0 * r * np.cos(theta), r * r


def synth_vowel(spec: VowelSpec) -> AudioSignal:
    """Render one synthetic vowel; output is peak-normalized to spec.amplitude."""
    fs = spec.sample_rate
    n = int(round(spec.duration * fs))
    excitation = np.zeros(n)
    pulse_positions = np.round(np.arange(0, n, fs / spec.f0)).astype(int)
    excitation[pulse_positions[pulse_positions < n]] = 1.0

    y = excitation
    for freq, bw in spec.formants:
        a1, a2 = resonator_coeffs(freq, bw, fs)
        y = lfilter([1.0], [1.0, a1, a2], y)

    peak = np.max(np.abs(y))
    if spec.amplitude == 0.0 or peak == 0.0:
        return AudioSignal(np.zeros(n), fs)
    return AudioSignal(y * (spec.amplitude / peak), fs)


def synth_corpus(out_dir: str, table: dict[str, tuple[float, float]] | None = None,
                 n_per_label: int = 150, jitter_hz: float = 40.0, seed: int = 42,
                 duration: float = 1.0, sample_rate: int = 10000,
                 bandwidths: tuple[float, float] = DEFAULT_BANDWIDTHS_HZ,
                 f0_range: tuple[float, float] = F0_RANGE_HZ) -> str:
    """Emit a jittered synthetic corpus plus a dataset-compatible manifest.

    Per label, formant centers get seeded Gaussian jitter (sigma jitter_hz)
    and f0 draws uniformly from f0_range. Same seed, same bytes. Returns
    the manifest path.
    """
    if jitter_hz < 0:
        raise ValueError(f"jitter must be >= 0, got {jitter_hz}")
    table = table if table is not None else VOWEL_TABLE
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)

    rows = []
    for label in sorted(table):
        f1_c, f2_c = table[label]
        for i in range(n_per_label):
            f1 = f1_c + jitter_hz * rng.standard_normal()
            f2 = f2_c + jitter_hz * rng.standard_normal()
            f0 = rng.uniform(*f0_range)
            spec = VowelSpec(formants=((f1, bandwidths[0]), (f2, bandwidths[1])),
                             f0=f0, duration=duration, sample_rate=sample_rate)
            name = f"{label}_{i:03d}.wav"
            write_wav(synth_vowel(spec), os.path.join(out_dir, name))
            rows.append((name, label, "short", "normal", "level"))

    manifest_path = os.path.join(out_dir, "manifest.csv")
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "phoneme", "duration", "amplitude", "intonation"])
        writer.writerows(rows)
    return manifest_path
