"""LPC model fitting and formant extraction.

The predictor convention is s[n] ~ sum_k a_k s[n-k], so the error filter
is A(z) = 1 - sum_k a_k z^-k. Formants are the low-bandwidth roots of
A(z) sorted by frequency; the spectral envelope is kept as a cross-check
view of the same poles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioSignal, resample
from .config import AnalysisConfig
from .errors import FormantsNotFoundError, SilentSignalError, UnstableModelError
from .preprocess import PreparedFrame, prepare
from .spectral import autocorrelation


@dataclass(frozen=True, eq=False)
class LpcModel:
    """All-pole model: order, predictor weights a_1..a_M, gain, residual."""

    order: int
    coeffs: np.ndarray
    gain: float
    residual_energy: float

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)


@dataclass(frozen=True)
class FormantEstimate:
    """First two formant frequencies and their bandwidths, in Hz."""

    f1: float
    f2: float
    bandwidths: tuple[float, float]


def lpc_fit(frame: PreparedFrame | np.ndarray, order: int) -> LpcModel:
    """Fit LPC coefficients by Levinson-Durbin on the frame autocorrelation.

    Raises SilentSignalError for a zero-energy frame and UnstableModelError
    if any reflection coefficient reaches magnitude 1.
    """
    x = frame.samples if isinstance(frame, PreparedFrame) else np.asarray(frame, dtype=float)
    if order < 1:
        raise ValueError(f"LPC order must be >= 1, got {order}")
    if len(x) <= order:
        raise ValueError(f"frame of {len(x)} samples too short for order {order}")

    r = autocorrelation(x, order)
    if r[0] <= 0.0:
        raise SilentSignalError("silent frame")

    a = np.zeros(order)
    err = r[0]
    for i in range(1, order + 1):
        k = (r[i] - np.dot(a[: i - 1], r[i - 1:0:-1])) / err
        if abs(k) >= 1.0:
            raise UnstableModelError(f"unstable model at order {i}: |k| = {abs(k):.6f}")
        a_prev = a[: i - 1].copy()
        a[i - 1] = k
        a[: i - 1] = a_prev - k * a_prev[::-1]
        err *= 1.0 - k * k
    return LpcModel(order=order, coeffs=a, gain=float(np.sqrt(err)),
                    residual_energy=float(err))


def lpc_envelope(model: LpcModel, n_points: int, sample_rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Spectral envelope H(f) = G^2 / |1 - sum_k a_k e^{-i 2 pi f k / fs}|^2.

    Returns (freqs_hz, power) over n_points uniform on [0, fs/2].
    """
    freqs = np.linspace(0.0, sample_rate / 2.0, n_points)
    k = np.arange(1, model.order + 1)
    phase = np.exp(-2j * np.pi * np.outer(freqs, k) / sample_rate)
    denom = 1.0 - phase @ model.coeffs
    return freqs, model.gain ** 2 / np.abs(denom) ** 2


def find_formants(model: LpcModel, sample_rate: float,
                  min_hz: float = 90.0, max_hz: float = 4000.0,
                  max_bw_hz: float = 400.0) -> FormantEstimate:
    """Extract F1/F2 from the roots of the error polynomial A(z).

    Each complex root with positive imaginary part maps to a candidate at
    f = (fs/2pi) arg(r) with bandwidth b = -(fs/pi) ln|r|; candidates must
    land in [min_hz, max_hz] with bandwidth <= max_bw_hz.
    """
    if model.order < 4:
        raise ValueError(f"formant extraction needs order >= 4, got {model.order}")
    poly = np.concatenate([[1.0], -model.coeffs])
    roots = np.roots(poly)
    roots = roots[roots.imag > 0.0]

    freqs = sample_rate / (2.0 * np.pi) * np.arctan2(roots.imag, roots.real)
    mags = np.abs(roots)
    bws = np.where(mags > 0, -(sample_rate / np.pi) * np.log(mags), np.inf)
    ok = (freqs >= min_hz) & (freqs <= max_hz) & (bws <= max_bw_hz)
    if np.count_nonzero(ok) < 2:
        raise FormantsNotFoundError(
            f"formants not found: {np.count_nonzero(ok)} candidate(s) "
            f"in [{min_hz:.0f}, {max_hz:.0f}] Hz with bandwidth <= {max_bw_hz:.0f} Hz")
    order = np.argsort(freqs[ok])
    cand_f = freqs[ok][order]
    cand_b = bws[ok][order]
    return FormantEstimate(f1=float(cand_f[0]), f2=float(cand_f[1]),
                           bandwidths=(float(cand_b[0]), float(cand_b[1])))


def formants_from_signal(signal: AudioSignal,
                         config: AnalysisConfig | None = None) -> tuple[FormantEstimate, LpcModel]:
    """Prepare a signal and run the full formant path. Returns (estimate, model)."""
    config = config or AnalysisConfig()
    prepared = prepare(resample(signal, config.analysis_rate_hz), config)
    model = lpc_fit(prepared, config.effective_lpc_order())
    estimate = find_formants(model, config.analysis_rate_hz,
                             min_hz=config.formant_min_hz,
                             max_hz=config.formant_max_hz,
                             max_bw_hz=config.formant_max_bw_hz)
    return estimate, model
