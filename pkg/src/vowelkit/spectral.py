"""Shared numeric DSP kernels: autocorrelation, FFT periodogram, DCT.

The transform sizes here are small (frames of a few hundred samples,
filterbanks of a few dozen channels), so the kernels favour clarity:
an iterative radix-2 FFT and explicit orthonormal DCT matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided periodogram: power per bin over 0..fft_size/2."""

    power: np.ndarray
    bin_hz: float
    fft_size: int

    def __post_init__(self):
        arr = np.array(self.power, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "power", arr)

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.arange(len(self.power)) * self.bin_hz


def autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased autocorrelation r[k] = sum_n x[n] x[n+k] for k = 0..max_lag."""
    x = np.asarray(x, dtype=np.float64)
    if max_lag >= len(x):
        raise ValueError(f"max_lag {max_lag} must be < signal length {len(x)}")
    return np.array([np.dot(x[: len(x) - k], x[k:]) for k in range(max_lag + 1)])


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def fft(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT. Length must be a power of two."""
    a = np.asarray(x, dtype=np.complex128)
    n = len(a)
    if not _is_pow2(n):
        raise ValueError(f"FFT length {n} is not a power of two")
    if n == 1:
        return a.copy()

    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    a = a[rev]

    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(-1, size)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * twiddle
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        size *= 2
    return a


def dft_power(x: np.ndarray, fft_size: int, sample_rate: float = 1.0) -> Spectrum:
    """Periodogram estimate: |FFT(x zero-padded to fft_size)|^2 / len(x).

    The divisor is the original frame length, not the padded length.
    Returns the one-sided spectrum over bins 0..fft_size/2.
    """
    x = np.asarray(x, dtype=np.float64)
    if not _is_pow2(fft_size):
        raise ValueError(f"fft_size {fft_size} is not a power of two")
    if fft_size < len(x):
        raise ValueError(f"fft_size {fft_size} is smaller than frame length {len(x)}")
    padded = np.zeros(fft_size)
    padded[: len(x)] = x
    spectrum = fft(padded)[: fft_size // 2 + 1]
    power = (spectrum.real ** 2 + spectrum.imag ** 2) / len(x)
    return Spectrum(power=power, bin_hz=sample_rate / fft_size, fft_size=fft_size)


@lru_cache(maxsize=8)
def _dct2_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix: rows are cosine basis vectors."""
    k = np.arange(n)[:, None]
    grid = np.cos(np.pi * k * (2 * np.arange(n)[None, :] + 1) / (2 * n))
    grid[0, :] *= np.sqrt(1.0 / n)
    grid[1:, :] *= np.sqrt(2.0 / n)
    grid.setflags(write=False)
    return grid


def dct2(x: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II: C[k] = alpha(k) sum_n x[n] cos(pi k (2n+1) / 2N)."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 1:
        raise ValueError("dct2 requires a non-empty input")
    return _dct2_matrix(len(x)) @ x


def dct3(x: np.ndarray) -> np.ndarray:
    """Inverse of dct2 under the orthonormal convention."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 1:
        raise ValueError("dct3 requires a non-empty input")
    return _dct2_matrix(len(x)).T @ x


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    size = 1
    while size < n:
        size <<= 1
    return size
