import numpy as np
import pytest

from vowelkit import AnalysisConfig, AudioSignal
from vowelkit.errors import SilentSignalError
from vowelkit.preprocess import (hamming_window, normalize_amplitude, prepare,
                                 prepare_segment, select_frame, trim_silence)

FS = 10000


def sine(freq, duration, fs=FS, amp=1.0):
    return amp * np.sin(2 * np.pi * freq * np.arange(int(duration * fs)) / fs)


def test_trim_silence_removes_constructed_padding():
    signal = AudioSignal(np.concatenate([np.zeros(FS // 2), sine(200, 1.0),
                                         np.zeros(FS // 2)]), FS)
    trimmed = trim_silence(signal, 0.05)
    assert abs(trimmed.duration - 1.0) <= 0.010


def test_trim_silence_identity_when_all_loud():
    signal = AudioSignal(sine(200, 0.5), FS)
    assert np.array_equal(trim_silence(signal, 0.05).samples, signal.samples)


def test_trim_silence_all_zero_errors():
    with pytest.raises(SilentSignalError, match="no voiced content"):
        trim_silence(AudioSignal(np.zeros(FS), FS), 0.05)


def test_trim_silence_threshold_validated():
    signal = AudioSignal(sine(200, 0.1), FS)
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError):
            trim_silence(signal, bad)


def test_trim_silence_keeps_loud_chunks():
    # no removed edge chunk may have RMS above the threshold
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.standard_normal(3000) * rng.uniform(0, 1, 3000) ** 4
        signal = AudioSignal(x / np.max(np.abs(x)), FS)
        trimmed = trim_silence(signal, 0.3)
        chunk = FS // 100
        rms = np.array([np.sqrt(np.mean(c ** 2))
                        for c in np.split(x, np.arange(chunk, len(x), chunk))])
        cutoff = 0.3 * rms.max()
        n_lead = int(np.argmax(rms >= cutoff))
        n_trail = int(np.argmax(rms[::-1] >= cutoff))
        assert all(r < cutoff for r in rms[:n_lead])
        assert all(r < cutoff for r in rms[len(rms) - n_trail:])
        # trimmed signal is the contiguous run between the loud boundaries
        start = n_lead * chunk
        assert np.array_equal(trimmed.samples,
                              x[start:start + len(trimmed)] / np.max(np.abs(x)))


def test_normalize_peak_scaling():
    signal = AudioSignal(np.array([0.25, -0.5]), FS)
    assert np.array_equal(normalize_amplitude(signal).samples, [0.5, -1.0])


def test_normalize_identity_and_idempotent():
    signal = AudioSignal(np.array([0.3, -1.0, 0.7]), FS)
    once = normalize_amplitude(signal)
    assert np.array_equal(once.samples, signal.samples)
    assert np.array_equal(normalize_amplitude(once).samples, once.samples)


def test_normalize_all_zero_errors():
    with pytest.raises(SilentSignalError):
        normalize_amplitude(AudioSignal(np.zeros(8), FS))


def test_select_frame_length_contract():
    frame = select_frame(AudioSignal(sine(210, 1.0), FS), 0.040)
    assert len(frame) == round(0.040 * FS)
    assert not frame.windowed


def test_select_frame_prefers_steady_region():
    # rising-amplitude chirp followed by a steady sine: the stationary
    # window must land inside the sine
    t = np.arange(FS // 2) / FS
    chirp = np.sin(2 * np.pi * (100 + 3800 * t) * t) * (0.2 + 0.8 * t / t[-1])
    steady = 0.8 * sine(200, 0.5)
    signal = AudioSignal(np.concatenate([chirp, steady]), FS)
    frame = select_frame(signal, 0.040)
    assert frame.source_offset >= len(chirp)

    # brute-force oracle: energy variance at every chunk-aligned offset
    x = signal.samples
    chunk, frame_len = FS // 100, round(0.040 * FS)
    csum = np.concatenate([[0.0], np.cumsum(x ** 2)])

    def energy_var(off):
        edges = off + np.arange(5) * chunk
        return np.var(csum[edges[1:]] - csum[edges[:-1]])

    offsets = list(range(0, len(x) - frame_len + 1, chunk))
    assert frame.source_offset == min(offsets, key=energy_var)


def test_select_frame_too_short_errors():
    with pytest.raises(ValueError, match="shorter"):
        select_frame(AudioSignal(sine(200, 0.030), FS), 0.040)


def test_select_frame_is_contiguous_slice():
    rng = np.random.default_rng(11)
    signal = AudioSignal(rng.standard_normal(2000), FS)
    frame = select_frame(signal, 0.040)
    off = frame.source_offset
    assert np.array_equal(frame.samples, signal.samples[off:off + len(frame)])


@pytest.mark.parametrize("n", [2, 5, 16, 401])
def test_hamming_endpoints(n):
    w = hamming_window(n)
    assert w[0] == pytest.approx(0.08, abs=1e-12)
    assert w[-1] == pytest.approx(0.08, abs=1e-12)


def test_hamming_center_of_odd_window():
    w = hamming_window(401)
    assert w[200] == pytest.approx(1.0, abs=1e-12)


def test_hamming_n4_values():
    # w[1] = 0.54 - 0.46 cos(2 pi / 3) = 0.54 + 0.23
    assert hamming_window(4) == pytest.approx([0.08, 0.77, 0.77, 0.08], abs=1e-12)


def test_hamming_symmetry():
    for n in (4, 7, 64, 400):
        w = hamming_window(n)
        assert np.max(np.abs(w - w[::-1])) <= 1e-12


def test_hamming_too_short():
    with pytest.raises(ValueError):
        hamming_window(1)


def test_prepare_composition(make_vowel, config):
    signal = make_vowel(693.0, 1182.0)
    padded = AudioSignal(np.concatenate([np.zeros(FS // 4), signal.samples]), FS)
    segment = prepare_segment(padded, config)
    assert len(segment) == round(config.frame_duration_s * FS)
    # peak of the normalized signal is 1; a 40 ms window of a periodic
    # vowel contains several full periods, so its own peak is close to 1
    assert np.max(np.abs(segment.samples)) >= 0.95

    frame = prepare(padded, config)
    assert frame.windowed
    expected = segment.samples * hamming_window(len(segment))
    assert np.array_equal(frame.samples, expected)


def test_prepare_deterministic(make_vowel, config):
    signal = make_vowel(631.0, 1049.0, f0=140.0)
    first = prepare(signal, config)
    second = prepare(signal, config)
    assert np.array_equal(first.samples, second.samples)
    assert first.source_offset == second.source_offset
