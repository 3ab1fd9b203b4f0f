import pytest

from vowelkit import AnalysisConfig
from vowelkit.synth import VowelSpec, synth_vowel


@pytest.fixture
def config():
    return AnalysisConfig()


@pytest.fixture
def make_vowel():
    """Factory for synthetic two-formant vowels with known ground truth."""

    def _make(f1, f2, f0=120.0, duration=1.0, sample_rate=10000,
              bandwidths=(80.0, 100.0), amplitude=0.8):
        spec = VowelSpec(formants=((f1, bandwidths[0]), (f2, bandwidths[1])),
                         f0=f0, duration=duration, sample_rate=sample_rate,
                         amplitude=amplitude)
        return synth_vowel(spec)

    return _make
