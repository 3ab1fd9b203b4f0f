"""vowelkit: LPC formant and MFCC extraction with decision-tree vowel
classification, plus a synthetic-vowel oracle for verification."""

from .audio_io import AudioSignal, read_wav, resample, write_wav
from .classifier import DecisionTree, EvalResult, evaluate, fit, predict
from .config import AnalysisConfig, load_config
from .dataset import (CorpusEntry, LabeledFeature, Manifest, SplitSpec,
                      filter_outliers, load_manifest, split)
from .formants import (FormantEstimate, LpcModel, find_formants,
                       formants_from_signal, lpc_envelope, lpc_fit)
from .mfcc import (MelFilterbank, MfccVector, build_filterbank, hz_to_mel,
                   mfcc, mfcc_multiframe)
from .pca import PcaModel, pca_fit, pca_project
from .pipeline import EXPERIMENTS, run_pipeline
from .preprocess import (PreparedFrame, hamming_window, normalize_amplitude,
                         prepare, prepare_segment, select_frame, trim_silence)
from .spectral import Spectrum, autocorrelation, dct2, dct3, dft_power
from .synth import VOWEL_TABLE, VowelSpec, synth_corpus, synth_vowel

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig", "AudioSignal", "CorpusEntry", "DecisionTree",
    "EvalResult", "EXPERIMENTS", "FormantEstimate", "LabeledFeature",
    "LpcModel", "Manifest", "MelFilterbank", "MfccVector", "PcaModel",
    "PreparedFrame", "Spectrum", "SplitSpec", "VOWEL_TABLE", "VowelSpec",
    "autocorrelation", "build_filterbank", "dct2", "dct3", "dft_power",
    "evaluate", "filter_outliers", "find_formants", "fit",
    "formants_from_signal", "hamming_window", "hz_to_mel", "load_config",
    "load_manifest", "lpc_envelope", "lpc_fit", "mfcc", "mfcc_multiframe",
    "normalize_amplitude",
    "pca_fit", "pca_project", "predict", "prepare", "prepare_segment",
    "read_wav", "resample", "run_pipeline", "select_frame", "split",
    "synth_corpus", "synth_vowel", "trim_silence", "write_wav",
]
