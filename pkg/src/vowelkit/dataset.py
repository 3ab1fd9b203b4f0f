"""Corpus manifest handling, the per-vowel outlier filter, and
reproducible stratified train/test splits.

The split shuffles with a splitmix64 stream feeding Fisher-Yates so the
partition is reproducible from the integer seed alone, independent of
any library RNG.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ManifestError

log = logging.getLogger(__name__)

PHONEME_LABELS = ("aa", "ae", "ah", "ax", "ee", "oo", "uu")
DURATION_CLASSES = ("short", "long")
AMPLITUDE_CLASSES = ("quiet", "normal", "loud")
INTONATION_CLASSES = ("level",)

MANIFEST_COLUMNS = ("path", "phoneme", "duration", "amplitude", "intonation")


@dataclass(frozen=True)
class CorpusEntry:
    path: str
    phoneme: str
    duration_class: str
    amplitude_class: str
    intonation_class: str


@dataclass(frozen=True)
class Manifest:
    """Selected corpus entries plus the count of rows the selection rules excluded."""

    entries: tuple[CorpusEntry, ...]
    n_excluded: int
    source: str

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class LabeledFeature:
    """A feature vector (2 formants or n_cep MFCCs) tagged with its phoneme."""

    features: np.ndarray
    label: str
    path: str | None = None

    def __post_init__(self):
        arr = np.array(self.features, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "features", arr)
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite feature values for {self.path or self.label}")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 2.0 / 3.0
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def load_manifest(path: str, labels: tuple[str, ...] = PHONEME_LABELS) -> Manifest:
    """Parse a corpus manifest CSV and apply the selection rules.

    Columns: path,phoneme,duration,amplitude,intonation. Rows whose
    duration/amplitude/intonation fall outside the selected classes are
    excluded (counted); an unknown phoneme is an error. Relative audio
    paths are resolved against the manifest's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ManifestError(f"empty manifest: {path}")
        missing = [c for c in MANIFEST_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ManifestError(f"manifest {path} missing columns: {', '.join(missing)}")

        entries: list[CorpusEntry] = []
        n_excluded = 0
        for lineno, row in enumerate(reader, start=2):
            phoneme = (row["phoneme"] or "").strip()
            if phoneme not in labels:
                raise ManifestError(
                    f"manifest {path}:{lineno}: unknown phoneme label {phoneme!r}")
            duration = (row["duration"] or "").strip()
            amplitude = (row["amplitude"] or "").strip()
            intonation = (row["intonation"] or "").strip()
            if (duration not in DURATION_CLASSES
                    or amplitude not in AMPLITUDE_CLASSES
                    or intonation not in INTONATION_CLASSES):
                n_excluded += 1
                continue
            wav_path = row["path"].strip()
            if not os.path.isabs(wav_path):
                wav_path = os.path.join(base, wav_path)
            entries.append(CorpusEntry(path=wav_path, phoneme=phoneme,
                                       duration_class=duration,
                                       amplitude_class=amplitude,
                                       intonation_class=intonation))
    if not entries and n_excluded == 0:
        raise ManifestError(f"empty manifest: {path}")
    return Manifest(entries=tuple(entries), n_excluded=n_excluded, source=path)


@dataclass(frozen=True, eq=False)
class OutlierFilterResult:
    kept: tuple[LabeledFeature, ...]
    discarded: tuple[LabeledFeature, ...]
    stats: dict = field(default_factory=dict)  # label -> {mean, std, n}


def filter_outliers(data: list[LabeledFeature], sigma_mult: float = 1.5) -> OutlierFilterResult:
    """Keep samples whose every feature deviates from its label's mean by
    strictly less than sigma_mult standard deviations.

    Statistics (mean and population std per label per dimension) come from
    a single pass over the full input and are not recomputed after removal.
    A zero-deviation sample is always kept, so a zero-variance dimension
    retains exactly the samples sitting at the mean.
    """
    by_label: dict[str, list[int]] = {}
    for i, sample in enumerate(data):
        by_label.setdefault(sample.label, []).append(i)

    stats: dict[str, dict] = {}
    keep_mask = np.zeros(len(data), dtype=bool)
    for label in sorted(by_label):
        idx = by_label[label]
        if len(idx) < 2:
            raise ValueError(f"label {label!r} needs >= 2 samples, got {len(idx)}")
        block = np.stack([data[i].features for i in idx])
        mean = block.mean(axis=0)
        std = block.std(axis=0)  # population standard deviation
        if np.any(std == 0.0) and len(np.unique(block, axis=0)) > 1:
            log.warning("label %s has a zero-variance feature dimension; "
                        "only exact-mean samples survive it", label)
        dev = np.abs(block - mean)
        ok = np.all((dev < sigma_mult * std) | (dev == 0.0), axis=1)
        keep_mask[idx] = ok
        stats[label] = {"mean": mean.tolist(), "std": std.tolist(), "n": len(idx)}

    kept = tuple(s for i, s in enumerate(data) if keep_mask[i])
    discarded = tuple(s for i, s in enumerate(data) if not keep_mask[i])
    return OutlierFilterResult(kept=kept, discarded=discarded, stats=stats)


_MASK64 = (1 << 64) - 1


def splitmix64(seed: int):
    """Infinite stream of 64-bit values from the splitmix64 mixer."""
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def _fisher_yates(items: list, stream) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = next(stream) % (i + 1)
        items[i], items[j] = items[j], items[i]


def split(data: list[LabeledFeature],
          spec: SplitSpec) -> tuple[list[LabeledFeature], list[LabeledFeature]]:
    """Deterministic (seeded) partition into train and test sets.

    Stratified mode shuffles within each label and sends the first
    floor(n_label * train_fraction) samples to train. Output preserves
    the input ordering within each side.
    """
    stream = splitmix64(spec.seed)
    train_idx: list[int] = []
    test_idx: list[int] = []

    if spec.stratified:
        by_label: dict[str, list[int]] = {}
        for i, sample in enumerate(data):
            by_label.setdefault(sample.label, []).append(i)
        for label in sorted(by_label):
            idx = list(by_label[label])
            n_train = int(len(idx) * spec.train_fraction)
            if n_train < 1 or len(idx) - n_train < 1:
                raise ValueError(
                    f"label {label!r} has {len(idx)} samples, too few for a "
                    f"{spec.train_fraction:.3f} split with a non-empty test side")
            _fisher_yates(idx, stream)
            train_idx.extend(idx[:n_train])
            test_idx.extend(idx[n_train:])
    else:
        idx = list(range(len(data)))
        n_train = int(len(idx) * spec.train_fraction)
        if n_train < 1 or len(idx) - n_train < 1:
            raise ValueError(f"{len(idx)} samples is too few to split")
        _fisher_yates(idx, stream)
        train_idx, test_idx = idx[:n_train], idx[n_train:]

    train_idx.sort()
    test_idx.sort()
    return [data[i] for i in train_idx], [data[i] for i in test_idx]


def write_feature_cache(path: str, records: list[dict]) -> None:
    """Write per-file feature records as line-delimited JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_feature_cache(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
