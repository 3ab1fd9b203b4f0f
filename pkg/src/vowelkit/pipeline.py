"""End-to-end experiment runner.

For every manifest entry: decode, resample, prepare a 40 ms frame, and
extract both feature kinds. Formant outliers (per-vowel 1.5-sigma rule)
are discarded once, and the surviving file set gates every experiment,
formant- and MFCC-based alike. Each configured experiment then splits,
fits a decision tree, and reports accuracy with its confusion matrix.

Outputs under the run directory: report.json (canonical, deterministic),
report.md, features.jsonl, and one SVG per experiment plot.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .audio_io import read_wav, resample
from .classifier import evaluate, fit, to_json_lines
from .config import AnalysisConfig
from .dataset import (LabeledFeature, SplitSpec, filter_outliers, load_manifest,
                      split, write_feature_cache)
from .errors import ManifestError, VowelkitError
from .formants import find_formants, lpc_fit
from .mfcc import mfcc, mfcc_multiframe
from .pca import pca_fit, pca_project
from .preprocess import apply_window, prepare_segment

# The five comparisons of the study: feature kind + phoneme roster.
EXPERIMENTS = (
    ("formants_4vowel", "formants", ("aa", "ae", "ah", "ax")),
    ("mfcc_4vowel", "mfcc", ("aa", "ae", "ah", "ax")),
    ("mfcc_3vowel", "mfcc", ("ae", "ah", "ax")),
    ("mfcc_distinct_4vowel", "mfcc", ("ah", "ee", "oo", "uu")),
    ("mfcc_distinct_3vowel", "mfcc", ("ah", "ee", "uu")),
)


@dataclass
class FileFeatures:
    path: str
    label: str
    formants: tuple[float, float] | None = None
    mfcc: np.ndarray | None = None
    error: str | None = None


def extract_file_features(entry_path: str, label: str,
                          config: AnalysisConfig) -> FileFeatures:
    """Decode one file and run both feature paths on its prepared frame."""
    signal = resample(read_wav(entry_path), config.analysis_rate_hz)
    segment = prepare_segment(signal, config)  # unwindowed 40 ms frame
    windowed = apply_window(segment)

    model = lpc_fit(windowed, config.effective_lpc_order())
    estimate = find_formants(model, config.analysis_rate_hz,
                             min_hz=config.formant_min_hz,
                             max_hz=config.formant_max_hz,
                             max_bw_hz=config.formant_max_bw_hz)
    if config.mfcc_multiframe:
        vector = mfcc_multiframe(signal, config, label=label)
    else:
        vector = mfcc(segment, config, label=label)
    return FileFeatures(path=entry_path, label=label,
                        formants=(estimate.f1, estimate.f2),
                        mfcc=vector.coeffs)


def _extract_all(entries, config: AnalysisConfig) -> list[FileFeatures]:
    """Fan feature extraction out over a worker pool, keeping manifest order."""
    def work(item):
        index, entry = item
        try:
            return index, extract_file_features(entry.path, entry.phoneme, config)
        except (VowelkitError, OSError, ValueError) as exc:
            return index, FileFeatures(path=entry.path, label=entry.phoneme,
                                       error=f"{type(exc).__name__}: {exc}")

    results: list[FileFeatures | None] = [None] * len(entries)
    with ThreadPoolExecutor(max_workers=config.effective_parallelism()) as pool:
        for index, feat in pool.map(work, enumerate(entries)):
            results[index] = feat
    return results  # type: ignore[return-value]


def _formant_stats(samples: list[LabeledFeature]) -> dict:
    stats: dict[str, dict] = {}
    by_label: dict[str, list[np.ndarray]] = {}
    for s in samples:
        by_label.setdefault(s.label, []).append(s.features)
    for label in sorted(by_label):
        block = np.stack(by_label[label])
        stats[label] = {
            "n": len(block),
            "f1_mean": float(block[:, 0].mean()),
            "f1_std": float(block[:, 0].std()),
            "f2_mean": float(block[:, 1].mean()),
            "f2_std": float(block[:, 1].std()),
        }
    return stats


def _run_experiment(name: str, kind: str, roster: tuple[str, ...],
                    samples: list[LabeledFeature], config: AnalysisConfig):
    """Returns (record, fitted tree or None)."""
    result = {"name": name, "feature_kind": kind, "labels": list(roster),
              "status": "ok", "reason": None, "n_train": 0, "n_test": 0,
              "accuracy": None, "confusion": None, "confusion_labels": None,
              "pca": None, "points": None, "tree": None}
    subset = [s for s in samples if s.label in roster]
    present = sorted({s.label for s in subset})
    counts = {lbl: sum(1 for s in subset if s.label == lbl) for lbl in present}
    if len(present) < 2 or any(c < 3 for c in counts.values()):
        result["status"] = "skipped"
        result["reason"] = (f"insufficient data: labels present {counts}"
                            if counts else "no samples for this phoneme set")
        return result, None

    if kind == "mfcc":
        matrix = np.stack([s.features for s in subset])
        model = pca_fit(matrix, n_components=2)
        projected = pca_project(model, matrix)
        result["pca"] = {
            "mean": model.mean.tolist(),
            "components": model.components.tolist(),
            "explained_variance": model.explained_variance.tolist(),
        }
        result["points"] = [[float(x), float(y), s.label]
                            for (x, y), s in zip(projected, subset)]
    else:
        result["points"] = [[float(s.features[0]), float(s.features[1]), s.label]
                            for s in subset]

    train, test = split(subset, SplitSpec(train_fraction=config.train_fraction,
                                          seed=config.seed,
                                          stratified=config.stratified))
    tree = fit(train, max_depth=config.max_depth,
               min_samples_split=config.min_samples_split)
    ev = evaluate(tree, test)
    result.update(n_train=len(train), n_test=len(test),
                  accuracy=ev.accuracy,
                  confusion=ev.confusion.tolist(),
                  confusion_labels=list(ev.labels))
    return result, tree


def run_pipeline(manifest_path: str, out_dir: str,
                 config: AnalysisConfig | None = None,
                 render_plots: bool = True) -> dict:
    """Run the full experiment and write report artifacts. Returns the report dict."""
    config = config or AnalysisConfig()
    os.makedirs(out_dir, exist_ok=True)

    manifest = load_manifest(manifest_path)
    extracted = _extract_all(manifest.entries, config)

    failures = [{"path": f.path, "error": f.error} for f in extracted if f.error]
    usable = [f for f in extracted if f.error is None]
    if not usable:
        raise ManifestError(f"zero usable files in {manifest_path}")

    formant_features = [LabeledFeature(features=np.array(f.formants), label=f.label,
                                       path=f.path) for f in usable]
    filtered = filter_outliers(formant_features, sigma_mult=config.outlier_sigma)
    kept_paths = {s.path for s in filtered.kept}

    kept_formants = list(filtered.kept)
    kept_mfcc = [LabeledFeature(features=f.mfcc, label=f.label, path=f.path)
                 for f in usable if f.path in kept_paths]

    cache_records = []
    for f in usable:
        cache_records.append({"path": f.path, "label": f.label, "kind": "formants",
                              "values": [float(v) for v in f.formants]})
        cache_records.append({"path": f.path, "label": f.label, "kind": "mfcc",
                              "values": [float(v) for v in f.mfcc]})
    cache_path = os.path.join(out_dir, "features.jsonl")
    write_feature_cache(cache_path, cache_records)

    experiments = []
    tree_dir = os.path.join(out_dir, "trees")
    for name, kind, roster in EXPERIMENTS:
        samples = kept_formants if kind == "formants" else kept_mfcc
        record, tree = _run_experiment(name, kind, roster, samples, config)
        if tree is not None:
            os.makedirs(tree_dir, exist_ok=True)
            rel = os.path.join("trees", f"{name}.jsonl")
            with open(os.path.join(out_dir, rel), "w", encoding="utf-8") as fh:
                fh.write(to_json_lines(tree))
            record["tree"] = rel
        experiments.append(record)

    n_loaded = len(manifest.entries) + manifest.n_excluded
    counts = {
        "loaded": n_loaded,
        "excluded_selection": manifest.n_excluded,
        "failed": len(failures),
        "excluded": manifest.n_excluded + len(failures),
        "discarded": len(filtered.discarded),
        "kept": len(filtered.kept),
    }
    assert counts["loaded"] == counts["kept"] + counts["excluded"] + counts["discarded"]

    report = {
        "config": config.to_dict(),
        "seed": config.seed,
        "manifest": os.path.abspath(manifest_path),
        "counts": counts,
        "formant_stats": _formant_stats(kept_formants),
        "outlier_stats": filtered.stats,
        "experiments": experiments,
        "failures": failures,
        "feature_cache": "features.jsonl",
        "plots": [],
    }

    if render_plots:
        from .plots import render_report_plots
        report["plots"] = render_report_plots(report, out_dir)

    write_report(report, out_dir)
    return report


def report_json(report: dict) -> str:
    """Canonical report serialization: sorted keys, stable layout."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: dict, out_dir: str) -> None:
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report_json(report))
    with open(os.path.join(out_dir, "report.md"), "w", encoding="utf-8") as fh:
        fh.write(report_markdown(report))


def report_markdown(report: dict) -> str:
    """Human-readable summary of one pipeline run."""
    counts = report["counts"]
    lines = [
        "# Vowel classification report",
        "",
        f"Seed: {report['seed']}",
        "",
        "## Corpus counts",
        "",
        f"- manifest rows: {counts['loaded']}",
        f"- excluded by selection rules: {counts['excluded_selection']}",
        f"- failed extraction: {counts['failed']}",
        f"- discarded by the 1.5-sigma formant filter: {counts['discarded']}",
        f"- analyzed: {counts['kept']}",
        "",
        "## Accuracies",
        "",
        "| experiment | features | phonemes | train/test | accuracy |",
        "|---|---|---|---|---|",
    ]
    for exp in report["experiments"]:
        if exp["status"] != "ok":
            lines.append(f"| {exp['name']} | {exp['feature_kind']} | "
                         f"{' '.join(exp['labels'])} | - | skipped ({exp['reason']}) |")
        else:
            lines.append(f"| {exp['name']} | {exp['feature_kind']} | "
                         f"{' '.join(exp['labels'])} | {exp['n_train']}/{exp['n_test']} | "
                         f"{exp['accuracy']:.1f}% |")
    lines += ["", "## Formant statistics (Hz, analyzed files)", "",
              "| phoneme | n | F1 mean | F1 std | F2 mean | F2 std |",
              "|---|---|---|---|---|---|"]
    for label, st in sorted(report["formant_stats"].items()):
        lines.append(f"| {label} | {st['n']} | {st['f1_mean']:.0f} | "
                     f"{st['f1_std']:.0f} | {st['f2_mean']:.0f} | {st['f2_std']:.0f} |")
    if report["plots"]:
        lines += ["", "## Plots", ""]
        lines += [f"- {p}" for p in report["plots"]]
    if report["failures"]:
        lines += ["", "## Failures", ""]
        lines += [f"- `{f['path']}`: {f['error']}" for f in report["failures"]]
    return "\n".join(lines) + "\n"
