"""vowelkit command line: pipeline, formants, mfcc, synth, plot.

Exit codes: 0 success, 1 usage error, 2 data error (missing/undecodable
input), 3 numeric analysis failure (silent frame, unstable model, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .audio_io import read_wav, resample
from .config import load_config
from .errors import (AudioFormatError, FormantsNotFoundError, ManifestError,
                     SilentSignalError, UnstableModelError, VowelkitError)
from .formants import formants_from_signal
from .mfcc import mfcc
from .preprocess import prepare_segment
from .synth import EXTENDED_VOWEL_TABLE, VOWEL_TABLE, synth_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="vowelkit",
                     description="Vowel formant/MFCC extraction and classification")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pipeline", help="run the full experiment over a corpus manifest")
    p.add_argument("--manifest", required=True, help="corpus manifest CSV")
    p.add_argument("--out", required=True, help="output directory for report artifacts")
    p.add_argument("--seed", type=int, default=None, help="split seed (default 42)")
    p.add_argument("--config", default=None, help="config file (JSON or key=value)")
    p.add_argument("--no-stratify", action="store_true",
                   help="plain shuffled split instead of per-phoneme stratification")

    p = sub.add_parser("formants", help="print F1/F2 of one WAV file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.add_argument("--config", default=None)

    p = sub.add_parser("mfcc", help="print the cepstral coefficients of one WAV file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.add_argument("--config", default=None)

    p = sub.add_parser("synth", help="generate a synthetic vowel corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=int, default=150, help="files per phoneme")
    p.add_argument("--jitter", type=float, default=40.0, help="formant jitter sigma, Hz")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--preset", choices=("studied", "extended"), default="studied",
                   help="'studied' = the four measured phonemes; 'extended' adds ee/uu/oo")

    p = sub.add_parser("plot", help="re-render scatter plots from a saved report")
    p.add_argument("--report", required=True, help="report.json from a pipeline run")
    p.add_argument("--kind", required=True, choices=("formants", "pca"))
    p.add_argument("--out", default=None, help="plot directory (default: next to report)")
    return parser


def _cmd_pipeline(args) -> int:
    from .pipeline import run_pipeline

    config = load_config(args.config, seed=args.seed)
    if args.no_stratify:
        config = config.replace(stratified=False)
    report = run_pipeline(args.manifest, args.out, config)
    print(f"report written to {os.path.join(args.out, 'report.json')} "
          f"(seed {report['seed']})")
    for exp in report["experiments"]:
        if exp["status"] == "ok":
            print(f"  {exp['name']}: {exp['accuracy']:.1f}% "
                  f"({exp['n_train']} train / {exp['n_test']} test)")
        else:
            print(f"  {exp['name']}: skipped ({exp['reason']})")
    return EXIT_OK


def _cmd_formants(args) -> int:
    config = load_config(args.config)
    estimate, model = formants_from_signal(read_wav(args.file), config)
    if args.as_json:
        print(json.dumps({"f1_hz": estimate.f1, "f2_hz": estimate.f2,
                          "bandwidths_hz": list(estimate.bandwidths),
                          "lpc_order": model.order}, sort_keys=True))
    else:
        print(f"F1 = {estimate.f1:.1f} Hz, F2 = {estimate.f2:.1f} Hz "
              f"(LPC order {model.order})")
    return EXIT_OK


def _cmd_mfcc(args) -> int:
    config = load_config(args.config)
    signal = resample(read_wav(args.file), config.analysis_rate_hz)
    vector = mfcc(prepare_segment(signal, config), config)
    if args.as_json:
        print(json.dumps({"coeffs": vector.coeffs.tolist(),
                          "n_cep": len(vector.coeffs)}, sort_keys=True))
    else:
        print(" ".join(f"{c:.4f}" for c in vector.coeffs))
    return EXIT_OK


def _cmd_synth(args) -> int:
    table = VOWEL_TABLE if args.preset == "studied" else EXTENDED_VOWEL_TABLE
    manifest = synth_corpus(args.out, table=table, n_per_label=args.n,
                            jitter_hz=args.jitter, seed=args.seed)
    print(manifest)
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .plots import render_experiment_plot

    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    out_dir = args.out or os.path.join(os.path.dirname(os.path.abspath(args.report)),
                                       "plots")
    os.makedirs(out_dir, exist_ok=True)
    wanted = "formants" if args.kind == "formants" else "mfcc"
    rendered = []
    for exp in report["experiments"]:
        if exp["feature_kind"] == wanted:
            filename = render_experiment_plot(exp, out_dir)
            if filename:
                rendered.append(os.path.join(out_dir, filename))
    if not rendered:
        raise ManifestError(f"report has no plottable {args.kind} experiments")
    for path in rendered:
        print(path)
    return EXIT_OK


_HANDLERS = {
    "pipeline": _cmd_pipeline,
    "formants": _cmd_formants,
    "mfcc": _cmd_mfcc,
    "synth": _cmd_synth,
    "plot": _cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"vowelkit: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (AudioFormatError, ManifestError) as exc:
        print(f"vowelkit: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SilentSignalError, UnstableModelError, FormantsNotFoundError) as exc:
        print(f"vowelkit: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VowelkitError as exc:  # config problems and other usage-level errors
        print(f"vowelkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"vowelkit: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
