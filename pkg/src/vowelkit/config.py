"""Analysis configuration: one flat namespace mirroring every tunable knob.

A config file may be JSON (``{"lpc_order": 14}``) or ``key=value`` lines;
both use the field names below. Unknown keys are rejected so typos fail
loudly instead of silently running with defaults.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .errors import VowelkitError


@dataclass(frozen=True)
class AnalysisConfig:
    # signal preparation
    analysis_rate_hz: int = 10000
    frame_duration_s: float = 0.040
    silence_rel_threshold: float = 0.05
    silence_chunk_ms: float = 10.0

    # LPC / formants
    lpc_order: int | None = None  # None -> 2 + analysis_rate_hz/1000
    formant_min_hz: float = 90.0
    formant_max_hz: float = 4000.0
    formant_max_bw_hz: float = 400.0

    # MFCC
    n_filters: int = 26
    n_cep: int = 13
    preemph: float = 0.97
    low_hz: float = 0.0
    high_hz: float | None = None  # None -> analysis_rate_hz/2
    log_floor: float = 1e-10
    # experimental multi-frame mode: slide short windows over the whole
    # voiced signal and average the vectors (default: one 40 ms frame)
    mfcc_multiframe: bool = False
    multiframe_window_s: float = 0.025
    multiframe_step_s: float = 0.010

    # dataset / split
    train_fraction: float = 2.0 / 3.0
    seed: int = 42
    stratified: bool = True
    outlier_sigma: float = 1.5

    # decision tree
    max_depth: int | None = None
    min_samples_split: int = 2

    # execution
    parallelism: int = 0  # 0 -> os.cpu_count()

    def effective_lpc_order(self) -> int:
        if self.lpc_order is not None:
            return self.lpc_order
        return 2 + self.analysis_rate_hz // 1000

    def effective_high_hz(self) -> float:
        if self.high_hz is not None:
            return self.high_hz
        return self.analysis_rate_hz / 2.0

    def effective_parallelism(self) -> int:
        if self.parallelism > 0:
            return self.parallelism
        return os.cpu_count() or 1

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kwargs) -> "AnalysisConfig":
        return dataclasses.replace(self, **kwargs)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(AnalysisConfig)}


def _coerce(name: str, raw: str):
    """Coerce a key=value string to the field's declared type."""
    text = raw.strip()
    if text.lower() in ("none", "null"):
        return None
    ftype = _FIELD_TYPES[name]
    if "bool" in ftype:
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise VowelkitError(f"config key {name!r}: expected a boolean, got {raw!r}")
    if ftype.startswith("int"):
        return int(text)
    return float(text)


def load_config(path: str | None = None, **overrides) -> AnalysisConfig:
    """Build an AnalysisConfig from an optional file plus keyword overrides."""
    values: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            try:
                values = json.loads(text)
            except json.JSONDecodeError as exc:
                raise VowelkitError(f"config file {path}: invalid JSON ({exc})") from exc
        else:
            for lineno, line in enumerate(text.splitlines(), start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise VowelkitError(f"config file {path}:{lineno}: expected key=value")
                key, _, raw = line.partition("=")
                key = key.strip()
                if key not in _FIELD_TYPES:
                    raise VowelkitError(f"config file {path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, raw)
        unknown = set(values) - set(_FIELD_TYPES)
        if unknown:
            raise VowelkitError(f"config file {path}: unknown keys {sorted(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return AnalysisConfig(**values)
