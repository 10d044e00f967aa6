"""Experiment-run persistence and the power-versus-illuminance characterization.

A run is an ordered list of PowerSamples plus descriptive metadata.  The
headline operation, `characterize`, drops pre-ignition samples, fits the
log-domain cubic of illuminance against plasma power, and optionally runs a
single 3-sigma outlier-trim pass for ignition transients.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .acquisition import PowerSample, detect_ignition
from .calibration import (
    CalibrationCurve,
    CalibrationSample,
    InputKind,
    curve_from_dict,
    curve_to_dict,
    fit_log_cubic,
    fit_residuals,
    trim_refit,
)
from .errors import DomainError, FitError, RowError, SchemaError

__all__ = [
    "ExperimentMeta",
    "ExperimentRun",
    "Characterization",
    "load_run",
    "save_run",
    "characterize",
    "summary_stats",
    "save_characterization",
    "load_characterization",
]


@dataclass(frozen=True)
class ExperimentMeta:
    """Descriptive run metadata; no physics is derived from these fields."""

    ballast_ohms: Optional[float] = None
    supply_max_volts: Optional[float] = None
    ignition_threshold_volts: Optional[float] = None
    gap_mm: Optional[float] = None
    notes: str = ""

    def __post_init__(self):
        for name in ("ballast_ohms", "supply_max_volts", "ignition_threshold_volts", "gap_mm"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise DomainError(f"{name} must be positive when present, got {value}")


@dataclass(frozen=True)
class ExperimentRun:
    samples: tuple[PowerSample, ...]
    meta: ExperimentMeta = field(default_factory=ExperimentMeta)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        ts = [s.t_ms for s in self.samples]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise DomainError("run timestamps must be non-decreasing")


@dataclass(frozen=True)
class Characterization:
    """Fitted power-to-illuminance curve plus fit bookkeeping."""

    curve: CalibrationCurve
    rmse_log: float
    max_abs_log: float
    input_range: tuple[float, float]
    trimmed_count: int

    def __post_init__(self):
        lo, hi = self.input_range
        if not (0.0 < lo <= hi):
            raise DomainError(f"input_range must be positive and ordered, got {self.input_range}")
        if self.trimmed_count < 0:
            raise DomainError("trimmed_count must be >= 0")
        object.__setattr__(self, "input_range", (float(lo), float(hi)))


# Default column names of the engineering CSV; a schema_map entry is
# (source_column, scale_to_canonical_unit).
_CANONICAL = {"t_ms": 1.0, "v_volts": 1.0, "i_amps": 1.0, "p_watts": 1.0, "lux": 1.0}


def load_run(source: TextIO | str,
             schema_map: Optional[dict[str, tuple[str, float]]] = None,
             meta: Optional[ExperimentMeta] = None,
             strict: bool = True,
             diagnostics: Optional[list] = None) -> ExperimentRun:
    """Load an engineering-unit CSV as an ExperimentRun.

    schema_map renames and rescales columns, e.g.
    {"v_volts": ("voltage_kv", 1e3), "i_amps": ("current_ma", 1e-3)}.
    p_watts is recomputed from v*i when absent.  t_ms and lux are optional:
    missing timestamps become the row index.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_run(fh, schema_map, meta, strict, diagnostics)
    schema_map = schema_map or {}
    reader = csv.DictReader(source)
    fields = set(reader.fieldnames or ())

    def column(name: str) -> tuple[Optional[str], float]:
        if name in schema_map:
            src, scale = schema_map[name]
            if src not in fields:
                raise SchemaError(f"mapped column {src!r} for {name!r} not in file")
            return src, scale
        return (name, 1.0) if name in fields else (None, 1.0)

    v_col, v_scale = column("v_volts")
    i_col, i_scale = column("i_amps")
    if v_col is None or i_col is None:
        raise SchemaError(f"run CSV must provide v_volts and i_amps (have {sorted(fields)})")
    t_col, t_scale = column("t_ms")
    lux_col, lux_scale = column("lux")

    samples = []
    for line_no, row in enumerate(reader, start=2):
        idx = line_no - 2
        try:
            v = float(row[v_col]) * v_scale
            i = float(row[i_col]) * i_scale
            t = float(row[t_col]) * t_scale if t_col else float(idx)
            lux_raw = row.get(lux_col) if lux_col else None
            lux = float(lux_raw) * lux_scale if lux_raw not in (None, "") else None
            samples.append(PowerSample.from_vi(t, v, i, lux=lux))
        except (ValueError, TypeError, KeyError, DomainError) as exc:
            err = RowError(line_no, str(exc))
            if strict:
                raise err from exc
            if diagnostics is not None:
                diagnostics.append(err)
    return ExperimentRun(samples=tuple(samples), meta=meta or ExperimentMeta())


def save_run(run: ExperimentRun, path) -> None:
    """Write the run back out in the canonical engineering CSV layout."""
    from .acquisition import write_samples_csv

    with _atomic_writer(path) as fh:
        write_samples_csv(run.samples, fh)


def characterize(run: ExperimentRun, trim: bool = False,
                 ignition_i_min: float = 1e-3,
                 ignition_sustain: int = 3) -> Characterization:
    """Fit the power-to-illuminance curve of a run.

    Pre-ignition samples (before the first sustained |i| >= ignition_i_min)
    are dropped, then samples with non-positive power or missing/zero lux.
    With trim=True a single 3-sigma trim-and-refit pass removes transient
    outliers, guarded to never discard more than 20% of the data.
    """
    t0 = detect_ignition(run.samples, i_min=ignition_i_min, sustain=ignition_sustain)
    post = [s for s in run.samples if t0 is not None and s.t_ms >= t0]
    usable = [CalibrationSample(s.p_watts, s.lux) for s in post
              if s.p_watts > 0.0 and s.lux is not None and s.lux > 0.0]
    if len(usable) < 4:
        raise FitError(f"only {len(usable)} usable post-ignition samples; need >= 4")

    if trim:
        curve, kept, trimmed = trim_refit(usable, kind=InputKind.PLASMA_POWER)
    else:
        curve, kept, trimmed = fit_log_cubic(usable, kind=InputKind.PLASMA_POWER), usable, 0
    stats = fit_residuals(curve, kept)
    powers = [s.input for s in kept]
    return Characterization(
        curve=curve,
        rmse_log=stats["rmse_log"],
        max_abs_log=stats["max_abs_log"],
        input_range=(min(powers), max(powers)),
        trimmed_count=trimmed,
    )


def summary_stats(run: ExperimentRun) -> dict[str, dict[str, float]]:
    """Per-signal min/max/mean/stddev (sample stddev; 0 for a single value)."""
    if not run.samples:
        raise DomainError("summary of an empty run is undefined")
    signals = {
        "v": [s.v_volts for s in run.samples],
        "i": [s.i_amps for s in run.samples],
        "p": [s.p_watts for s in run.samples],
        "lux": [s.lux for s in run.samples if s.lux is not None],
    }
    out = {}
    for name, values in signals.items():
        if not values:
            continue
        n = len(values)
        mean = sum(values) / n
        var = sum((x - mean) ** 2 for x in values) / (n - 1) if n > 1 else 0.0
        out[name] = {"min": min(values), "max": max(values),
                     "mean": mean, "stddev": math.sqrt(var)}
    return out


def characterization_to_dict(char: Characterization) -> dict:
    return {
        "curve": curve_to_dict(char.curve),
        "rmse_log": char.rmse_log,
        "max_abs_log": char.max_abs_log,
        "input_range": list(char.input_range),
        "trimmed_count": char.trimmed_count,
    }


def characterization_from_dict(data: dict) -> Characterization:
    try:
        return Characterization(
            curve=curve_from_dict(data["curve"]),
            rmse_log=float(data["rmse_log"]),
            max_abs_log=float(data["max_abs_log"]),
            input_range=tuple(float(x) for x in data["input_range"]),
            trimmed_count=int(data["trimmed_count"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"bad characterization object: {exc}") from exc


class _atomic_writer:
    """Write to a temp file in the target directory, rename on success."""

    def __init__(self, path):
        self.path = os.fspath(path)
        self.tmp = None
        self.fh = None

    def __enter__(self):
        directory = os.path.dirname(self.path) or "."
        fd, self.tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        self.fh = os.fdopen(fd, "w", encoding="utf-8")
        return self.fh

    def __exit__(self, exc_type, exc, tb):
        self.fh.close()
        if exc_type is None:
            os.replace(self.tmp, self.path)
        else:
            os.unlink(self.tmp)
        return False


def save_characterization(char: Characterization, path) -> None:
    """JSON round trip is lossless: floats serialize at full repr precision."""
    with _atomic_writer(path) as fh:
        json.dump(characterization_to_dict(char), fh, indent=2)
        fh.write("\n")


def load_characterization(path) -> Characterization:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return characterization_from_dict(data)
