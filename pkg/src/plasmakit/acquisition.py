"""Raw acquisition frames to engineering units: v, i, p and optional lux.

Mirrors the microcontroller data path: two ADC channels read the attenuated
probe output and the offset shunt signal, a third (optional) channel reads
the light-sensor amplifier.  The conversion chain is

    volts   = counts * fullscale / (2^bits - 1)
    v       = probe_volts / probe_ratio
    i       = (shunt_volts - offset) / shunt_ohms
    p       = v * i
    lux     = calibration curve applied to the light-channel volts
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

from .calibration import CalibrationCurve, InputKind, lux_from_input
from .errors import DomainError, PreconditionError, RowError, SchemaError

__all__ = [
    "ChannelConfig",
    "AdcFrame",
    "PowerSample",
    "counts_to_volts",
    "needle_voltage",
    "offset_sum",
    "shunt_current",
    "instantaneous_power",
    "process_frame",
    "replay_stream",
    "detect_ignition",
    "write_samples_csv",
    "DEFAULT_CONFIG",
]

RAW_HEADER = ("t_ms", "raw_hv", "raw_shunt", "raw_ldr")
ENG_HEADER = ("t_ms", "v_volts", "i_amps", "lux")
OUT_HEADER = ("t_ms", "v_volts", "i_amps", "p_watts", "lux")


@dataclass(frozen=True)
class ChannelConfig:
    """Scaling constants of the acquisition chain."""

    probe_ratio: float = 1.054886e-3
    shunt_ohms: float = 23.0
    offset_volts: float = 1.25
    adc_bits: int = 12
    adc_fullscale_volts: float = 3.3

    def __post_init__(self):
        if not 0.0 < self.probe_ratio < 1.0:
            raise DomainError(f"probe_ratio must be in (0, 1), got {self.probe_ratio}")
        if not self.shunt_ohms > 0.0:
            raise DomainError(f"shunt_ohms must be > 0, got {self.shunt_ohms}")
        if not 8 <= self.adc_bits <= 24:
            raise DomainError(f"adc_bits must be in [8, 24], got {self.adc_bits}")
        if not self.adc_fullscale_volts > 0.0:
            raise DomainError(f"adc_fullscale_volts must be > 0, got {self.adc_fullscale_volts}")

    @property
    def max_count(self) -> int:
        return (1 << self.adc_bits) - 1


DEFAULT_CONFIG = ChannelConfig()


@dataclass(frozen=True)
class AdcFrame:
    """One raw multi-channel ADC reading."""

    timestamp_ms: float
    raw_hv: int
    raw_shunt: int
    raw_ldr: Optional[int] = None


@dataclass(frozen=True)
class PowerSample:
    """One engineering-unit record; p must equal v*i."""

    t_ms: float
    v_volts: float
    i_amps: float
    p_watts: float
    lux: Optional[float] = None

    def __post_init__(self):
        expected = self.v_volts * self.i_amps
        if not math.isclose(self.p_watts, expected, rel_tol=1e-12, abs_tol=1e-300):
            raise DomainError(
                f"p_watts={self.p_watts} inconsistent with v*i={expected}")

    @classmethod
    def from_vi(cls, t_ms: float, v: float, i: float,
                lux: Optional[float] = None) -> "PowerSample":
        return cls(t_ms=t_ms, v_volts=v, i_amps=i, p_watts=v * i, lux=lux)


def counts_to_volts(cfg: ChannelConfig, raw: int) -> float:
    """ADC code to volts; full-scale code maps to full-scale voltage."""
    if not 0 <= raw <= cfg.max_count:
        raise DomainError(f"count {raw} outside [0, {cfg.max_count}]")
    return raw * cfg.adc_fullscale_volts / cfg.max_count


def needle_voltage(cfg: ChannelConfig, probe_out: float) -> float:
    """Undo the probe attenuation to recover the high-voltage-side value."""
    return probe_out / cfg.probe_ratio


def offset_sum(v1: float, v2: float) -> float:
    """Summing-amplifier output: plain v1 + v2."""
    return v1 + v2


def shunt_current(cfg: ChannelConfig, v3: float) -> float:
    """Recover the shunt current from the offset sum; negative values are legal."""
    return (v3 - cfg.offset_volts) / cfg.shunt_ohms


def instantaneous_power(v: float, i: float) -> float:
    return v * i


def process_frame(cfg: ChannelConfig, frame: AdcFrame,
                  ldr_curve: Optional[CalibrationCurve] = None) -> PowerSample:
    """Full conversion of one raw frame to a PowerSample.

    The lux field is present only when the frame carries a light-channel
    reading and a calibration curve is supplied.
    """
    if ldr_curve is not None and ldr_curve.input_kind is not InputKind.SENSOR_VOLTAGE:
        raise PreconditionError("light-channel curve must have input kind 'voltage'")
    try:
        v = needle_voltage(cfg, counts_to_volts(cfg, frame.raw_hv))
    except DomainError as exc:
        raise DomainError(f"hv channel: {exc}") from exc
    try:
        i = shunt_current(cfg, counts_to_volts(cfg, frame.raw_shunt))
    except DomainError as exc:
        raise DomainError(f"shunt channel: {exc}") from exc
    lux = None
    if frame.raw_ldr is not None and ldr_curve is not None:
        try:
            ldr_volts = counts_to_volts(cfg, frame.raw_ldr)
            lux = lux_from_input(ldr_curve, ldr_volts) if ldr_volts > 0.0 else 0.0
        except DomainError as exc:
            raise DomainError(f"ldr channel: {exc}") from exc
    return PowerSample.from_vi(frame.timestamp_ms, v, i, lux)


def _parse_raw_row(row: dict, line_no: int) -> AdcFrame:
    try:
        ldr = row.get("raw_ldr")
        return AdcFrame(
            timestamp_ms=float(row["t_ms"]),
            raw_hv=int(row["raw_hv"]),
            raw_shunt=int(row["raw_shunt"]),
            raw_ldr=int(ldr) if ldr not in (None, "") else None,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise RowError(line_no, f"bad raw frame: {exc}") from exc


def _parse_eng_row(row: dict, line_no: int) -> PowerSample:
    try:
        lux = row.get("lux")
        return PowerSample.from_vi(
            float(row["t_ms"]), float(row["v_volts"]), float(row["i_amps"]),
            lux=float(lux) if lux not in (None, "") else None,
        )
    except (KeyError, ValueError, TypeError, DomainError) as exc:
        raise RowError(line_no, f"bad engineering row: {exc}") from exc


def replay_stream(source: TextIO | str, cfg: ChannelConfig = DEFAULT_CONFIG,
                  ldr_curve: Optional[CalibrationCurve] = None,
                  strict: bool = False,
                  diagnostics: Optional[list] = None) -> list[PowerSample]:
    """Replay a frame CSV into PowerSamples, order preserved.

    The mode is chosen by header inspection: `t_ms,raw_hv,raw_shunt[,raw_ldr]`
    for raw counts, `t_ms,v_volts,i_amps[,lux]` for pre-scaled rows.  In
    lenient mode malformed rows are reported into `diagnostics` (as RowError
    instances) and skipped; in strict mode the first one aborts the replay.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return replay_stream(fh, cfg, ldr_curve, strict, diagnostics)
    reader = csv.DictReader(source)
    fields = tuple(reader.fieldnames or ())
    if not fields:
        return []
    if set(fields) <= set(RAW_HEADER) and {"t_ms", "raw_hv", "raw_shunt"} <= set(fields):
        raw_mode = True
    elif set(fields) <= set(ENG_HEADER) and {"t_ms", "v_volts", "i_amps"} <= set(fields):
        raw_mode = False
    else:
        raise SchemaError(f"unrecognized frame CSV header: {fields}")

    samples: list[PowerSample] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            if raw_mode:
                samples.append(process_frame(cfg, _parse_raw_row(row, line_no), ldr_curve))
            else:
                samples.append(_parse_eng_row(row, line_no))
        except (RowError, DomainError) as exc:
            err = exc if isinstance(exc, RowError) else RowError(line_no, str(exc))
            if strict:
                raise err from exc
            if diagnostics is not None:
                diagnostics.append(err)
    return samples


def detect_ignition(samples: Sequence[PowerSample], i_min: float = 1e-3,
                    sustain: int = 3) -> Optional[float]:
    """Timestamp of the first sample opening a run of >= sustain samples
    with |i| >= i_min; None when no such run exists."""
    if not i_min > 0.0:
        raise DomainError(f"i_min must be > 0, got {i_min}")
    if sustain < 1:
        raise DomainError(f"sustain must be >= 1, got {sustain}")
    run_start = None
    run_len = 0
    for sample in samples:
        if abs(sample.i_amps) >= i_min:
            if run_len == 0:
                run_start = sample.t_ms
            run_len += 1
            if run_len >= sustain:
                return run_start
        else:
            run_len = 0
    return None


def write_samples_csv(samples: Iterable[PowerSample], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(OUT_HEADER)
    for s in samples:
        writer.writerow([repr(s.t_ms), repr(s.v_volts), repr(s.i_amps),
                         repr(s.p_watts), "" if s.lux is None else repr(s.lux)])
