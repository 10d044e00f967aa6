"""Log-domain cubic calibration curves for the illuminance sensor.

A curve maps a positive input (sensor voltage in volts, or plasma power in
watts) to illuminance in lux through a cubic polynomial in log space:

    ln(lux) = a3*u^3 + a2*u^2 + a1*u + a0,   u = ln(input).

Fitting, forward evaluation, inversion (Newton with a bisection fallback),
and residual statistics all operate on this representation.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import BracketError, DomainError, FitError, PreconditionError, SchemaError

__all__ = [
    "InputKind",
    "CalibrationCurve",
    "CalibrationSample",
    "eval_log_poly",
    "lux_from_input",
    "input_from_lux",
    "monotone_direction",
    "is_monotone",
    "fit_log_cubic",
    "fit_residuals",
    "trim_refit",
    "curve_to_dict",
    "curve_from_dict",
    "save_curve",
    "load_curve",
    "read_samples_csv",
]

# Newton/bisection search window for u = ln(input); exp() overflows past ~709.
_U_MIN, _U_MAX = -700.0, 700.0
_U_TOL = 1e-12


class InputKind(str, Enum):
    SENSOR_VOLTAGE = "voltage"
    PLASMA_POWER = "power"


@dataclass(frozen=True)
class CalibrationCurve:
    """Coefficients of the log-domain cubic, lowest order first in naming."""

    a0: float
    a1: float
    a2: float
    a3: float
    input_kind: InputKind = InputKind.SENSOR_VOLTAGE
    input_range: tuple[float, float] | None = None  # fitted input span, if known

    def __post_init__(self):
        for name in ("a0", "a1", "a2", "a3"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"coefficient {name} is not finite")
        if self.input_range is not None:
            lo, hi = self.input_range
            if not (0.0 < lo <= hi):
                raise DomainError(f"input_range must be positive and ordered, got {self.input_range}")
            object.__setattr__(self, "input_range", (float(lo), float(hi)))

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3)

    def covers(self, x: float) -> bool:
        """True when x lies inside the fitted input range (or no range is known)."""
        if self.input_range is None:
            return True
        lo, hi = self.input_range
        return lo <= x <= hi


@dataclass(frozen=True)
class CalibrationSample:
    """One measured (input, illuminance) pair; both must be log-able."""

    input: float
    illuminance: float

    def __post_init__(self):
        if not (self.input > 0.0 and math.isfinite(self.input)):
            raise DomainError(f"sample input must be > 0, got {self.input}")
        if not (self.illuminance > 0.0 and math.isfinite(self.illuminance)):
            raise DomainError(f"sample illuminance must be > 0, got {self.illuminance}")


def eval_log_poly(curve: CalibrationCurve, x: float) -> float:
    """Horner evaluation of a3*x^3 + a2*x^2 + a1*x + a0 (x already in log domain)."""
    return ((curve.a3 * x + curve.a2) * x + curve.a1) * x + curve.a0


def _dpoly(curve: CalibrationCurve, x: float) -> float:
    return (3.0 * curve.a3 * x + 2.0 * curve.a2) * x + curve.a1


def lux_from_input(curve: CalibrationCurve, x: float) -> float:
    """Forward map: exp of the log-domain cubic at ln(x)."""
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"curve input must be > 0, got {x}")
    log_lux = eval_log_poly(curve, math.log(x))
    try:
        return math.exp(log_lux)
    except OverflowError:
        raise DomainError(
            f"illuminance overflows at input {x} (ln lux = {log_lux})") from None


def monotone_direction(curve: CalibrationCurve) -> int:
    """+1 strictly increasing, -1 strictly decreasing, 0 not monotone.

    The derivative of the log-domain cubic is q(u) = 3*a3*u^2 + 2*a2*u + a1.
    For a3 != 0 the curve is monotone iff q has no real root, i.e. the
    discriminant 4*a2^2 - 12*a3*a1 is negative; the direction is sign(a3).
    Degenerate cases: a3 == 0 with a2 != 0 gives a linear q that always
    changes sign; a3 == a2 == 0 leaves q = a1 (constant sign, or flat).
    """
    a1, a2, a3 = curve.a1, curve.a2, curve.a3
    if a3 != 0.0:
        disc = 4.0 * a2 * a2 - 12.0 * a3 * a1
        if disc < 0.0:
            return 1 if a3 > 0.0 else -1
        return 0
    if a2 != 0.0:
        return 0
    if a1 != 0.0:
        return 1 if a1 > 0.0 else -1
    return 0


def is_monotone(curve: CalibrationCurve) -> bool:
    return monotone_direction(curve) != 0


def input_from_lux(curve: CalibrationCurve, lux: float) -> float:
    """Invert the forward map: find x with lux_from_input(curve, x) == lux.

    Solves a3*u^3 + a2*u^2 + a1*u + (a0 - ln(lux)) = 0 for u = ln(x) by
    Newton iteration seeded at u = ln(lux), falling back to bisection on a
    bracket grown by step doubling when Newton stalls or escapes.
    """
    if not (lux > 0.0 and math.isfinite(lux)):
        raise DomainError(f"lux must be > 0, got {lux}")
    direction = monotone_direction(curve)
    if direction == 0:
        raise PreconditionError("curve is not monotone; inversion is ambiguous")

    target = math.log(lux)

    def g(u: float) -> float:
        return eval_log_poly(curve, u) - target

    u = min(max(target, _U_MIN), _U_MAX)
    for _ in range(100):
        d = _dpoly(curve, u)
        if d == 0.0:
            break
        step = g(u) / d
        u_next = u - step
        if not (_U_MIN <= u_next <= _U_MAX):
            break
        if abs(step) <= _U_TOL * max(1.0, abs(u_next)):
            return math.exp(u_next)
        u = u_next
    return math.exp(_bisect(g, direction, seed=min(max(target, _U_MIN), _U_MAX)))


def _bisect(g, direction: int, seed: float) -> float:
    # Work with h(u) = direction * g(u), which is increasing through the
    # root; grow a sign-change bracket around the seed by step doubling.
    def h(u: float) -> float:
        return direction * g(u)

    h_seed = h(seed)
    if h_seed == 0.0:
        return seed
    step = 1.0
    if h_seed < 0.0:  # root lies above the seed
        lo, hi = seed, seed
        while hi < _U_MAX:
            lo, hi = hi, min(hi + step, _U_MAX)
            if h(hi) >= 0.0:
                break
            step *= 2.0
        if h(hi) < 0.0:
            raise BracketError(f"no root bracket found in [{seed}, {_U_MAX}]")
    else:  # root lies below the seed
        lo, hi = seed, seed
        while lo > _U_MIN:
            hi, lo = lo, max(lo - step, _U_MIN)
            if h(lo) <= 0.0:
                break
            step *= 2.0
        if h(lo) > 0.0:
            raise BracketError(f"no root bracket found in [{_U_MIN}, {seed}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= _U_TOL * max(1.0, abs(mid)):
            return mid
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_log_cubic(samples: Sequence[CalibrationSample],
                  kind: InputKind = InputKind.SENSOR_VOLTAGE) -> CalibrationCurve:
    """Least-squares cubic fit of ln(illuminance) against ln(input).

    Uses a QR factorization of the 4-column Vandermonde design matrix.
    Requires at least 4 samples with 4 distinct input values.
    """
    if len(samples) < 4:
        raise FitError(f"need at least 4 samples, got {len(samples)}")
    u = np.log([s.input for s in samples])
    y = np.log([s.illuminance for s in samples])
    if len(np.unique(u)) < 4:
        raise FitError("need at least 4 distinct input values")
    design = np.column_stack([np.ones_like(u), u, u * u, u ** 3])
    q, r = np.linalg.qr(design)
    if np.min(np.abs(np.diag(r))) < 1e-12 * np.max(np.abs(np.diag(r))):
        raise FitError("rank-deficient design matrix")
    coeffs = np.linalg.solve(r, q.T @ y)
    lo, hi = float(np.exp(u.min())), float(np.exp(u.max()))
    return CalibrationCurve(*(float(c) for c in coeffs), input_kind=kind,
                            input_range=(lo, hi))


def fit_residuals(curve: CalibrationCurve,
                  samples: Sequence[CalibrationSample]) -> dict[str, float]:
    """Log-space residual summary: rmse (1/N) and max absolute residual."""
    if not samples:
        raise DomainError("residuals of an empty sample list are undefined")
    res = [math.log(s.illuminance) - eval_log_poly(curve, math.log(s.input))
           for s in samples]
    rmse = math.sqrt(sum(r * r for r in res) / len(res))
    return {"rmse_log": rmse, "max_abs_log": max(abs(r) for r in res)}


def trim_refit(samples: Sequence[CalibrationSample],
               kind: InputKind = InputKind.SENSOR_VOLTAGE,
               sigma: float = 3.0,
               max_trim_fraction: float = 0.2,
               ) -> tuple[CalibrationCurve, list[CalibrationSample], int]:
    """Single outlier-trim pass: fit, drop residuals beyond sigma*rmse, refit once.

    If trimming would remove more than max_trim_fraction of the samples the
    untrimmed fit is kept (trimmed_count = 0).  Returns (curve, kept, trimmed).
    """
    first = fit_log_cubic(samples, kind)
    stats = fit_residuals(first, samples)
    cutoff = sigma * stats["rmse_log"]
    if cutoff == 0.0:
        return first, list(samples), 0
    kept = [s for s in samples
            if abs(math.log(s.illuminance) - eval_log_poly(first, math.log(s.input))) <= cutoff]
    trimmed = len(samples) - len(kept)
    if trimmed == 0:
        return first, list(samples), 0
    if trimmed > max_trim_fraction * len(samples) or len(kept) < 4:
        return first, list(samples), 0
    return fit_log_cubic(kept, kind), kept, trimmed


def curve_to_dict(curve: CalibrationCurve) -> dict:
    out = {"kind": curve.input_kind.value, "a0": curve.a0, "a1": curve.a1,
           "a2": curve.a2, "a3": curve.a3}
    if curve.input_range is not None:
        out["input_range"] = list(curve.input_range)
    return out


def curve_from_dict(data: dict) -> CalibrationCurve:
    try:
        kind = InputKind(data["kind"])
        coeffs = [float(data[k]) for k in ("a0", "a1", "a2", "a3")]
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"bad calibration curve object: {exc}") from exc
    rng = data.get("input_range")
    return CalibrationCurve(*coeffs, input_kind=kind,
                            input_range=tuple(rng) if rng else None)


def save_curve(curve: CalibrationCurve, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(curve_to_dict(curve), fh, indent=2)
        fh.write("\n")


def load_curve(path) -> CalibrationCurve:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return curve_from_dict(data)


def read_samples_csv(source: TextIO | str) -> list[CalibrationSample]:
    """Read `input,lux` sample files (header required)."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return read_samples_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or not {"input", "lux"} <= set(reader.fieldnames):
        raise SchemaError("sample CSV must have header columns: input,lux")
    out = []
    for row in reader:
        out.append(CalibrationSample(float(row["input"]), float(row["lux"])))
    return out
