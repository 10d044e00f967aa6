"""Compensated RC-ladder high-voltage probe: analysis and design.

The probe is a chain of parallel RC stages.  Each stage presents the
impedance Z(s) = R / (1 + R*C*s); the divider output is taken across the
base stage, so the voltage transfer is

    G(s) = Z0(s) / (Z0(s) + Z1(s) + ... + Zn(s)).

For a uniform ladder (R1 = ... = Rn, C1 = ... = Cn) with the base
capacitor chosen as C0 = C1*R1/R0, G(s) collapses to the constant
R0/(n*R1 + R0): flat magnitude and zero phase at every frequency.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .errors import DomainError, PreconditionError, SingularityError

__all__ = [
    "RCStage",
    "ProbeNetwork",
    "RationalTransferFunction",
    "ComplexResponse",
    "stage_impedance",
    "transfer_function",
    "frequency_response",
    "dc_attenuation",
    "compensation_capacitor",
    "is_compensated",
    "design_probe",
    "bode_sweep",
    "write_sweep_csv",
]

# All R1..Rn (and C1..Cn) must agree to this relative tolerance for the
# ladder to count as uniform.
UNIFORMITY_RTOL = 1e-9


@dataclass(frozen=True)
class RCStage:
    """One parallel resistor-capacitor stage. C = 0 models a bare resistor."""

    resistance: float
    capacitance: float = 0.0

    def __post_init__(self):
        if not (self.resistance > 0.0 and math.isfinite(self.resistance)):
            raise DomainError(f"stage resistance must be > 0, got {self.resistance}")
        if not (self.capacitance >= 0.0 and math.isfinite(self.capacitance)):
            raise DomainError(f"stage capacitance must be >= 0, got {self.capacitance}")


@dataclass(frozen=True)
class ProbeNetwork:
    """Base stage (output tap) plus an ordered ladder of series stages."""

    base: RCStage
    ladder: tuple[RCStage, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ladder", tuple(self.ladder))

    @property
    def n(self) -> int:
        return len(self.ladder)

    def has_uniform_ladder(self, rtol: float = UNIFORMITY_RTOL) -> bool:
        if self.n <= 1:
            return True
        first = self.ladder[0]
        for st in self.ladder[1:]:
            if not math.isclose(st.resistance, first.resistance, rel_tol=rtol, abs_tol=0.0):
                return False
            if not math.isclose(st.capacitance, first.capacitance, rel_tol=rtol, abs_tol=0.0):
                return False
        return True

    @classmethod
    def uniform(cls, n: int, ladder_r: float, ladder_c: float,
                base_r: float, base_c: float) -> "ProbeNetwork":
        if n < 0:
            raise DomainError(f"ladder stage count must be >= 0, got {n}")
        stage = RCStage(ladder_r, ladder_c)
        return cls(base=RCStage(base_r, base_c), ladder=(stage,) * n)


@dataclass(frozen=True)
class RationalTransferFunction:
    """Ratio of real polynomials in s, coefficients in ascending powers."""

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if not den:
            raise DomainError("denominator is identically zero")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __call__(self, s: complex) -> complex:
        den = _horner(self.denominator, s)
        num = _horner(self.numerator, s)
        if abs(den) == 0.0:
            raise SingularityError(f"transfer function pole at s = {s}")
        return num / den


@dataclass(frozen=True)
class ComplexResponse:
    """Gain of a network at one frequency, stored as a complex number."""

    frequency: float
    gain: complex

    @property
    def magnitude(self) -> float:
        return abs(self.gain)

    @property
    def phase(self) -> float:
        return cmath.phase(self.gain)

    @property
    def magnitude_db(self) -> float:
        return 20.0 * math.log10(self.magnitude)


def _trim(coeffs: Iterable[float]) -> tuple[float, ...]:
    out = list(coeffs)
    while out and out[-1] == 0.0:
        out.pop()
    return tuple(out)


def _horner(coeffs: Sequence[float], s: complex) -> complex:
    acc: complex = 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def _conv(a: Sequence[float], b: Sequence[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def stage_impedance(stage: RCStage, s: complex) -> complex:
    """Impedance R/(1 + R*C*s) of a parallel RC stage.

    Raises SingularityError at the real pole s = -1/(R*C); for physical
    components the pole never lies on the imaginary axis, so evaluation at
    s = j*omega is always safe.
    """
    denom = 1.0 + stage.resistance * stage.capacitance * complex(s)
    scale = max(1.0, abs(stage.resistance * stage.capacitance * complex(s)))
    if abs(denom) <= 1e-15 * scale:
        raise SingularityError(f"stage impedance pole at s = {s}")
    return stage.resistance / denom


def transfer_function(net: ProbeNetwork) -> RationalTransferFunction:
    """Build G(s) = Z0 / sum(Zi) as an explicit rational function.

    Each Zi = Ri/(1 + Ri*Ci*s).  Multiplying through by all (1 + Ri*Ci*s)
    factors gives

        num = R0 * prod_{j>=1} (1 + Rj*Cj*s)
        den = sum_i Ri * prod_{j != i} (1 + Rj*Cj*s)

    which are assembled by polynomial convolution.
    """
    stages = [net.base, *net.ladder]
    factors = [[1.0, st.resistance * st.capacitance] for st in stages]

    num = [net.base.resistance]
    for f in factors[1:]:
        num = _conv(num, f)

    den = [0.0]
    for i, st in enumerate(stages):
        term = [st.resistance]
        for j, f in enumerate(factors):
            if j != i:
                term = _conv(term, f)
        den = [x + y for x, y in _zip_pad(den, term)]

    return RationalTransferFunction(tuple(num), tuple(den))


def _zip_pad(a: Sequence[float], b: Sequence[float]):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else 0.0), (b[i] if i < len(b) else 0.0)


def frequency_response(net: ProbeNetwork, f: float, *,
                       tf: RationalTransferFunction | None = None) -> ComplexResponse:
    """Evaluate the network gain at s = j*2*pi*f.

    Pass a precomputed `tf` when sweeping to avoid rebuilding it per point.
    """
    if f < 0.0:
        raise DomainError(f"frequency must be >= 0, got {f}")
    if tf is None:
        tf = transfer_function(net)
    return ComplexResponse(frequency=f, gain=tf(2j * math.pi * f))


def dc_attenuation(net: ProbeNetwork) -> float:
    """Zero-frequency divider ratio R0 / (R0 + sum of ladder resistances)."""
    total = net.base.resistance + sum(st.resistance for st in net.ladder)
    return net.base.resistance / total


def _require_uniform(net: ProbeNetwork, op: str) -> RCStage:
    if net.n < 1:
        raise PreconditionError(f"{op} requires at least one ladder stage")
    if not net.has_uniform_ladder():
        raise PreconditionError(f"{op} requires a uniform ladder (all R and C equal)")
    return net.ladder[0]


def compensation_capacitor(net: ProbeNetwork) -> float:
    """Base capacitance C1*R1/R0 that makes a uniform ladder frequency-flat."""
    st = _require_uniform(net, "compensation_capacitor")
    return st.capacitance * st.resistance / net.base.resistance


def is_compensated(net: ProbeNetwork, rel_tol: float) -> bool:
    """True when the actual C0 is within rel_tol of the exact C1*R1/R0."""
    ideal = compensation_capacitor(net)
    if ideal == 0.0:
        return net.base.capacitance == 0.0
    return abs(net.base.capacitance - ideal) <= rel_tol * ideal


def design_probe(target_ratio: float, n: int, ladder_r: float,
                 ladder_c: float) -> ProbeNetwork:
    """Synthesize an exactly compensated uniform probe for a DC ratio.

    Inverts the divider formula: R0 = n*R1*k/(1-k), then C0 = C1*R1/R0.
    Returns exact component values; snapping to standard series is left to
    the caller.
    """
    if not 0.0 < target_ratio < 1.0:
        raise DomainError(f"target ratio must be in (0, 1), got {target_ratio}")
    if n < 1:
        raise DomainError(f"need at least one ladder stage, got n={n}")
    base_r = n * ladder_r * target_ratio / (1.0 - target_ratio)
    base_c = ladder_c * ladder_r / base_r
    return ProbeNetwork.uniform(n, ladder_r, ladder_c, base_r, base_c)


def bode_sweep(net: ProbeNetwork, f_min: float, f_max: float, points: int,
               spacing: str = "log") -> list[ComplexResponse]:
    """Frequency responses over a log- or linearly-spaced grid."""
    if not 0.0 < f_min < f_max:
        raise DomainError(f"need 0 < f_min < f_max, got [{f_min}, {f_max}]")
    if points < 2:
        raise DomainError(f"need at least 2 sweep points, got {points}")
    if spacing == "log":
        lo, hi = math.log10(f_min), math.log10(f_max)
        grid = [10.0 ** (lo + (hi - lo) * i / (points - 1)) for i in range(points)]
    elif spacing == "linear":
        grid = [f_min + (f_max - f_min) * i / (points - 1) for i in range(points)]
    else:
        raise DomainError(f"spacing must be 'log' or 'linear', got {spacing!r}")
    grid[0], grid[-1] = f_min, f_max  # pin endpoints against rounding
    tf = transfer_function(net)
    return [frequency_response(net, f, tf=tf) for f in grid]


def write_sweep_csv(responses: Iterable[ComplexResponse], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["frequency_hz", "magnitude", "phase_rad", "magnitude_db"])
    for r in responses:
        writer.writerow([repr(r.frequency), repr(r.magnitude),
                         repr(r.phase), repr(r.magnitude_db)])
