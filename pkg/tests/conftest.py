import math

import pytest

from plasmakit import CalibrationCurve, InputKind, ProbeNetwork


def reference_network(c0: float = 3e-9) -> ProbeNetwork:
    """The 1000:1-class probe: n=5, R1=10 MOhm, C1=15 pF, R0=52.8 kOhm."""
    return ProbeNetwork.uniform(5, 10e6, 15e-12, 52.8e3, c0)


def direct_gain(net: ProbeNetwork, f: float) -> complex:
    """Independent oracle: Z0/sum(Zi) computed stage by stage in complex
    arithmetic, never through the polynomial transfer function."""
    s = 2j * math.pi * f
    def z(stage):
        return stage.resistance / (1.0 + stage.resistance * stage.capacitance * s)
    z0 = z(net.base)
    return z0 / (z0 + sum(z(st) for st in net.ladder))


# Published coefficient sets for the two log-cubic curves.
VOLTAGE_COEFFS = (2.533317, 1.960146, 2.118486, 2.101649)
POWER_COEFFS = (-11.413655, 12.323756, -3.966212, 0.454388)


@pytest.fixture
def voltage_curve() -> CalibrationCurve:
    return CalibrationCurve(*VOLTAGE_COEFFS, input_kind=InputKind.SENSOR_VOLTAGE)


@pytest.fixture
def power_curve() -> CalibrationCurve:
    return CalibrationCurve(*POWER_COEFFS, input_kind=InputKind.PLASMA_POWER)
