import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasmakit import (
    DomainError,
    PreconditionError,
    ProbeNetwork,
    RCStage,
    RationalTransferFunction,
    SingularityError,
    bode_sweep,
    compensation_capacitor,
    dc_attenuation,
    design_probe,
    frequency_response,
    is_compensated,
    stage_impedance,
    transfer_function,
)

from conftest import direct_gain, reference_network


class TestStageImpedance:
    def test_dc_returns_resistance(self):
        assert stage_impedance(RCStage(10e6, 15e-12), 0) == 10e6

    def test_at_1mhz_matches_complex_division_oracle(self):
        # oracle: plain complex division R/(1 + j*omega*R*C)
        s = 2j * math.pi * 1e6
        oracle = 10e6 / (1.0 + 10e6 * 15e-12 * s)
        z = stage_impedance(RCStage(10e6, 15e-12), s)
        assert z == pytest.approx(oracle, rel=1e-15)
        # frozen magnitude from the oracle above
        assert abs(z) == pytest.approx(10610.323566958356, rel=1e-12)

    def test_pure_resistor_is_frequency_independent(self):
        stage = RCStage(52.8e3, 0.0)
        for s in (0, 1j, 2j * math.pi * 1e9):
            assert stage_impedance(stage, s) == 52.8e3

    def test_pole_on_negative_real_axis_raises(self):
        stage = RCStage(1e3, 1e-6)
        with pytest.raises(SingularityError):
            stage_impedance(stage, -1.0 / (1e3 * 1e-6))

    def test_magnitude_nonincreasing_in_frequency(self):
        stage = RCStage(10e6, 15e-12)
        freqs = [10.0 ** k for k in range(9)]
        mags = [abs(stage_impedance(stage, 2j * math.pi * f)) for f in freqs]
        assert all(a >= b for a, b in zip(mags, mags[1:]))

    def test_invalid_components_rejected(self):
        with pytest.raises(DomainError):
            RCStage(0.0, 1e-12)
        with pytest.raises(DomainError):
            RCStage(1e3, -1e-12)


class TestTransferFunction:
    def test_base_only_network_is_unity(self):
        tf = transfer_function(ProbeNetwork(base=RCStage(52.8e3, 3e-9)))
        assert tf.numerator == tf.denominator
        assert tf(0) == 1.0
        assert tf(2j * math.pi * 1e6) == pytest.approx(1.0)

    def test_reference_network_dc_value(self):
        tf = transfer_function(reference_network())
        assert tf(0).real == pytest.approx(52.8e3 / 50.0528e6, rel=1e-12)

    def test_exact_compensation_gives_constant_gain(self):
        c0 = 15e-12 * 10e6 / 52.8e3
        tf = transfer_function(reference_network(c0=c0))
        dc = tf(0)
        for f in (1.0, 1e3, 1e6, 1e7):
            g = tf(2j * math.pi * f)
            assert abs(g) == pytest.approx(abs(dc), rel=1e-9)
            assert abs(cmath.phase(g)) <= 1e-9

    def test_zero_denominator_rejected(self):
        with pytest.raises(DomainError):
            RationalTransferFunction((1.0,), (0.0, 0.0))

    def test_trailing_zeros_trimmed(self):
        tf = RationalTransferFunction((1.0, 0.0, 0.0), (2.0, 1.0, 0.0))
        assert tf.numerator == (1.0,)
        assert tf.denominator == (2.0, 1.0)

    def test_oracle_equivalence_on_random_networks(self):
        rng = random.Random(20240817)
        for _ in range(1000):
            n = rng.randint(0, 6)
            net = ProbeNetwork(
                base=RCStage(10 ** rng.uniform(2, 7), 10 ** rng.uniform(-12, -8)),
                ladder=tuple(RCStage(10 ** rng.uniform(2, 7),
                                     10 ** rng.uniform(-12, -8))
                             for _ in range(n)))
            f = 10 ** rng.uniform(0, 8)
            got = transfer_function(net)(2j * math.pi * f)
            want = direct_gain(net, f)
            assert got == pytest.approx(want, rel=1e-12)


class TestFrequencyResponse:
    def test_dc_limit_equals_attenuation(self):
        net = reference_network()
        r = frequency_response(net, 0.0)
        assert r.gain.real == dc_attenuation(net)
        assert r.gain.imag == 0.0

    def test_compensated_network_flat_at_1mhz(self):
        net = reference_network(c0=15e-12 * 10e6 / 52.8e3)
        r = frequency_response(net, 1e6)
        assert r.magnitude == pytest.approx(52.8e3 / 50.0528e6, rel=1e-9)
        assert abs(r.phase) <= 1e-9

    def test_off_the_shelf_c0_deviates_at_1mhz(self):
        # frozen from the direct complex-impedance oracle for C0 = 3 nF
        r = frequency_response(reference_network(), 1e6)
        assert r.gain == pytest.approx(direct_gain(reference_network(), 1e6), rel=1e-12)
        assert r.magnitude == pytest.approx(9.990010570045072e-4, rel=1e-9)

    def test_negative_frequency_rejected(self):
        with pytest.raises(DomainError):
            frequency_response(reference_network(), -1.0)


class TestDcAttenuation:
    def test_reference_network(self):
        assert dc_attenuation(reference_network()) == pytest.approx(1.054886e-3, rel=1e-6)
        assert dc_attenuation(reference_network()) == pytest.approx(52.8e3 / 50.0528e6,
                                                                    rel=1e-15)

    def test_base_only(self):
        assert dc_attenuation(ProbeNetwork(base=RCStage(1e3))) == 1.0

    def test_symmetric_divider(self):
        assert dc_attenuation(ProbeNetwork.uniform(1, 1e3, 0, 1e3, 0)) == 0.5

    def test_adding_stage_strictly_decreases_ratio(self):
        stage = RCStage(1e6, 10e-12)
        net = ProbeNetwork(base=RCStage(1e3))
        prev = dc_attenuation(net)
        for n in range(1, 6):
            net = ProbeNetwork(base=net.base, ladder=(stage,) * n)
            cur = dc_attenuation(net)
            assert cur < prev
            prev = cur


class TestCompensation:
    def test_reference_value(self):
        c0 = compensation_capacitor(reference_network())
        assert c0 == pytest.approx(15e-12 * 10e6 / 52.8e3, abs=1e-24)
        assert c0 == pytest.approx(2.840909090909091e-9, abs=1e-15)

    def test_equal_r_gives_equal_c(self):
        net = ProbeNetwork.uniform(1, 1e3, 1e-9, 1e3, 0)
        assert compensation_capacitor(net) == pytest.approx(1e-9, rel=1e-15)

    def test_zero_ladder_capacitance(self):
        net = ProbeNetwork.uniform(3, 1e6, 0.0, 1e3, 0.0)
        assert compensation_capacitor(net) == 0.0

    def test_non_uniform_ladder_rejected(self):
        net = ProbeNetwork(base=RCStage(1e3),
                           ladder=(RCStage(1e6, 1e-12), RCStage(2e6, 1e-12)))
        with pytest.raises(PreconditionError):
            compensation_capacitor(net)
        with pytest.raises(PreconditionError):
            is_compensated(net, 0.1)

    def test_is_compensated_tolerances(self):
        net = reference_network()  # 3 nF vs exact 2.8409 nF: 5.6% off
        assert is_compensated(net, 0.10) is True
        assert is_compensated(net, 0.01) is False
        exact = reference_network(c0=2.840909090909091e-9)
        assert is_compensated(exact, 1e-12) is True


class TestDesignProbe:
    def test_reference_design(self):
        net = design_probe(1e-3, 5, 10e6, 15e-12)
        assert net.base.resistance == pytest.approx(5e7 / 999.0, rel=1e-12)
        assert net.base.capacitance == pytest.approx(15e-12 * 10e6 / (5e7 / 999.0),
                                                     rel=1e-12)
        assert net.base.capacitance == pytest.approx(2.997e-9, rel=1e-6)

    def test_trivial_half_divider(self):
        net = design_probe(0.5, 1, 1e3, 0.0)
        assert net.base.resistance == pytest.approx(1e3, rel=1e-15)
        assert net.base.capacitance == 0.0

    @given(st.floats(min_value=1e-6, max_value=0.999),
           st.integers(min_value=1, max_value=10),
           st.floats(min_value=1.0, max_value=1e8))
    @settings(max_examples=100)
    def test_round_trip_ratio(self, k, n, r):
        net = design_probe(k, n, r, 10e-12)
        assert dc_attenuation(net) == pytest.approx(k, rel=1e-12)
        assert is_compensated(net, 1e-9)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            design_probe(1.0, 5, 1e6, 1e-12)
        with pytest.raises(DomainError):
            design_probe(0.0, 5, 1e6, 1e-12)
        with pytest.raises(DomainError):
            design_probe(0.5, 0, 1e6, 1e-12)


class TestBodeSweep:
    def test_compensated_sweep_is_flat(self):
        net = design_probe(1e-3, 5, 10e6, 15e-12)
        responses = bode_sweep(net, 1.0, 1e7, 50)
        mags = [r.magnitude for r in responses]
        assert max(mags) / min(mags) - 1.0 <= 1e-9
        assert all(abs(r.phase) <= 1e-9 for r in responses)

    def test_two_points_are_endpoints(self):
        responses = bode_sweep(reference_network(), 10.0, 1e5, 2)
        assert [r.frequency for r in responses] == [10.0, 1e5]

    def test_reference_network_peaking(self):
        # frozen from the oracle sweep: the 5.6%-high C0 peaks the response
        responses = bode_sweep(reference_network(), 1.0, 1e7, 200, "log")
        mags = [r.magnitude for r in responses]
        assert max(mags) / min(mags) == pytest.approx(1.0559408718310286, rel=1e-9)
        for r in responses[:: 20]:
            assert r.gain == pytest.approx(direct_gain(reference_network(), r.frequency),
                                           rel=1e-12)

    def test_linear_spacing(self):
        responses = bode_sweep(reference_network(), 100.0, 200.0, 3, "linear")
        assert [r.frequency for r in responses] == [100.0, 150.0, 200.0]

    def test_invalid_grid_rejected(self):
        net = reference_network()
        with pytest.raises(DomainError):
            bode_sweep(net, 0.0, 1e6, 10)
        with pytest.raises(DomainError):
            bode_sweep(net, 1e6, 1e3, 10)
        with pytest.raises(DomainError):
            bode_sweep(net, 1.0, 1e6, 1)
        with pytest.raises(DomainError):
            bode_sweep(net, 1.0, 1e6, 10, "cubic")
