import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslipt import (
    GainMediumParams,
    ModelRangeError,
    ModeSolution,
    ScalarField2D,
    available_power,
    channel_gain,
    diffraction_loss,
    extraction_efficiency,
    output_power,
    output_power_direct,
    pump_power,
    threshold_power,
)


def make_mode(v1=0.95, v2=0.95, eta_b=0.8, converged=True) -> ModeSolution:
    dummy = ScalarField2D(np.ones((2, 2), dtype=complex), 1.0, 1.0)
    w = math.sqrt(eta_b * 0.003**2)
    return ModeSolution(
        field_left=dummy,
        field_right=dummy,
        v1=v1,
        v2=v2,
        beam_radius=w,
        beam_area=math.pi * w**2,
        overlap_efficiency=eta_b,
        iterations_used=1,
        converged=converged,
    )


PARAMS = GainMediumParams()


class TestPumpChain:
    def test_threshold_current_gives_zero(self):
        assert pump_power(PARAMS.threshold_current, PARAMS) == 0.0

    def test_ten_amps_above_threshold(self):
        # photon voltage at 808 nm is ~1.5345 V; with the injection and
        # extraction efficiency stack the pump power is ~10.97 W
        p = pump_power(PARAMS.threshold_current + 10.0, PARAMS)
        assert p == pytest.approx(10.97, rel=1e-3)

    def test_affine_slope_above_threshold(self):
        i0 = PARAMS.threshold_current
        slopes = {
            (pump_power(i0 + b, PARAMS) - pump_power(i0 + a, PARAMS)) / (b - a)
            for a, b in [(1.0, 2.0), (5.0, 9.0), (0.5, 20.0)]
        }
        assert max(slopes) - min(slopes) < 1e-12

    def test_available_power_from_input(self):
        assert available_power(PARAMS, p_in=200.0) == pytest.approx(102.96)

    def test_available_power_from_pump(self):
        assert available_power(PARAMS, p_pump=0.0) == 0.0
        assert available_power(PARAMS, p_pump=10.0) == pytest.approx(7.2)

    def test_efficiency_stack_consistent(self):
        # stored * pump efficiency reproduces the excitation efficiency
        assert PARAMS.stored_efficiency * PARAMS.pump_efficiency == pytest.approx(
            PARAMS.excitation_efficiency
        )
        assert PARAMS.pump_efficiency == pytest.approx(0.715)

    def test_exactly_one_input_required(self):
        with pytest.raises(ModelRangeError):
            available_power(PARAMS)
        with pytest.raises(ModelRangeError):
            available_power(PARAMS, p_pump=1.0, p_in=1.0)


class TestDiffractionLoss:
    def test_lossless(self):
        assert diffraction_loss(1.0, 1.0) == 1.0

    def test_geometric_mean(self):
        assert diffraction_loss(0.9, 0.8) == pytest.approx(math.sqrt(0.72))

    def test_symmetry(self):
        assert diffraction_loss(0.7, 0.4) == diffraction_loss(0.4, 0.7)

    def test_closed_channel_maps_to_zero(self):
        assert diffraction_loss(0.0, 0.5) == 0.0
        assert diffraction_loss(-0.1, 0.5) == 0.0


class TestExtraction:
    def test_lossless_limit_is_unity(self):
        mode = make_mode(v1=1.0, v2=1.0, eta_b=1.0)
        assert extraction_efficiency(mode, 0.7, 1.0) == pytest.approx(1.0)

    def test_reference_arithmetic(self):
        # independent evaluation of the same expression
        v1 = v2 = 0.95
        vs, r, eta_b = 0.99, 0.7, 1.0
        eta_d = math.sqrt(v1 * v2)
        denom = 1 - eta_d**2 * r + eta_d * math.sqrt(r) * (1 / (vs * v1) - vs)
        expected = eta_b * (1 - r) * v1 / denom
        mode = make_mode(v1=v1, v2=v2, eta_b=1.0)
        assert extraction_efficiency(mode, r, vs) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.668252, rel=1e-5)

    def test_monotone_in_forward_transmission(self):
        values = [
            extraction_efficiency(make_mode(v1=v, v2=0.9), 0.7, 0.99)
            for v in np.linspace(0.5, 1.0, 11)
        ]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_closed_channel(self):
        assert extraction_efficiency(make_mode(v1=0.0, v2=0.5), 0.7, 0.99) == 0.0


class TestOutputPower:
    def test_exact_zero_at_threshold(self):
        mode = make_mode()
        c1 = threshold_power(mode.v1, mode.v2, PARAMS, 0.7)
        p_in = c1 / PARAMS.excitation_efficiency
        budget = output_power(p_in, mode, PARAMS, 0.7)
        assert budget.p_out == 0.0
        assert budget.below_threshold

    def test_affine_above_threshold(self):
        mode = make_mode()
        eta_x = extraction_efficiency(mode, 0.7, PARAMS.medium_loss)
        c1 = threshold_power(mode.v1, mode.v2, PARAMS, 0.7)
        p1, p2 = 300.0, 400.0
        b1 = output_power(p1, mode, PARAMS, 0.7)
        b2 = output_power(p2, mode, PARAMS, 0.7)
        slope = (b2.p_out - b1.p_out) / (p2 - p1)
        assert slope == pytest.approx(eta_x * PARAMS.excitation_efficiency, rel=1e-9)
        assert b1.p_out == pytest.approx(
            eta_x * (PARAMS.excitation_efficiency * p1 - c1), rel=1e-12
        )

    def test_factored_and_direct_forms_agree(self):
        for v1, v2, eta_b in [(0.95, 0.9, 0.7), (0.999, 0.85, 1.0), (0.6, 0.6, 0.3)]:
            mode = make_mode(v1=v1, v2=v2, eta_b=eta_b)
            budget = output_power(500.0, mode, PARAMS, 0.7)
            direct = output_power_direct(500.0, mode, PARAMS, 0.7)
            assert budget.p_out == pytest.approx(direct, rel=1e-9)

    def test_current_drive_uses_diode_threshold(self):
        mode = make_mode()
        below = output_power(PARAMS.threshold_current, mode, PARAMS, 0.7, drive="current")
        assert below.p_out == 0.0
        above = output_power(30.0, mode, PARAMS, 0.7, drive="current")
        assert above.p_out > 0.0
        assert above.p_pump == pytest.approx(pump_power(30.0, PARAMS))

    def test_closed_channel_budget(self):
        mode = make_mode(v1=0.0, v2=0.0, eta_b=0.0)
        budget = output_power(200.0, mode, PARAMS, 0.7)
        assert budget.p_out == 0.0
        assert budget.eta_diff == 0.0
        assert math.isinf(budget.threshold)

    @given(
        p_in=st.floats(0.0, 2000.0),
        v1=st.floats(0.2, 1.0),
        v2=st.floats(0.2, 1.0),
        eta_b=st.floats(0.05, 1.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_energy_ordering(self, p_in, v1, v2, eta_b):
        budget = output_power(p_in, make_mode(v1=v1, v2=v2, eta_b=eta_b), PARAMS, 0.7)
        assert 0.0 <= budget.p_out <= budget.p_avail + 1e-12
        assert budget.p_avail <= budget.p_pump + 1e-12
        assert budget.p_pump <= budget.p_in + 1e-12


class TestChannelGain:
    def test_zero_extraction_gives_zero_gain(self):
        assert channel_gain(make_mode(v1=0.0, v2=0.0, eta_b=0.0), PARAMS, 0.7, 0.6) == 0.0

    def test_scaling_against_reference(self):
        mode = make_mode()
        eta_x = extraction_efficiency(mode, 0.7, PARAMS.medium_loss)
        expected = 0.6 * eta_x * 0.72 * 0.715 * 1.534462
        assert channel_gain(mode, PARAMS, 0.7, 0.6) == pytest.approx(expected, rel=1e-4)
