import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslipt import (
    CavityConfig,
    InvalidGeometryError,
    MisalignmentVector,
    NoUniqueAxisError,
    RayState,
    cat_eye_matrix,
    cat_eye_misalignment,
    equivalent_fp,
    free_space,
    optic_axis,
    round_trip,
    solve_optic_axis,
    thin_lens,
)


def lens_arr(f):
    return np.array([[1.0, 0.0], [-1.0 / f, 1.0]])


def drift_arr(d):
    return np.array([[1.0, d], [0.0, 1.0]])


class TestTransferMatrices:
    def test_zero_drift_is_identity(self):
        assert free_space(0.0).as_array() == pytest.approx(np.eye(2))

    def test_drift_three_metres(self):
        assert free_space(3.0).as_array() == pytest.approx(
            np.array([[1.0, 3.0], [0.0, 1.0]])
        )

    def test_drift_composition_is_additive(self):
        combined = free_space(1.0) @ free_space(2.0)
        assert combined.as_array() == pytest.approx(free_space(3.0).as_array())

    def test_negative_drift_rejected(self):
        with pytest.raises(InvalidGeometryError):
            free_space(-1e-9)

    def test_ideal_cat_eye(self):
        m = cat_eye_matrix(0.05, 0.05)
        assert m.as_array() == pytest.approx(
            np.array([[-1.0, 0.1], [0.0, -1.0]]), abs=1e-14
        )

    def test_general_cat_eye_matches_factor_product(self):
        f, l = 0.04, 0.055
        expected = lens_arr(f) @ drift_arr(l) @ drift_arr(l) @ lens_arr(f)
        assert cat_eye_matrix(f, l).as_array() == pytest.approx(expected)

    def test_cat_eye_requires_positive_lengths(self):
        with pytest.raises(InvalidGeometryError):
            cat_eye_matrix(0.0, 0.05)
        with pytest.raises(InvalidGeometryError):
            cat_eye_matrix(0.05, -0.01)

    def test_double_cat_eye_reverses_direction_twice(self):
        # retro-reflection is an involution on ray direction; the offset
        # row picks up the double-pass walk but the determinant stays 1
        m = cat_eye_matrix(0.05, 0.05)
        twice = m @ m
        assert twice.as_array()[1] == pytest.approx([0.0, 1.0], abs=1e-14)
        assert twice.det == pytest.approx(1.0, abs=1e-12)

    @given(
        f=st.floats(0.01, 0.5),
        l=st.floats(0.01, 0.5),
        d=st.floats(0.0, 20.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_passive_elements_are_unimodular(self, f, l, d):
        for matrix in (thin_lens(f), free_space(d), cat_eye_matrix(f, l)):
            assert abs(matrix.det - 1.0) < 1e-12


class TestMisalignment:
    def test_aligned_component_has_zero_offset(self):
        aug = cat_eye_misalignment(0.05, 0.05, MisalignmentVector(0.0))
        assert aug.offset() == pytest.approx([0.0, 0.0])

    def test_rederived_closed_form(self):
        # (M_delta - M_cat) @ (delta, 0) = (2 delta l / f, 2 delta (f - l) / f^2)
        f, l, delta = 0.05, 0.03, 0.1
        aug = cat_eye_misalignment(f, l, MisalignmentVector(delta))
        expected = (2 * delta * l / f, 2 * delta * (f - l) / f**2)
        assert aug.offset() == pytest.approx(expected, rel=1e-12)

    def test_paper_form_literal_values(self):
        aug = cat_eye_misalignment(
            0.05, 0.05, MisalignmentVector(0.1), formula="paper"
        )
        assert aug.e == pytest.approx(-2 * 0.1 * 0.05 / 0.05)
        assert aug.f_term == pytest.approx(2 * 0.1 * (1 - 0.05) / 0.05**2)

    def test_offset_linear_in_displacement(self):
        one = cat_eye_misalignment(0.05, 0.04, MisalignmentVector(0.02))
        two = cat_eye_misalignment(0.05, 0.04, MisalignmentVector(0.04))
        assert two.offset() == pytest.approx(2.0 * one.offset())

    def test_unknown_formula_rejected(self):
        with pytest.raises(InvalidGeometryError):
            cat_eye_misalignment(0.05, 0.05, MisalignmentVector(0.1), formula="bogus")


class TestRoundTrip:
    def test_aligned_round_trip_has_no_offset(self):
        config = CavityConfig()
        rt = round_trip(config, MisalignmentVector(0.0))
        cat_fs = cat_eye_matrix(0.05, 0.05) @ free_space(3.0)
        expected = cat_fs @ cat_fs
        assert rt.m.as_array() == pytest.approx(expected.as_array())
        assert rt.offset() == pytest.approx([0.0, 0.0])

    def test_matches_explicit_matrix_product(self):
        f = l = 0.05
        d = 3.0
        delta = 0.07
        config = CavityConfig(focal_length=f, lens_gap=l, separation=d)
        rt = round_trip(config, MisalignmentVector(delta))
        cat = lens_arr(f) @ drift_arr(l) @ drift_arr(l) @ lens_arr(f)
        m_tot = cat @ drift_arr(d) @ cat @ drift_arr(d)
        e_m = (drift_arr(2 * l) - cat) @ np.array([delta, 0.0])
        e_tot = cat @ drift_arr(d) @ e_m
        assert rt.m.as_array() == pytest.approx(m_tot, abs=1e-12)
        assert rt.offset() == pytest.approx(e_tot, abs=1e-12)

    @given(
        f=st.floats(0.02, 0.2),
        l_scale=st.floats(0.5, 1.5),
        d=st.floats(0.5, 10.0),
        delta=st.floats(-0.2, 0.2),
    )
    @settings(max_examples=50, deadline=None)
    def test_round_trip_determinant_is_one(self, f, l_scale, d, delta):
        if d <= 2 * f:
            d = 2 * f + 0.5
        config = CavityConfig(
            focal_length=f, lens_gap=f * l_scale, separation=d
        )
        rt = round_trip(config, MisalignmentVector(delta))
        # composites can carry large entries; scale the unit-determinant
        # tolerance by the cancellation magnitude of a*d - b*c
        m = rt.m
        scale = max(1.0, abs(m.a * m.d) + abs(m.b * m.c))
        assert abs(m.det - 1.0) < 1e-12 * scale


class TestOpticAxis:
    def test_aligned_axis_is_origin(self):
        ray = optic_axis(CavityConfig(), MisalignmentVector(0.0))
        assert (ray.r, ray.slope) == pytest.approx((0.0, 0.0), abs=1e-15)

    def test_ideal_cavity_closed_form(self):
        delta, f, d = 0.1, 0.05, 3.0
        config = CavityConfig(focal_length=f, lens_gap=f, separation=d)
        ray = optic_axis(config, MisalignmentVector(delta))
        assert ray.r == pytest.approx(-delta * f / (d - 2 * f), rel=1e-12)
        assert ray.slope == pytest.approx(delta / (d - 2 * f), rel=1e-12)
        assert ray.r == pytest.approx(-0.005 / 2.9, rel=1e-10)
        assert ray.slope == pytest.approx(0.1 / 2.9, rel=1e-10)

    def test_fixed_point_residual_ideal(self):
        config = CavityConfig()
        delta = MisalignmentVector(0.05)
        rt = round_trip(config, delta)
        ray = solve_optic_axis(rt, pin_distance=config.focal_length)
        residual = rt.m.as_array() @ ray.as_array() + rt.offset() - ray.as_array()
        assert np.abs(residual).max() < 1e-10

    @given(
        f=st.floats(0.02, 0.1),
        l_ratio=st.floats(0.6, 1.4),
        d=st.floats(1.0, 8.0),
        delta=st.floats(-0.1, 0.1),
    )
    @settings(max_examples=50, deadline=None)
    def test_fixed_point_residual_general(self, f, l_ratio, d, delta):
        l = f * l_ratio
        if abs(l - f) < 1e-4:
            l = f * 1.05
        config = CavityConfig(focal_length=f, lens_gap=l, separation=max(d, 2 * f + 0.5))
        rt = round_trip(config, MisalignmentVector(delta))
        ray = solve_optic_axis(rt)
        residual = rt.m.as_array() @ ray.as_array() + rt.offset() - ray.as_array()
        scale = max(1.0, abs(ray.r), abs(ray.slope))
        assert np.abs(residual).max() < 1e-10 * scale

    def test_axis_linear_in_displacement(self):
        config = CavityConfig()
        one = optic_axis(config, MisalignmentVector(0.02))
        two = optic_axis(config, MisalignmentVector(0.04))
        assert two.r == pytest.approx(2 * one.r, rel=1e-9)
        assert two.slope == pytest.approx(2 * one.slope, rel=1e-9)

    def test_degenerate_without_pin_raises(self):
        rt = round_trip(CavityConfig(), MisalignmentVector(0.1))
        with pytest.raises(NoUniqueAxisError):
            solve_optic_axis(rt)

    def test_paper_formula_round_trip_is_inconsistent(self):
        # the literal printed offset breaks the fixed-ray consistency of
        # the ideal cavity; the solver refuses rather than inventing one
        config = CavityConfig(misalignment_formula="paper")
        rt = round_trip(config, MisalignmentVector(0.1))
        with pytest.raises(NoUniqueAxisError):
            solve_optic_axis(rt, pin_distance=config.focal_length)


class TestEquivalentResonator:
    def test_nadir_length_equals_separation(self):
        length, theta = equivalent_fp(CavityConfig())
        assert length == pytest.approx(3.0)
        assert theta == 0.0

    def test_deflection_angle_matches_axis_slope(self):
        delta = 0.1
        config = CavityConfig.from_offset(delta)
        ray = optic_axis(config)
        _, theta = equivalent_fp(config)
        assert math.tan(theta) == pytest.approx(ray.slope, rel=1e-12)
        assert math.tan(theta) == pytest.approx(delta / (3.0 - 0.1), rel=1e-12)

    def test_short_cavity_warns(self):
        config = CavityConfig(separation=0.3)
        with pytest.warns(UserWarning, match="separation"):
            equivalent_fp(config)


class TestValidation:
    def test_reflectivity_bounds(self):
        with pytest.raises(InvalidGeometryError):
            CavityConfig(reflectivity=0.0)
        with pytest.raises(InvalidGeometryError):
            CavityConfig(reflectivity=1.2)

    def test_grid_size_power_of_two(self):
        with pytest.raises(InvalidGeometryError):
            CavityConfig(grid_size=1000)

    def test_separation_exceeds_double_focal(self):
        with pytest.raises(InvalidGeometryError):
            CavityConfig(separation=0.08, focal_length=0.05)

    def test_paraxial_slope_warns(self):
        with pytest.warns(UserWarning, match="paraxial"):
            RayState(0.0, 0.6)
