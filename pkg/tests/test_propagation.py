import math

import numpy as np
import pytest

from rbslipt import (
    SamplingError,
    ScalarField2D,
    ZeroFieldError,
    beam_radius,
    fresnel_propagate,
    gaussian_field,
    save_intensity_csv,
    uniform_field,
    validate_sampling,
)
from rbslipt.propagation import min_grid_size

from oracles import direct_fresnel_quadrature, second_moment_radius

LAM = 1.064e-6


class TestFresnelPropagate:
    def test_matches_direct_quadrature(self):
        rng = np.random.default_rng(7)
        n, dx = 32, 2e-4
        values = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        field = ScalarField2D(values, dx, LAM)
        out = fresnel_propagate(field, 0.8)
        expected = direct_fresnel_quadrature(values, dx, LAM, 0.8)
        rel = np.linalg.norm(out.values - expected) / np.linalg.norm(expected)
        assert rel < 1e-6

    def test_gaussian_spreads_per_beam_theory(self):
        w0, distance = 1e-3, 3.0
        zr = math.pi * w0**2 / LAM
        expected = w0 * math.sqrt(1.0 + (distance / zr) ** 2)
        n = 512
        window = 12 * expected
        field = gaussian_field(n, window / n, LAM, w0)
        out = fresnel_propagate(field, distance)
        assert beam_radius(out) == pytest.approx(expected, rel=1e-2)

    def test_power_conserved_for_interior_field(self):
        # grid satisfies the anti-aliasing bound, so chirp ghost replicas
        # fall outside the window and the cropped power is conserved
        n = 512
        window = 0.048
        field = gaussian_field(n, window / n, LAM, 1.8e-3)
        out = fresnel_propagate(field, 3.0)
        assert out.power() == pytest.approx(field.power(), rel=1e-6)

    def test_plane_wave_through_square_window(self):
        # centre value of a uniform field equals the closed-form Fresnel
        # diffraction of the square window: exp(jkL) times the squared
        # 1-D edge integral expressed with Fresnel sine/cosine integrals
        from scipy.special import fresnel

        n, window, distance = 1024, 0.048, 10.0
        field = uniform_field(n, window / n, LAM)
        out = fresnel_propagate(field, distance)
        centre = out.values[n // 2, n // 2]
        half = window / 2.0
        v = half * math.sqrt(2.0 / (LAM * distance))
        s, c = fresnel(v)
        g = math.sqrt(2.0) / np.sqrt(1j) * (c + 1j * s)
        expected = np.exp(1j * 2 * np.pi / LAM * distance) * g**2
        assert abs(centre / expected - 1.0) < 1e-2

    def test_rejects_non_positive_distance(self):
        field = uniform_field(32, 1e-4, LAM)
        with pytest.raises(Exception):
            fresnel_propagate(field, 0.0)


class TestSamplingGuard:
    def test_coarse_grid_raises_with_suggestion(self):
        n, window, distance, aperture = 256, 0.048, 3.0, 0.012
        with pytest.raises(SamplingError) as excinfo:
            validate_sampling(n, window / n, LAM, distance, aperture)
        suggested = excinfo.value.suggested_grid_size
        assert suggested is not None
        # the suggestion itself satisfies the bound
        validate_sampling(suggested, window / suggested, LAM, distance, aperture)

    def test_fine_grid_passes(self):
        n, window = 512, 0.048
        validate_sampling(n, window / n, LAM, 3.0, 0.012)

    def test_min_grid_size_is_power_of_two(self):
        n = min_grid_size(0.048, LAM, 3.0, 0.012)
        assert n & (n - 1) == 0
        assert n == 512

    def test_propagate_honours_aperture_argument(self):
        field = uniform_field(256, 0.048 / 256, LAM)
        with pytest.raises(SamplingError):
            fresnel_propagate(field, 3.0, aperture_radius=0.012)


class TestBeamRadius:
    def test_gaussian_radius(self):
        w0 = 1.2e-3
        field = gaussian_field(1024, 10 * w0 / 1024, LAM, w0)
        assert beam_radius(field) == pytest.approx(w0, rel=5e-3)

    def test_uniform_disc_radius(self):
        # second-moment radius of a uniform disc equals its radius
        a = 2e-3
        n = 1024
        field = uniform_field(n, 6 * a / n, LAM)
        x, y = field.coordinates()
        field.values[x**2 + y**2 > a**2] = 0.0
        oracle = second_moment_radius(np.abs(field.values) ** 2, field.dx)
        assert beam_radius(field) == pytest.approx(oracle, rel=1e-12)
        assert beam_radius(field) == pytest.approx(a, rel=1e-2)

    def test_translation_invariant(self):
        w0 = 1e-3
        centered = gaussian_field(512, 12 * w0 / 512, LAM, w0)
        shifted = gaussian_field(512, 12 * w0 / 512, LAM, w0, center=(2 * w0, -w0))
        assert beam_radius(shifted) == pytest.approx(beam_radius(centered), rel=1e-6)

    def test_zero_field_undefined(self):
        field = uniform_field(32, 1e-4, LAM, value=0.0)
        with pytest.raises(ZeroFieldError):
            beam_radius(field)


class TestIntensityDump:
    def test_csv_round_trip(self, tmp_path):
        field = gaussian_field(32, 1e-4, LAM, 1e-3)
        path = tmp_path / "mode.csv"
        save_intensity_csv(field, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        assert "dx_m=0.0001" in lines[0]
        assert "wavelength_m=1.064e-06" in lines[0]
        data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        assert data.shape == (32, 32)
        assert data == pytest.approx(np.abs(field.values) ** 2, rel=1e-8)
