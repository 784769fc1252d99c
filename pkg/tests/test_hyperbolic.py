"""
Tests for the hyperbolic models, charts and closed forms
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.constants import PULLBACK_BOX, PULLBACK_TOL_ANALYTIC, PULLBACK_TOL_FD
from hyperphg.exceptions import DomainError, UnsupportedChartError
from hyperphg.hyperbolic import (
    ChartKind,
    ChartPoint,
    bisector_point,
    bisector_to_siegel,
    chart_map,
    complex_structure_J,
    defining_function,
    equidistant_mean_curvature,
    equidistant_mean_curvature_displayed,
    equidistant_shape_block,
    fermi_slice_cosh_distance,
    inversion,
    large_rho_deviation,
    measured_tau_exponent,
    metric_bisector,
    metric_model,
    real_fermi_to_upper_half,
    sample_points,
    siegel_height,
    siegel_to_complex,
    sphere_coords_from_vector,
    sphere_from_coords,
    uv_dictionary,
    uv_to_bisector,
)
from hyperphg.tensor import pullback_check


class TestChartPoints(unittest.TestCase):
    """Construction and domain validation"""

    def test_wrong_coordinate_count(self):
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.BISECTOR, 2, np.zeros(3))

    def test_domain_violations(self):
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.UPPER_HALF_REAL, 3, [0.0, 1.0, 1.0])
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.REAL_FERMI, 3, [0.5, -1.0, 0.0])
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.BISECTOR, 2, [0.5, 0.1, 0.0, 0.3])
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.SIEGEL, 2, [0.0, 0.0, 0.0, 0.0])

    def test_complex_needs_m_at_least_two(self):
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.BISECTOR, 1, np.ones(2))

    def test_coords_are_read_only(self):
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [1.0, 0.0])
        with self.assertRaises(ValueError):
            p.coords[0] = 2.0

    def test_sphere_vector_is_unit(self):
        for m in (2, 3, 4):
            coords = np.concatenate([[0.3, 0.2, 1.0], 0.4 * np.ones(2 * m - 3)])
            p = ChartPoint(ChartKind.BISECTOR, m, coords)
            self.assertAlmostEqual(float(np.linalg.norm(p.sphere_vector())), 1.0, places=14)

    def test_sphere_coordinates_round_trip(self):
        y = np.array([0.6, 0.0, 0.0, 0.8])
        sigma = sphere_coords_from_vector(y, 3)
        np.testing.assert_allclose(sphere_from_coords(sigma, 3), y, atol=1e-14)

    def test_sphere_vector_rejected_on_siegel(self):
        p = ChartPoint(ChartKind.SIEGEL, 2, [1.0, 0.0, 0.0, 0.0])
        with self.assertRaises(UnsupportedChartError):
            p.sphere_vector()


class TestRealModel(unittest.TestCase):
    """Upper half-space and Fermi chart"""

    def test_fermi_map_lands_in_upper_half(self):
        p = ChartPoint(ChartKind.REAL_FERMI, 3, [0.7, 1.2, -0.4])
        image = real_fermi_to_upper_half(p)
        self.assertEqual(image.chart, ChartKind.UPPER_HALF_REAL)
        self.assertAlmostEqual(image.coords[0], 1.2 / math.cosh(0.7), places=14)
        self.assertAlmostEqual(image.coords[-1], 1.2 * math.tanh(0.7), places=14)

    def test_fermi_pullback_is_exact(self):
        for n in (3, 4):
            points = sample_points(ChartKind.REAL_FERMI, n, 100, np.random.default_rng(n))
            report = pullback_check(
                chart_map("real_fermi_to_upper_half"),
                metric_model(ChartKind.REAL_FERMI, n),
                metric_model(ChartKind.UPPER_HALF_REAL, n),
                points,
            )
            self.assertTrue(report.analytic_jacobian)
            self.assertEqual(report.checked, 100)
            self.assertLess(report.max_deviation, PULLBACK_TOL_ANALYTIC)

    def test_slice_distance_at_base_point(self):
        self.assertEqual(fermi_slice_cosh_distance(np.array([1.0, 0.0])), 1.0)
        # cosh of the distance from (1, 0) to (e, 0) is cosh(1)
        self.assertAlmostEqual(
            fermi_slice_cosh_distance(np.array([math.e, 0.0])), math.cosh(1.0), places=12
        )

    def test_inversion_flips_the_wall(self):
        p = ChartPoint(ChartKind.REAL_FERMI, 3, [0.7, 1.2, -0.4])
        self.assertAlmostEqual(inversion(p).coords[0], -0.7)
        np.testing.assert_allclose(inversion(inversion(p)).coords, p.coords)


class TestComplexModel(unittest.TestCase):
    """Siegel domain and bisector chart"""

    def bisector_pullback(self, m, ranges=None):
        points = sample_points(ChartKind.BISECTOR, m, 100, np.random.default_rng(m), ranges)
        return pullback_check(
            chart_map("bisector_to_siegel"),
            metric_model(ChartKind.BISECTOR, m),
            metric_model(ChartKind.SIEGEL, m),
            points,
        )

    def test_bisector_pullback(self):
        for m in (2, 3):
            report = self.bisector_pullback(m, PULLBACK_BOX)
            self.assertEqual(report.checked, 100)
            self.assertFalse(report.analytic_jacobian)
            self.assertLess(report.max_deviation, PULLBACK_TOL_FD)
            self.assertLessEqual(report.max_relative_deviation, report.max_deviation)

    def test_bisector_pullback_relative_over_the_full_box(self):
        # Siegel entries reach ~1e6 at |s|, rho = 5; only the scaled deviation stays small
        for m in (2, 3):
            report = self.bisector_pullback(m)
            self.assertEqual(report.checked, 100)
            self.assertLess(report.max_relative_deviation, 1e-9)
            self.assertGreaterEqual(report.max_deviation, report.max_relative_deviation)

    def test_bisector_is_the_wall(self):
        # |z_m| = e^tau on s = 0
        p = bisector_point(0.0, 0.4, 1.3, np.array([1.0, 0.0]))
        image = bisector_to_siegel(p)
        z = siegel_to_complex(image)
        self.assertAlmostEqual(abs(z[-1]), math.exp(0.4), places=12)

    def test_defining_function_matches_siegel_height(self):
        p = bisector_point(0.8, 0.3, 1.1, np.array([0.0, 1.0]))
        z = siegel_to_complex(bisector_to_siegel(p))
        self.assertAlmostEqual(
            siegel_height(z), defining_function(0.8, 0.3, 1.1), places=12
        )
        self.assertAlmostEqual(measured_tau_exponent(p), 1.0, places=6)

    def test_inversion_is_an_isometry(self):
        box = {"xi": (0.5, 1.5), "flat": (-0.5, 0.5)}
        points = sample_points(ChartKind.SIEGEL, 2, 20, np.random.default_rng(5), box)
        model = metric_model(ChartKind.SIEGEL, 2)
        report = pullback_check(chart_map("inversion_siegel"), model, model, points)
        self.assertLess(report.max_deviation, 1e-6)

    def test_bisector_map_commutes_with_inversion(self):
        siegel_inversion = chart_map("inversion_siegel")
        for m in (2, 3):
            for p in sample_points(ChartKind.BISECTOR, m, 50, np.random.default_rng(10 + m)):
                image = bisector_to_siegel(p)
                np.testing.assert_allclose(
                    bisector_to_siegel(inversion(p)).coords,
                    siegel_inversion(image).coords,
                    rtol=1e-10,
                    atol=1e-12,
                )
                np.testing.assert_allclose(
                    inversion(image).coords, siegel_inversion(image).coords, rtol=1e-14
                )

    def test_complex_structure_squares_to_minus_one(self):
        p = bisector_point(0.5, -0.2, 1.4, np.array([0.6, 0.8]))
        J = complex_structure_J(p)
        np.testing.assert_allclose(J @ J, -np.eye(4), atol=1e-10)
        g = metric_bisector(p)
        np.testing.assert_allclose(J.T @ g @ J, g, atol=1e-10)

    def test_uv_dictionary_round_trip(self):
        p = bisector_point(1.2, 0.3, 0.9, np.array([1.0, 0.0]))
        uv = uv_dictionary(p)
        self.assertAlmostEqual(uv.coords[0], 1.0 / math.cosh(0.6) ** 2, places=14)
        self.assertAlmostEqual(uv.coords[2], math.exp(-0.6), places=14)
        np.testing.assert_allclose(uv_to_bisector(uv).coords, p.coords, atol=1e-12)

    def test_uv_dictionary_is_even_in_s(self):
        p = bisector_point(-1.2, 0.3, 0.9, np.array([1.0, 0.0]))
        uv = uv_dictionary(p)
        mirror = uv_dictionary(bisector_point(1.2, 0.3, 0.9, np.array([1.0, 0.0])))
        np.testing.assert_allclose(uv.coords, mirror.coords, rtol=1e-15)
        self.assertAlmostEqual(uv_to_bisector(uv).coords[0], 1.2, places=12)
        np.testing.assert_allclose(uv_to_bisector(uv, s_sign=-1).coords, p.coords, atol=1e-12)
        with self.assertRaises(ValueError):
            uv_to_bisector(uv, s_sign=0)

    def test_large_rho_frame_improves(self):
        y = np.array([1.0, 0.0])
        near = large_rho_deviation(bisector_point(0.5, 0.3, 2.0, y))
        far = large_rho_deviation(bisector_point(0.5, 0.3, 10.0, y))
        self.assertLess(far, near)


def test_mean_curvature_vanishes_on_the_bisector():
    for rho in (0.1, 1.0, 4.0):
        assert equidistant_mean_curvature(0.0, rho, 2) == 0.0


def test_mean_curvature_limit():
    for m in (2, 3, 5):
        for rho in (0.5, 2.0):
            assert math.isclose(equidistant_mean_curvature(20.0, rho, m), -m, abs_tol=1e-4)


def test_displayed_mean_curvature_differs_only_in_second_term():
    s, rho, m = 1.0, 1.0, 2
    diff = equidistant_mean_curvature_displayed(s, rho, m) - equidistant_mean_curvature(s, rho, m)
    q, big_c, c = math.tanh(0.5), math.cosh(0.5), math.cosh(0.5)
    assert math.isclose(diff, -q / (big_c**2 * (c**2 + q**2)), rel_tol=1e-12)


def test_shape_block_is_symmetric_and_scales_mixed_entry():
    block = equidistant_shape_block(0.7, 1.3)
    doubled = equidistant_shape_block(0.7, 1.3, 2.0)
    assert block[0, 1] == block[1, 0]
    assert math.isclose(doubled[0, 1], 2.0 * block[0, 1], rel_tol=1e-14)
    assert math.isclose(doubled[0, 0], block[0, 0], rel_tol=1e-14)


def test_sampler_respects_chart_domains(rng):
    for chart, parameter in [
        (ChartKind.UPPER_HALF_REAL, 3),
        (ChartKind.REAL_FERMI, 4),
        (ChartKind.SIEGEL, 2),
        (ChartKind.BISECTOR, 3),
        (ChartKind.UV_RHO, 2),
    ]:
        points = sample_points(chart, parameter, 10, rng)
        assert len(points) == 10
        assert all(p.chart == chart for p in points)
