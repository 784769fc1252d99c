"""
Tests for the numeric tensor engine
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.exceptions import (
    DegeneratePlaneError,
    IllConditionedMetricError,
    UnsupportedChartError,
)
from hyperphg.hyperbolic import (
    ChartKind,
    ChartMap,
    ChartPoint,
    bisector_frame,
    bisector_point,
    chart_map,
    complex_structure_J,
    equidistant_mean_curvature,
    equidistant_shape_block,
    euclidean_model,
    metric_model,
    sample_points,
)
from hyperphg.tensor import (
    christoffel,
    curvature,
    equidistant_frame_block,
    gradient_coords,
    hessian_coords,
    inverse_metric,
    laplace_beltrami,
    mean_curvature,
    pullback_check,
    rho_direction_eigenvalue,
    second_fundamental_form,
    sectional_curvature,
)


class TestFiniteDifferences(unittest.TestCase):
    def test_gradient_of_polynomial(self):
        x = np.array([0.5, -1.5])
        grad = gradient_coords(lambda y: np.array(y[0] ** 3 + y[0] * y[1]), x)
        np.testing.assert_allclose(grad, [3 * 0.25 - 1.5, 0.5], atol=1e-10)

    def test_hessian_of_polynomial(self):
        x = np.array([0.5, 2.0])
        hess = hessian_coords(lambda y: float(y[0] ** 2 * y[1] + math.sin(y[1])), x)
        expected = np.array([[4.0, 1.0], [1.0, -math.sin(2.0)]])
        np.testing.assert_allclose(hess, expected, atol=1e-8)

    def test_inverse_refuses_ill_conditioned_metric(self):
        with self.assertRaises(IllConditionedMetricError):
            inverse_metric(np.diag([1.0, 1e-14]))


class TestUpperHalfSpace(unittest.TestCase):
    """Constant curvature -1 references"""

    def test_christoffel_symbols_at_base_point(self):
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [1.0, 0.0])
        gamma = christoffel(metric_model(ChartKind.UPPER_HALF_REAL, 2), p)
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 0] = -1.0
        expected[0, 1, 1] = 1.0
        expected[1, 0, 1] = expected[1, 1, 0] = -1.0
        np.testing.assert_allclose(gamma, expected, atol=1e-12)

    def test_flat_metric_has_no_curvature(self):
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 3, [1.0, 0.2, -0.3])
        curv = curvature(euclidean_model(3), p)
        self.assertEqual(float(np.max(np.abs(curv.christoffel))), 0.0)
        self.assertLess(float(np.max(np.abs(curv.riemann))), 1e-12)

    def test_sectional_curvature_is_minus_one(self):
        rng = np.random.default_rng(3)
        model = metric_model(ChartKind.UPPER_HALF_REAL, 3)
        for p in sample_points(ChartKind.UPPER_HALF_REAL, 3, 4, rng):
            curv = curvature(model, p)
            for _ in range(5):
                X, Y = rng.normal(size=3), rng.normal(size=3)
                K = sectional_curvature(model, p, X, Y, at_point=curv)
                self.assertAlmostEqual(K, -1.0, delta=1e-6)

    def test_einstein_constant(self):
        for n in (2, 3, 4):
            p = ChartPoint(ChartKind.UPPER_HALF_REAL, n, np.r_[1.3, 0.1 * np.ones(n - 1)])
            curv = curvature(metric_model(ChartKind.UPPER_HALF_REAL, n), p)
            self.assertAlmostEqual(curv.einstein_constant(), -(n - 1), delta=1e-6)
            self.assertLess(curv.einstein_defect(), 1e-6)
            self.assertLess(curv.symmetry_defect(), 1e-8)

    def test_laplacian_of_log_height(self):
        model = metric_model(ChartKind.UPPER_HALF_REAL, 2)
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [1.7, 0.4])
        value = laplace_beltrami(model, lambda q: math.log(q.coords[0]), p)
        self.assertAlmostEqual(value, 1.0, delta=1e-6)

    def test_degenerate_plane(self):
        model = metric_model(ChartKind.UPPER_HALF_REAL, 2)
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [1.0, 0.0])
        with self.assertRaises(DegeneratePlaneError):
            sectional_curvature(model, p, np.array([1.0, 1.0]), np.array([2.0, 2.0]))

    def test_model_rejects_foreign_points(self):
        model = metric_model(ChartKind.UPPER_HALF_REAL, 3)
        with self.assertRaises(UnsupportedChartError):
            curvature(model, ChartPoint(ChartKind.REAL_FERMI, 3, [0.1, 1.0, 0.0]))


class TestFermiFoliation(unittest.TestCase):
    def test_shape_operator_is_umbilic(self):
        model = metric_model(ChartKind.REAL_FERMI, 3)
        for s in (-1.2, 0.0, 0.8):
            p = ChartPoint(ChartKind.REAL_FERMI, 3, [s, 1.1, 0.3])
            foliation = second_fundamental_form(model, p)
            np.testing.assert_allclose(
                foliation.shape_operator, -math.tanh(s) * np.eye(2), atol=1e-9
            )
            self.assertAlmostEqual(mean_curvature(model, p), -2.0 * math.tanh(s), delta=1e-9)

    def test_siegel_has_no_slice_splitting(self):
        model = metric_model(ChartKind.SIEGEL, 2)
        p = ChartPoint(ChartKind.SIEGEL, 2, [1.0, 0.0, 0.0, 0.0])
        with self.assertRaises(UnsupportedChartError):
            second_fundamental_form(model, p)


class TestBisectorCurvature(unittest.TestCase):
    """Complex hyperbolic plane in bisector coordinates"""

    @classmethod
    def setUpClass(cls):
        cls.model = metric_model(ChartKind.BISECTOR, 2)
        cls.point = bisector_point(0.7, 0.3, 1.1, np.array([1.0, 0.0]))
        cls.curv = curvature(cls.model, cls.point)

    def test_holomorphic_and_totally_real_planes(self):
        rng = np.random.default_rng(11)
        for p in sample_points(ChartKind.BISECTOR, 2, 10, rng):
            curv = curvature(self.model, p)
            frame = bisector_frame(p)
            J = complex_structure_J(p)
            X = rng.normal(size=4)
            holomorphic = sectional_curvature(self.model, p, X, J @ X, at_point=curv)
            totally_real = sectional_curvature(self.model, p, frame.e_s, frame.e_rho, at_point=curv)
            self.assertAlmostEqual(holomorphic, -1.0, delta=1e-6)
            self.assertAlmostEqual(totally_real, -0.25, delta=1e-6)

    def test_pinching_on_random_planes(self):
        rng = np.random.default_rng(7)
        values = []
        for p in sample_points(ChartKind.BISECTOR, 2, 25, rng):
            curv = curvature(self.model, p)
            for _ in range(20):
                X, Y = rng.normal(size=4), rng.normal(size=4)
                values.append(sectional_curvature(self.model, p, X, Y, at_point=curv))
        self.assertEqual(len(values), 500)
        self.assertGreaterEqual(min(values), -1.0 - 1e-6)
        self.assertLessEqual(max(values), -0.25 + 1e-6)

    def test_einstein_constant(self):
        self.assertAlmostEqual(self.curv.einstein_constant(), -1.5, delta=1e-5)
        self.assertLess(self.curv.einstein_defect(), 1e-5)
        self.assertLess(self.curv.symmetry_defect(), 1e-5)

    def test_tau_is_harmonic(self):
        value = laplace_beltrami(self.model, lambda q: float(q.coords[1]), self.point)
        self.assertAlmostEqual(value, 0.0, delta=1e-6)

    def test_shape_operator_matches_closed_forms(self):
        points = sample_points(ChartKind.BISECTOR, 2, 50, np.random.default_rng(13))
        for p in points:
            s, rho = float(p.coords[0]), float(p.coords[2])
            self.assertAlmostEqual(
                rho_direction_eigenvalue(self.model, p), -0.5 * math.tanh(s / 2.0), delta=1e-8
            )
            np.testing.assert_allclose(
                equidistant_frame_block(self.model, p),
                equidistant_shape_block(s, rho),
                rtol=0,
                atol=1e-8,
            )
            self.assertAlmostEqual(
                mean_curvature(self.model, p), equidistant_mean_curvature(s, rho, 2), delta=1e-8
            )


def test_identity_pullback_is_exact(rng):
    points = sample_points(ChartKind.UPPER_HALF_REAL, 3, 10, rng)
    model = metric_model(ChartKind.UPPER_HALF_REAL, 3)
    report = pullback_check(chart_map("identity_upper_half_real"), model, model, points)
    assert report.max_deviation == 0.0
    assert report.checked == 10
    assert report.analytic_jacobian


def test_pullback_skips_points_leaving_the_domain():
    flip = ChartMap(
        "flip",
        ChartKind.UPPER_HALF_REAL,
        ChartKind.UPPER_HALF_REAL,
        lambda x, n: -np.asarray(x),
        lambda x, n: -np.eye(x.size),
    )
    model = metric_model(ChartKind.UPPER_HALF_REAL, 2)
    points = [ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [1.0, 0.0])] * 2
    report = pullback_check(flip, model, model, points)
    assert report.checked == 0
    assert len(report.skipped) == 2
