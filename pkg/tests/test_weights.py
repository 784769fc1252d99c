"""
Tests for the double weights and the positivity certificate
"""

import sys
import unittest
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.exceptions import UnsupportedShiftError, WeightRangeError
from hyperphg.hyperbolic import ChartKind, ChartPoint, bisector_point, sample_points
from hyperphg.models import GeometryKind, WeightSpec
from hyperphg.weights import (
    admissible_grid,
    asymptotic_limit,
    certify_positivity,
    check_admissible,
    limit_deviation,
    log_weight,
    scan_grid_frame,
    shifted_interval,
    weight_functional_closed,
    weight_functional_lower_bound,
    weight_functional_numeric,
    weight_value,
    weighted_identity_residual,
)


def real_spec(n=4, d1=1.0, d2=1.0):
    return WeightSpec(kind=GeometryKind.REAL, dimension=n, delta1=d1, delta2=d2)


def complex_spec(m=2, d1=1.0, d2=1.25):
    return WeightSpec(kind=GeometryKind.COMPLEX, dimension=m, delta1=d1, delta2=d2)


class TestAdmissibility(unittest.TestCase):
    def test_admissible_specs_pass(self):
        check_admissible(real_spec())
        check_admissible(complex_spec())

    def test_delta1_at_the_upper_end(self):
        with self.assertRaises(WeightRangeError) as ctx:
            check_admissible(real_spec(n=3, d1=2.0, d2=0.0))
        self.assertIn("n-1", ctx.exception.inequality)

    def test_delta2_cap_for_the_complex_plane(self):
        with self.assertRaises(WeightRangeError) as ctx:
            check_admissible(complex_spec(m=2, d1=1.0, d2=1.4))
        self.assertIn("5/4", ctx.exception.inequality)

    def test_weight_on_the_wrong_chart(self):
        p = ChartPoint(ChartKind.UPPER_HALF_REAL, 4, [1.0, 0.0, 0.0, 0.0])
        with self.assertRaises(WeightRangeError):
            log_weight(real_spec(), p)


class TestFunctional(unittest.TestCase):
    """Closed forms against the tensor engine"""

    def test_weight_is_one_at_the_base_point(self):
        p = ChartPoint(ChartKind.REAL_FERMI, 4, [0.0, 1.0, 0.0, 0.0])
        self.assertAlmostEqual(weight_value(real_spec(), p), 1.0, places=14)

    def assert_numeric_matches_closed(self, spec, chart, seed):
        points = sample_points(chart, spec.dimension, 100, np.random.default_rng(seed))
        for p in points:
            closed = weight_functional_closed(spec, p)
            numeric = weight_functional_numeric(spec, p)
            self.assertLessEqual(abs(numeric - closed), 1e-5 * max(1.0, abs(closed)))

    def test_real_closed_form_matches_numeric(self):
        self.assert_numeric_matches_closed(real_spec(n=3, d1=0.7, d2=0.5), ChartKind.REAL_FERMI, 2)

    def test_complex_closed_form_matches_numeric(self):
        self.assert_numeric_matches_closed(complex_spec(m=2, d1=1.2, d2=0.8), ChartKind.BISECTOR, 4)

    def test_lower_bound_is_below_the_functional(self):
        spec = real_spec(n=4, d1=1.0, d2=1.5)
        for p in sample_points(ChartKind.REAL_FERMI, 4, 10, np.random.default_rng(6)):
            self.assertLessEqual(
                weight_functional_lower_bound(spec, p), weight_functional_closed(spec, p) + 1e-12
            )

    def test_weighted_identity(self):
        spec = complex_spec(m=2, d1=1.0, d2=0.5)
        p = bisector_point(0.6, 0.2, 1.0, np.array([1.0, 0.0]))
        self.assertLess(weighted_identity_residual(spec, p), 1e-5)

    def test_weighted_identity_over_the_sampling_box(self):
        rng = np.random.default_rng(9)
        for spec, chart in [
            (real_spec(n=4, d1=1.0, d2=1.0), ChartKind.REAL_FERMI),
            (complex_spec(m=2, d1=1.0, d2=1.25), ChartKind.BISECTOR),
        ]:
            for p in sample_points(chart, spec.dimension, 20, rng):
                self.assertLess(weighted_identity_residual(spec, p), 1e-5)

    def test_limit_far_from_the_wall(self):
        for spec in (real_spec(), complex_spec()):
            self.assertLess(limit_deviation(spec), 1e-4)
        self.assertEqual(asymptotic_limit(real_spec()), 2.0)
        self.assertEqual(asymptotic_limit(complex_spec()), 1.0)


class TestCertificates(unittest.TestCase):
    def test_real_certificate(self):
        report = certify_positivity(real_spec(), resolution=0.05)
        self.assertTrue(report.passed)
        self.assertGreater(report.infimum, 0.0)
        self.assertEqual(report.nodes, 21 * 21)
        self.assertGreater(report.lower_bound_infimum, 0.0)

    def test_complex_certificate_at_the_delta2_cap(self):
        report = certify_positivity(complex_spec(), resolution=0.05, max_workers=2)
        self.assertTrue(report.passed)
        self.assertIn("tau", report.domain)

    def test_certificate_refuses_inadmissible_weights(self):
        with self.assertRaises(WeightRangeError):
            certify_positivity(real_spec(n=4, d1=3.0), resolution=0.05)

    def test_shifted_interval(self):
        spec = WeightSpec(kind=GeometryKind.REAL, dimension=4, delta1=3.5, delta2=0.0)
        report = shifted_interval(spec, 4.0, resolution=0.05)
        self.assertAlmostEqual(report.lower, -1.0, places=12)
        self.assertAlmostEqual(report.upper, 4.0, places=12)
        self.assertTrue(report.delta1_inside)
        self.assertTrue(report.passed)

    def test_negative_shift(self):
        with self.assertRaises(UnsupportedShiftError):
            shifted_interval(real_spec(), -1.0)


def test_scan_grid_frame_columns():
    frame = scan_grid_frame(real_spec(), resolution=0.05)
    assert list(frame.columns) == ["tanh2_s", "tanh2_rho", "value"]
    assert len(frame) == 21 * 21
    assert (frame["value"] > 0).all()


@pytest.mark.parametrize(
    "kind,dimension", [(GeometryKind.REAL, 4), (GeometryKind.COMPLEX, 2), (GeometryKind.COMPLEX, 3)]
)
def test_admissible_grid(kind, dimension):
    specs = admissible_grid(kind, dimension)
    assert len(specs) == 25
    assert all(spec.violated_inequality() is None for spec in specs)


@pytest.mark.parametrize(
    "kind,dimension",
    [
        (GeometryKind.REAL, 3),
        (GeometryKind.REAL, 4),
        (GeometryKind.REAL, 5),
        (GeometryKind.COMPLEX, 2),
        (GeometryKind.COMPLEX, 3),
    ],
)
def test_admissible_grid_is_certified(kind, dimension):
    for spec in admissible_grid(kind, dimension):
        report = certify_positivity(spec, resolution=0.05, max_workers=2)
        assert report.passed, (spec.delta1, spec.delta2, report.infimum)
        assert report.infimum > 0
