"""
Tests for the radial operators, the integral right inverses and the iteration
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.exact import ExactWeight
from hyperphg.exceptions import OutOfRangeError, QuadratureError, ResonanceDomainError
from hyperphg.phg import (
    BRANCH_INF,
    BRANCH_ZERO,
    G_0,
    G_0_split,
    G_inf,
    G_quadrature,
    ModelProblem,
    RadialOperator,
    apply_indicial,
    ode_reference_solve,
    phg_iterate,
    quadrature_residual,
    remainder_reference_solve,
    right_inverse_defect,
)
from hyperphg.presets import scenario_problem
from hyperphg.series import PolySeries


def mono(coeff, tau, sigma=0, mode=0, modes=1):
    return PolySeries.monomial(coeff, tau, sigma, mode, modes)


class TestRadialOperator(unittest.TestCase):
    def setUp(self):
        self.op = RadialOperator.build(3, [0], s0=2.0)

    def test_critical_roots(self):
        self.assertEqual(self.op.alpha_minus(0), ExactWeight(0))
        self.assertEqual(self.op.alpha_plus(0), ExactWeight(3))
        self.assertEqual(self.op.gap(0), ExactWeight(3))

    def test_indicial_roots_are_annihilated(self):
        for tau in (0, 3):
            self.assertTrue(apply_indicial(self.op, mono(1.0, tau)).is_zero)

    def test_branch_selection(self):
        self.assertEqual(self.op.branch(0, 4), BRANCH_INF)
        self.assertEqual(self.op.branch(0, 3), BRANCH_ZERO)
        self.assertEqual(self.op.branch(0, "1/2"), BRANCH_ZERO)
        with self.assertRaises(OutOfRangeError):
            self.op.branch(0, 0)

    def test_double_root_and_endpoint(self):
        with self.assertRaises(ValueError):
            RadialOperator.build(2, [-1])
        with self.assertRaises(ValueError):
            RadialOperator.build(3, [0], s0=0.0)


class TestRightInverses(unittest.TestCase):
    """G_inf and G_0 in closed form"""

    def setUp(self):
        self.op = RadialOperator.build(3, [0], s0=2.0)

    def test_G_inf_on_a_decaying_exponential(self):
        image = G_inf(self.op, mono(1.0, 4))
        self.assertEqual(len(image), 1)
        self.assertAlmostEqual(image.coefficient(0, 4)[0], 0.25, places=14)

    def test_G_0_below_the_upper_root(self):
        main, kernel = G_0_split(self.op, mono(1.0, 2))
        self.assertAlmostEqual(main.coefficient(0, 2)[0], -0.5, places=14)
        self.assertAlmostEqual(kernel.coefficient(0, 3)[0], math.exp(2.0) / 3.0, places=12)

    def test_resonance_raises_the_power_once(self):
        for sigma in range(3):
            image = G_0(self.op, mono(1.0, 3, sigma))
            self.assertEqual(image.max_sigma, sigma + 1)
            self.assertAlmostEqual(
                image.coefficient(sigma + 1, 3)[0], -1.0 / (3.0 * (sigma + 1)), places=14
            )
        self.assertEqual(G_0(self.op, mono(1.0, 2, 2)).max_sigma, 2)

    def test_domain_errors(self):
        with self.assertRaises(ResonanceDomainError):
            G_inf(self.op, mono(1.0, 3))
        with self.assertRaises(OutOfRangeError):
            G_0(self.op, mono(1.0, 4))
        with self.assertRaises(OutOfRangeError):
            G_0(self.op, mono(1.0, 0))

    def test_right_inverse_on_rational_data(self):
        rng = np.random.default_rng(20)
        pairs = [(f"{rng.integers(2, 9)}/2", f"{rng.integers(0, 13)}/4") for _ in range(20)]
        for hessian, eigenvalue in pairs:
            op = RadialOperator.build(hessian, [eigenvalue], s0=5.0)
            lo, hi = op.alpha_minus(0), op.alpha_plus(0)
            above = sum(
                (mono(1.0 + sigma, hi + 1 + sigma, sigma) for sigma in range(4)),
                PolySeries.zero(),
            )
            inside = mono(0.5, op.hessian / 2, 2) + mono(-1.0, hi, 3) + mono(2.0, (lo + hi) / 2)
            self.assertLessEqual(right_inverse_defect(op, above, BRANCH_INF), 1e-12)
            self.assertLessEqual(right_inverse_defect(op, inside, BRANCH_ZERO), 1e-12)


class TestQuadrature(unittest.TestCase):
    def setUp(self):
        self.op = RadialOperator.build(3, [0], s0=2.0)
        self.grid = np.linspace(1.0, 2.0, 101)

    def test_G_inf_by_quadrature(self):
        values = G_quadrature(self.op, lambda s: math.exp(-4.0 * s), self.grid)
        np.testing.assert_allclose(values, np.exp(-4.0 * self.grid) / 4.0, rtol=1e-8)
        f_values = np.exp(-4.0 * self.grid)
        self.assertLess(quadrature_residual(self.op, values, f_values, self.grid), 1e-6)

    def test_G_0_by_quadrature(self):
        values = G_quadrature(self.op, lambda s: math.exp(-2.0 * s), self.grid, BRANCH_ZERO)
        exact = G_0(self.op, mono(1.0, 2)).evaluate(self.grid)[0]
        np.testing.assert_allclose(values, exact, rtol=1e-8, atol=1e-12)

    def test_slow_decay_is_refused(self):
        with self.assertRaises(QuadratureError):
            G_quadrature(self.op, lambda s: math.exp(-2.0 * s), self.grid)

    def test_zero_input(self):
        values = G_quadrature(self.op, lambda s: 0.0, self.grid)
        self.assertFalse(np.any(values))


class TestIteration(unittest.TestCase):
    """phg_iterate on the preset scenarios"""

    def test_basic_scenario(self):
        result = phg_iterate(scenario_problem("basic", 10.0), 4)
        self.assertEqual(result.steps, 4)
        self.assertEqual([r.value for r in result.rungs], [4.0, 5.0, 6.0, 7.0, 8.0])
        self.assertEqual([f.value for f in result.floors], [4.0, 8.0, 8.0, 8.0, 8.0])
        self.assertTrue(result.floors_respect_ladder())
        self.assertTrue(result.final_floor_equals_rung())
        self.assertAlmostEqual(result.phi.coefficient(0, 4)[0], -0.25, places=14)
        self.assertAlmostEqual(result.residuals[1].coefficient(0, 8)[0], 1.0 / 16.0, places=14)
        self.assertEqual(result.branches[0], {0: BRANCH_INF})
        self.assertEqual(result.resonant_terms(), [])

    def test_zero_forcing(self):
        result = phg_iterate(scenario_problem("zero", 10.0), 4)
        self.assertTrue(result.phi.is_zero)
        self.assertEqual(result.floors, [None] * 5)
        self.assertTrue(result.floors_respect_ladder())
        self.assertFalse(result.final_floor_equals_rung())

    def test_resonant_scenario(self):
        result = phg_iterate(scenario_problem("resonant", 10.0), 4)
        self.assertEqual(result.branches[0], {1: BRANCH_ZERO})
        self.assertAlmostEqual(result.phi.coefficient(1, 4)[1], 0.2, places=14)
        self.assertAlmostEqual(result.phi.coefficient(0, 4)[1], 1.0 / 25.0 - 2.0, places=12)
        self.assertEqual([f.value for f in result.floors], [4.0, 8.0, 8.0, 8.0, 8.0])
        terms = result.resonant_terms()
        self.assertEqual(len(terms), 1)
        self.assertEqual(terms[0]["sigma"], 1)
        self.assertEqual(terms[0]["tau_value"], 4.0)

    def test_result_export(self):
        payload = phg_iterate(scenario_problem("basic", 10.0), 2).to_dict()
        self.assertEqual(len(payload["rungs"]), 3)
        self.assertEqual(payload["floors"][0]["expr"], "4")
        self.assertEqual(payload["problem"]["name"], "basic")


class TestOdeOracles(unittest.TestCase):
    def test_linear_boundary_value_problem(self):
        problem = ModelProblem(
            RadialOperator.build(3, [0]),
            (0.0,),
            mono(1.0, 4),
            (ExactWeight(1), ExactWeight(3)),
        )

        def exact(s):
            return -np.exp(-4.0 * s) / 4.0

        solution = ode_reference_solve(problem, 1.0, 6.0, [exact(1.0)], [exact(6.0)], nodes=201)
        s = np.linspace(1.0, 6.0, 11)
        np.testing.assert_allclose(solution(s)[0], exact(s), atol=1e-7)

    def test_remainder_slope(self):
        problem = scenario_problem("basic", 10.0)
        fit = remainder_reference_solve(problem, phg_iterate(problem, 4))
        self.assertEqual(fit.expected_slope, -8.0)
        self.assertTrue(fit.passed())
        self.assertLess(fit.relative_error, 0.05)

    def test_remainder_of_an_exact_solution(self):
        problem = scenario_problem("zero", 10.0)
        fit = remainder_reference_solve(problem, phg_iterate(problem, 2))
        self.assertIsNone(fit.slope)
        self.assertTrue(fit.passed())


def test_model_problem_validation():
    op = RadialOperator.build(3, [0])
    with pytest.raises(ValueError):
        ModelProblem(op, (1.0,), mono(1.0, 2), (ExactWeight(1),))
    with pytest.raises(ValueError):
        ModelProblem(op, (1.0, 1.0), mono(1.0, 4), (ExactWeight(1),))
    with pytest.raises(ValueError):
        ModelProblem(op, (1.0,), mono(1.0, 4), ())
