"""
Unit tests for edge cases in parsing, validation and exact arithmetic.
"""

import math
import sys
import unittest
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from cli.config import build_config, load_config, parse_ini
from hyperphg.exact import HALF, ExactWeight
from hyperphg.exceptions import ConfigError, DomainError, ExactArithmeticError
from hyperphg.hyperbolic import ChartKind, ChartPoint, bisector_point
from hyperphg.models import GeometryKind, WeightSpec
from hyperphg.presets import get_scenario, get_spectrum, parse_forcing


class TestExactWeightEdgeCases(unittest.TestCase):
    """Test parsing and arithmetic limits of exact weights."""

    def test_float_input_is_exact(self):
        """Test that 0.5 parses to exactly one half."""
        self.assertEqual(ExactWeight(0.5), HALF)
        self.assertEqual(ExactWeight(Fraction(3, 4)).as_fraction(), Fraction(3, 4))

    def test_radical_canonical_form(self):
        """Test that equivalent radical expressions compare equal."""
        self.assertEqual(ExactWeight("sqrt(12)/2"), ExactWeight("sqrt(3)"))
        self.assertEqual(hash(ExactWeight("sqrt(12)/2")), hash(ExactWeight("sqrt(3)")))
        self.assertNotEqual(ExactWeight("sqrt(3)"), ExactWeight(1.7320508075688772))

    def test_ordering_of_close_values(self):
        """Test ordering between a radical and its decimal truncation."""
        self.assertLess(ExactWeight("1.7320508"), ExactWeight("sqrt(3)"))
        self.assertTrue(ExactWeight("sqrt(3)") <= ExactWeight("3**(1/2)"))

    def test_non_weight_expressions(self):
        """Test rejection of expressions outside the weight module."""
        for text in ["pi", "log(2)", "2**(1/3)", "sqrt(-1)", "x + 1"]:
            with self.assertRaises(ExactArithmeticError, msg=text):
                ExactWeight(text)

    def test_non_finite_and_boolean(self):
        """Test rejection of nan, inf and booleans."""
        with self.assertRaises(ExactArithmeticError):
            ExactWeight(math.nan)
        with self.assertRaises(ExactArithmeticError):
            ExactWeight(math.inf)
        with self.assertRaises(ExactArithmeticError):
            ExactWeight(True)

    def test_radical_products(self):
        """Test that products of two radicals are refused."""
        with self.assertRaises(ExactArithmeticError):
            ExactWeight("sqrt(2)") * ExactWeight("sqrt(3)")
        self.assertEqual(ExactWeight("sqrt(2)") * 2, ExactWeight("sqrt(8)"))

    def test_irrational_fraction(self):
        """Test as_fraction on an irrational weight."""
        with self.assertRaises(ExactArithmeticError):
            ExactWeight("sqrt(2)").as_fraction()

    def test_to_dict(self):
        """Test the report form of a weight."""
        self.assertEqual(ExactWeight("1/2").to_dict(), {"expr": "1/2", "value": 0.5})


class TestConfigEdgeCases(unittest.TestCase):
    """Test edge cases in run-file parsing and validation."""

    def test_syntax_error_names_the_line(self):
        """Test that a malformed line is reported with its number."""
        with self.assertRaises(ConfigError) as ctx:
            parse_ini("[run]\nseed = 3\nthis line is broken\n")
        self.assertTrue(any(p.startswith("line 3") for p in ctx.exception.problems))

    def test_missing_section_header(self):
        """Test a file that starts without a section."""
        with self.assertRaises(ConfigError) as ctx:
            parse_ini("seed = 3\n")
        self.assertIn("line 1", ctx.exception.problems[0])

    def test_duplicate_option(self):
        """Test a repeated key inside one section."""
        with self.assertRaises(ConfigError):
            parse_ini("[run]\nseed = 1\nseed = 2\n")

    def test_unknown_section_and_key(self):
        """Test that unknown sections and keys are named."""
        with self.assertRaises(ConfigError) as ctx:
            build_config({"run": {"sed": "3"}, "extra": {"a": "1"}})
        problems = " ".join(ctx.exception.problems)
        self.assertIn("run.sed", problems)
        self.assertIn("extra", problems)

    def test_complex_dimension_one(self):
        """Test that m = 1 is rejected."""
        with self.assertRaises(ConfigError) as ctx:
            build_config({"model": {"geometry": "complex", "dimension": "1"}})
        self.assertTrue(any(p.startswith("model.dimension") for p in ctx.exception.problems))

    def test_exact_strings_in_weights(self):
        """Test exact weight strings in the [weights] section."""
        config = build_config({"weights": {"delta1": "3/2", "delta2": "sqrt(2)/2"}})
        self.assertEqual(config.weights.delta1, 1.5)
        self.assertAlmostEqual(config.weights.delta2, math.sqrt(2) / 2, places=14)

    def test_comma_lists(self):
        """Test comma-separated list fields."""
        config = build_config({"phg": {"eigenvalues": "0, 4", "quadratic": "1,1"}})
        self.assertEqual(config.phg.eigenvalues, ["0", "4"])
        self.assertEqual(config.phg.quadratic, [1.0, 1.0])

    def test_missing_file(self):
        """Test a run file that does not exist."""
        with self.assertRaises(ConfigError):
            load_config("/nonexistent/run.ini")

    def test_seed_override(self):
        """Test that --seed wins over defaults."""
        self.assertEqual(load_config(None, seed=17).run.seed, 17)


class TestDomainEdgeCases(unittest.TestCase):
    """Test edge cases at the boundary of the charts and weight ranges."""

    def test_non_finite_coordinates(self):
        """Test rejection of nan coordinates."""
        with self.assertRaises(DomainError):
            ChartPoint(ChartKind.UPPER_HALF_REAL, 2, [np.nan, 0.0])

    def test_bisector_axis(self):
        """Test that rho = 0 is outside the bisector chart."""
        with self.assertRaises(DomainError):
            bisector_point(0.0, 0.0, 0.0, np.array([1.0, 0.0]))

    def test_weight_range_endpoints(self):
        """Test the open and closed ends of the admissible ranges."""
        real = WeightSpec(kind=GeometryKind.REAL, dimension=3, delta1=1.0, delta2=1.0)
        self.assertIsNone(real.violated_inequality())
        self.assertIsNotNone(real.model_copy(update={"delta1": 0.0}).violated_inequality())
        plane = WeightSpec(kind=GeometryKind.COMPLEX, dimension=2, delta1=1.0, delta2=1.25)
        self.assertIsNone(plane.violated_inequality())
        three = WeightSpec(kind=GeometryKind.COMPLEX, dimension=3, delta1=1.0, delta2=2.5)
        self.assertIsNone(three.violated_inequality())


class TestPresetEdgeCases(unittest.TestCase):
    """Test edge cases in named presets and forcing strings."""

    def test_unknown_names(self):
        """Test lookups of names that are not shipped."""
        with self.assertRaises(ValueError):
            get_scenario("missing")
        with self.assertRaises(ValueError):
            get_spectrum("missing", 2)

    def test_malformed_forcing(self):
        """Test forcing strings with the wrong shape or mode."""
        with self.assertRaises(ValueError):
            parse_forcing(["0:1:4"], 1)
        with self.assertRaises(ValueError):
            parse_forcing(["2:1:0:4"], 2)

    def test_forcing_with_radical_weight(self):
        """Test a forcing term at an irrational weight."""
        series = parse_forcing(["0:2:1:1+sqrt(3)"], 1)
        self.assertEqual(series.floor, ExactWeight("1 + sqrt(3)"))
        self.assertEqual(series.coefficient(1, "1+sqrt(3)")[0], 2.0)


if __name__ == "__main__":
    unittest.main()
