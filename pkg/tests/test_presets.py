"""
Tests for shipped spectra and model-problem scenarios
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.exact import ExactWeight
from hyperphg.presets import (
    PHG_SCENARIOS,
    build_problem,
    get_all_scenarios,
    get_scenario,
    get_spectrum,
    parse_forcing,
    scenario_problem,
)


def test_all_scenarios_listed():
    assert get_all_scenarios() == ["basic", "resonant", "zero"]


def test_scenario_is_a_copy():
    scenario = get_scenario("basic")
    scenario["forcing"].append("0:1:0:5")
    assert PHG_SCENARIOS["basic"]["forcing"] == ["0:1:0:4"]


@pytest.mark.parametrize("m", [2, 3, 5])
def test_einstein_spectrum(m):
    spectrum = get_spectrum("einstein_complex", m)
    assert spectrum.hessian == ExactWeight(m)
    assert [mode.label for mode in spectrum.modes] == [
        "trace",
        "primitive",
        "hermitian_mixed",
        "anti_hermitian",
    ]


def test_scalar_spectrum():
    spectrum = get_spectrum("scalar", 3)
    assert spectrum.eigenvalues == [ExactWeight(0)]
    assert spectrum.hessian == ExactWeight(3)


def test_resonant_problem(basic_problem):
    problem = scenario_problem("resonant", 10.0)
    assert problem.modes == 2
    assert problem.mu_plus == ExactWeight(3)
    assert problem.operator.alpha_plus(1) == ExactWeight(4)
    assert basic_problem.mu_plus == ExactWeight(3)
    assert basic_problem.name == "basic"


def test_custom_problem():
    problem = build_problem("5/2", ["1"], [0.5], ["0:2:1:4"], ["1/2", "7/2"], 4.0)
    assert problem.name == "custom"
    assert problem.mu_plus == ExactWeight("5/4 + sqrt(41)/4")
    assert problem.forcing.coefficient(1, 4)[0] == 2.0


def test_forcing_terms_merge():
    series = parse_forcing(["0:1:0:4", "0:2:0:4", "1:-1:2:9/2"], 2)
    assert series.coefficient(0, 4).tolist() == [3.0, 0.0]
    assert series.coefficient(2, "9/2").tolist() == [0.0, -1.0]
