"""
Named spectra and model problems.
Ships the complex Einstein spectrum and the radial scenarios used by phg-run.
"""

from typing import Any, Dict, List, Sequence

from .exact import as_weight
from .indicial import ModeSpectrum, einstein_complex_spectrum, spectrum_from_records
from .phg import ModelProblem, RadialOperator
from .series import PolySeries

# Spectra: eigenvalues of the zero-order part, H given per geometry.
SPECTRUM_PRESETS: Dict[str, Dict[str, Any]] = {
    "einstein_complex": {
        "description": "Gauged Einstein operator at complex hyperbolic space, H = m",
        "geometry": "complex",
    },
    "scalar": {
        "description": "Scalar Laplacian, single mode lambda = 0",
        "geometry": "any",
        "eigenvalues": [{"eigenvalue": "0", "multiplicity": 1, "label": "scalar"}],
    },
}

# Radial model problems I(phi) + c (sum phi)^2 = f.
# Forcing terms are "mode:coeff:sigma:tau" for coeff * s^sigma * e^{-tau s}.
PHG_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "basic": {
        "description": "H = 3, lambda = 0, q = phi^2, f = e^{-4s}",
        "hessian": "3",
        "eigenvalues": ["0"],
        "quadratic": [1.0],
        "forcing": ["0:1:0:4"],
        "generators": ["1", "3"],
        "steps": 4,
    },
    "zero": {
        "description": "Same operator with f = 0",
        "hessian": "3",
        "eigenvalues": ["0"],
        "quadratic": [1.0],
        "forcing": [],
        "generators": ["1", "3"],
        "steps": 4,
    },
    "resonant": {
        "description": "Two modes, alpha_+ = 3 and 4, forcing at the second mode's resonance",
        "hessian": "3",
        "eigenvalues": ["0", "4"],
        "quadratic": [1.0, 1.0],
        "forcing": ["1:1:0:4"],
        "generators": ["1", "3", "4"],
        "steps": 4,
    },
}


def get_spectrum(name: str, hessian_trace: int) -> ModeSpectrum:
    """Build a preset spectrum for the given mean-curvature limit (n-1 or m)."""
    if name not in SPECTRUM_PRESETS:
        raise ValueError(f"Spectrum '{name}' not found in presets")
    if name == "einstein_complex":
        return einstein_complex_spectrum(hessian_trace)
    return spectrum_from_records(SPECTRUM_PRESETS[name]["eigenvalues"], hessian_trace)


def get_scenario(name: str) -> Dict[str, Any]:
    """Get a copy of a model-problem scenario."""
    if name not in PHG_SCENARIOS:
        raise ValueError(f"Scenario '{name}' not found in presets")
    return {key: (list(v) if isinstance(v, list) else v) for key, v in PHG_SCENARIOS[name].items()}


def get_all_scenarios() -> List[str]:
    return sorted(PHG_SCENARIOS)


def parse_forcing(terms: Sequence[str], modes: int) -> PolySeries:
    """Parse "mode:coeff:sigma:tau" strings into a PolySeries."""
    series = PolySeries.zero(modes)
    for text in terms:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 4:
            raise ValueError(f"forcing term '{text}' is not mode:coeff:sigma:tau")
        mode, coeff, sigma = int(parts[0]), float(parts[1]), int(parts[2])
        if not 0 <= mode < modes:
            raise ValueError(f"forcing term '{text}' names mode {mode} of {modes}")
        series = series + PolySeries.monomial(coeff, as_weight(parts[3]), sigma, mode, modes)
    return series


def build_problem(
    hessian: str,
    eigenvalues: Sequence[str],
    quadratic: Sequence[float],
    forcing: Sequence[str],
    generators: Sequence[str],
    s0: float,
    name: str = "custom",
) -> ModelProblem:
    """Model problem from configuration strings."""
    operator = RadialOperator.build(hessian, list(eigenvalues), s0)
    return ModelProblem(
        operator=operator,
        quadratic=tuple(quadratic),
        forcing=parse_forcing(forcing, operator.modes),
        generators=tuple(as_weight(g) for g in generators),
        name=name,
    )


def scenario_problem(name: str, s0: float) -> ModelProblem:
    scenario = get_scenario(name)
    return build_problem(
        scenario["hessian"],
        scenario["eigenvalues"],
        scenario["quadratic"],
        scenario["forcing"],
        scenario["generators"],
        s0,
        name=name,
    )
