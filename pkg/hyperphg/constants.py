"""
Constants and numeric defaults for the hyperbolic toolkit.
Collects tolerances, finite-difference steps and sampling boxes in one place.
"""

from typing import Dict, Tuple

# Finite differences
FD_STEP: float = 1e-4  # first derivatives of metric components
FD_STEP_SECOND: float = 1e-3  # derivatives of Christoffel symbols and Hessians
RICHARDSON_FACTOR: float = 2.0  # step ratio for the single extrapolation level

# Linear algebra guards
CONDITION_LIMIT: float = 1e12  # metric inverse refused above this condition number
DEGENERATE_PLANE: float = 1e-12  # |X|^2|Y|^2 - <X,Y>^2 floor for sectional curvature
SYMMETRY_TOL: float = 1e-10

# Verification tolerances
PULLBACK_TOL_FD: float = 1e-6
PULLBACK_TOL_ANALYTIC: float = 1e-9
CURVATURE_TOL: float = 1e-6
FOLIATION_TOL: float = 1e-8
WEIGHT_TOL: float = 1e-5
LIMIT_TOL: float = 1e-4
SLOPE_REL_TOL: float = 0.05

# Weight scans
BOX_EPSILON: float = 1e-3  # open box [0, 1) approximated by [0, 1 - eps]
DEFAULT_RESOLUTION: float = 1e-3
TAU_AXIS_NODES: int = 11  # nodes on tanh^2(tau/2) in [0, 1] for the complex scan
LIMIT_FAR_S: float = 20.0

# Sampling boxes (regular domain of the charts)
RHO_RANGE: Tuple[float, float] = (0.1, 5.0)
S_RANGE: Tuple[float, float] = (-5.0, 5.0)
TAU_RANGE: Tuple[float, float] = (-2.0, 2.0)
SPHERE_COORD_BOUND: float = 2.0  # stereographic |x| bound, keeps away from the pole
ANGLE_RANGE: Tuple[float, float] = (-3.0, 3.0)
XI_RANGE: Tuple[float, float] = (0.3, 3.0)

# Box for the absolute pullback bound; Siegel entries grow like cosh^4 of s and rho
PULLBACK_BOX: Dict[str, Tuple[float, float]] = {
    "s": (-2.0, 2.0),
    "tau": (-1.0, 1.0),
    "rho": (0.3, 3.0),
    "angle": (-3.0, 3.0),
    "r": (-2.0, 2.0),
    "xi": (0.5, 2.0),
    "flat": (-1.0, 1.0),
}

# Series algebra
CANCELLATION_RTOL: float = 1e-12  # merged coefficient dropped below this relative size
EXACT_NUMERIC_DIGITS: int = 30

# Integral operators and ODE oracle
DEFAULT_S0: float = 10.0
QUAD_TAIL_BOUND: float = 1e-10
QUAD_EPSABS: float = 1e-14
QUAD_EPSREL: float = 1e-12
BVP_TOL: float = 1e-8
BVP_MAX_NODES: int = 100000
REMAINDER_RIGHT_END: float = 30.0
SLOPE_WINDOW: Tuple[float, float] = (5.0, 15.0)
SLOPE_SAMPLES: int = 101

# Reports
REPORT_SCHEMA_VERSION: int = 1
JSON_SIGNIFICANT_DIGITS: int = 12
DEFAULT_OUTPUT_DIR: str = "reports"
DEFAULT_MAX_WORKERS: int = 4

