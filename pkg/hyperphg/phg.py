"""
Radial model problems and their polyhomogeneous solutions.

The indicial operator I = -d^2 - H d + lambda acts modewise on PolySeries.
G_inf and G_0 are explicit right inverses of d^2 + H d - lambda = -I, with
the second integral taken from infinity or from s0. phg_iterate builds the
approximate solutions phi_k of I(phi) + q(phi) = f rung by rung along the
exponent ladder; the ODE oracles check the result independently.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy.integrate import quad, solve_bvp, solve_ivp

from .constants import (
    BVP_MAX_NODES,
    BVP_TOL,
    DEFAULT_S0,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_TAIL_BOUND,
    REMAINDER_RIGHT_END,
    SLOPE_REL_TOL,
    SLOPE_SAMPLES,
    SLOPE_WINDOW,
)
from .exact import ExactLike, ExactWeight, as_weight
from .exceptions import (
    NonConvergenceError,
    OutOfRangeError,
    QuadratureError,
    ResonanceBookkeepingError,
    ResonanceDomainError,
)
from .indicial import critical_pair, ladder
from .series import PolySeries, PolyTerm

logger = logging.getLogger(__name__)

if not logger.handlers:
    logger.addHandler(logging.NullHandler())

BRANCH_INF = "inf"
BRANCH_ZERO = "zero"


@dataclass(frozen=True)
class RadialOperator:
    """-d^2 - H d + lambda_i on each eigenmode, with G_0 endpoint s0."""

    hessian: ExactWeight
    eigenvalues: Tuple[ExactWeight, ...]
    s0: float = DEFAULT_S0
    pairs: Tuple[Tuple[ExactWeight, ExactWeight], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "hessian", as_weight(self.hessian))
        object.__setattr__(self, "eigenvalues", tuple(as_weight(v) for v in self.eigenvalues))
        if not self.eigenvalues:
            raise ValueError("radial operator needs at least one mode")
        if self.s0 <= 0:
            raise ValueError(f"G_0 endpoint s0 must be positive, got {self.s0}")
        pairs = tuple(critical_pair(v, self.hessian) for v in self.eigenvalues)
        for index, (lo, hi) in enumerate(pairs):
            if not hi > lo:
                raise ValueError(f"mode {index} has a double indicial root {hi}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def build(
        cls, hessian: ExactLike, eigenvalues: Sequence[ExactLike], s0: float = DEFAULT_S0
    ) -> "RadialOperator":
        return cls(as_weight(hessian), tuple(as_weight(v) for v in eigenvalues), s0)

    @property
    def modes(self) -> int:
        return len(self.eigenvalues)

    def alpha_minus(self, mode: int) -> ExactWeight:
        return self.pairs[mode][0]

    def alpha_plus(self, mode: int) -> ExactWeight:
        return self.pairs[mode][1]

    def gap(self, mode: int) -> ExactWeight:
        lo, hi = self.pairs[mode]
        return hi - lo

    @property
    def mu_plus(self) -> ExactWeight:
        return min(pair[1] for pair in self.pairs)

    def branch(self, mode: int, weight: ExactLike) -> str:
        """G_inf above alpha_+, G_0 on ]alpha_-, alpha_+]."""
        w = as_weight(weight)
        if w > self.alpha_plus(mode):
            return BRANCH_INF
        if w > self.alpha_minus(mode):
            return BRANCH_ZERO
        raise OutOfRangeError(
            f"weight {w} is at or below alpha_- = {self.alpha_minus(mode)} of mode {mode}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hessian": self.hessian.to_dict(),
            "eigenvalues": [v.to_dict() for v in self.eigenvalues],
            "alpha_minus": [lo.to_dict() for lo, _ in self.pairs],
            "alpha_plus": [hi.to_dict() for _, hi in self.pairs],
            "s0": self.s0,
        }


# Indicial action


@lru_cache(maxsize=None)
def _symbol(tau: sp.Expr, hessian: sp.Expr, eigenvalue: sp.Expr) -> float:
    # Exact, so indicial roots give exactly 0.
    return float(sp.expand(-(tau**2) + hessian * tau + eigenvalue))


@lru_cache(maxsize=None)
def _drift(tau: sp.Expr, hessian: sp.Expr) -> float:
    return float(sp.expand(2 * tau - hessian))


def _check_modes(op: RadialOperator, u: PolySeries) -> None:
    if u.modes != op.modes:
        raise ValueError(f"series has {u.modes} modes, operator has {op.modes}")


def apply_indicial(op: RadialOperator, u: PolySeries) -> PolySeries:
    """
    I(s^sigma e^{-tau s}) = (-tau^2 + H tau + lambda) s^sigma e^{-tau s}
    + sigma (2 tau - H) s^{sigma-1} e^{-tau s} - sigma (sigma-1) s^{sigma-2} e^{-tau s}.
    """
    _check_modes(op, u)
    big_h = op.hessian.expr
    terms = []
    for t in u.terms:
        symbol = np.array([_symbol(t.tau.expr, big_h, lam.expr) for lam in op.eigenvalues])
        terms.append(PolyTerm(t.sigma, t.tau, symbol * t.coeff))
        if t.sigma >= 1:
            drift = t.sigma * _drift(t.tau.expr, big_h)
            terms.append(PolyTerm(t.sigma - 1, t.tau, drift * t.coeff))
        if t.sigma >= 2:
            terms.append(PolyTerm(t.sigma - 2, t.tau, -t.sigma * (t.sigma - 1) * t.coeff))
    return PolySeries(terms, u.modes)


def apply_model_operator(op: RadialOperator, u: PolySeries) -> PolySeries:
    """(d^2 + H d - lambda) u = -I(u)."""
    return -apply_indicial(op, u)


# Integral operators


def _primitive(sigma: int, kappa: float) -> List[Tuple[int, float]]:
    """(power, coeff) of P with (P e^{kappa s})' = s^sigma e^{kappa s}, kappa != 0."""
    out = []
    falling = 1.0
    for j in range(sigma + 1):
        out.append((sigma - j, (-1) ** j * falling / kappa ** (j + 1)))
        falling *= sigma - j
    return out


def _unit(modes: int, mode: int, value: float) -> np.ndarray:
    vector = np.zeros(modes)
    vector[mode] = value
    return vector


def _decaying_part(
    op: RadialOperator, term: PolyTerm, mode: int, sign: float, root: ExactWeight
) -> List[PolyTerm]:
    """sign / gap * P(s) e^{-tau s} with kappa = root - tau."""
    kappa = (root - term.tau).value
    scale = sign * term.coeff[mode] / op.gap(mode).value
    return [
        PolyTerm(power, term.tau, _unit(op.modes, mode, scale * coeff))
        for power, coeff in _primitive(term.sigma, kappa)
    ]


def _apply_branch(
    op: RadialOperator, term: PolyTerm, mode: int, branch: str
) -> Tuple[List[PolyTerm], List[PolyTerm]]:
    lo, hi = op.alpha_minus(mode), op.alpha_plus(mode)
    main = _decaying_part(op, term, mode, 1.0, lo)
    kernel: List[PolyTerm] = []
    if branch == BRANCH_INF:
        main += _decaying_part(op, term, mode, -1.0, hi)
        return main, kernel

    gap = op.gap(mode).value
    c = term.coeff[mode]
    sigma = term.sigma
    if term.tau == hi:
        # Resonance: the second integral of s^sigma from s0 raises the power.
        main.append(PolyTerm(sigma + 1, hi, _unit(op.modes, mode, -c / (gap * (sigma + 1)))))
        endpoint = c * op.s0 ** (sigma + 1) / (gap * (sigma + 1))
        main.append(PolyTerm(0, hi, _unit(op.modes, mode, endpoint)))
        return main, kernel

    kappa = (hi - term.tau).value
    primitive = _primitive(sigma, kappa)
    main += _decaying_part(op, term, mode, -1.0, hi)
    at_s0 = sum(coeff * op.s0**power for power, coeff in primitive) * np.exp(kappa * op.s0)
    kernel.append(PolyTerm(0, hi, _unit(op.modes, mode, c * at_s0 / gap)))
    return main, kernel


def _apply_G(op: RadialOperator, u: PolySeries, branch: str) -> Tuple[PolySeries, PolySeries]:
    _check_modes(op, u)
    main: List[PolyTerm] = []
    kernel: List[PolyTerm] = []
    for term in u.terms:
        for mode in range(op.modes):
            if term.coeff[mode] == 0.0:
                continue
            lo, hi = op.alpha_minus(mode), op.alpha_plus(mode)
            if branch == BRANCH_INF and not term.tau > hi:
                raise ResonanceDomainError(
                    f"G_inf needs tau > alpha_+ = {hi} in mode {mode}, got tau = {term.tau}; "
                    f"use G_0"
                )
            if branch == BRANCH_ZERO and not (lo < term.tau <= hi):
                raise OutOfRangeError(
                    f"G_0 needs alpha_- < tau <= alpha_+ in mode {mode} "
                    f"(]{lo}, {hi}]), got tau = {term.tau}"
                )
            extra_main, extra_kernel = _apply_branch(op, term, mode, branch)
            main += extra_main
            kernel += extra_kernel
    return PolySeries(main, u.modes), PolySeries(kernel, u.modes)


def G_inf(op: RadialOperator, u: PolySeries) -> PolySeries:
    """
    Right inverse of d^2 + H d - lambda integrating from infinity.

    Raises:
        ResonanceDomainError: If a term has tau <= alpha_+ of its mode.
    """
    return _apply_G(op, u, BRANCH_INF)[0]


def G_0_split(op: RadialOperator, u: PolySeries) -> Tuple[PolySeries, PolySeries]:
    """G_0(u) as (terms at the input weights, s0 endpoint terms at alpha_+ != tau)."""
    return _apply_G(op, u, BRANCH_ZERO)


def G_0(op: RadialOperator, u: PolySeries) -> PolySeries:
    """
    Right inverse of d^2 + H d - lambda with the alpha_+ integral taken from s0.

    At tau = alpha_+ the result gains an s^{sigma+1} e^{-alpha_+ s} term.

    Raises:
        OutOfRangeError: If a term has tau outside ]alpha_-, alpha_+].
    """
    main, kernel = G_0_split(op, u)
    return main + kernel


def right_inverse_defect(op: RadialOperator, u: PolySeries, branch: str) -> float:
    """max |(d^2 + H d - lambda) G(u) - u| over coefficients."""
    image = G_inf(op, u) if branch == BRANCH_INF else G_0(op, u)
    return (apply_model_operator(op, image) - u).max_abs_coeff()


# Quadrature realization


def _tail_slope(grid: np.ndarray, values: np.ndarray) -> float:
    count = max(3, grid.size // 3)
    tail_s = grid[-count:]
    tail_v = np.abs(values[-count:])
    if np.any(tail_v == 0.0):
        return -np.inf
    return float(np.polyfit(tail_s, np.log(tail_v), 1)[0])


def G_quadrature(
    op: RadialOperator,
    f: Callable[[float], float],
    grid: Sequence[float],
    branch: str = BRANCH_INF,
    mode: int = 0,
) -> np.ndarray:
    """
    G(f) on a grid by adaptive quadrature with exponential tail truncation.

    Decay evidence is the log-slope of |f| fitted on the last third of the
    grid; the upper limit S_max makes the truncated tail below 1e-10.

    Raises:
        QuadratureError: If f does not decay faster than the branch requires.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.array([f(s) for s in grid], dtype=float)
    if not np.any(values):
        return np.zeros_like(grid)

    lo, hi = op.alpha_minus(mode).value, op.alpha_plus(mode).value
    gap = op.gap(mode).value
    required = hi if branch == BRANCH_INF else lo
    slope = _tail_slope(grid, values)
    rate = -slope
    if not rate > required:
        raise QuadratureError(slope, required)
    excess = rate - required if np.isfinite(rate) else 1.0
    s_max = float(grid.max() + np.log(1.0 / QUAD_TAIL_BOUND) / excess)

    def integral(fun: Callable[[float], float], a: float, b: float) -> float:
        return quad(fun, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)[0]

    out = np.empty_like(grid)
    for index, s in enumerate(grid):
        if branch == BRANCH_INF:
            out[index] = (
                integral(lambda t: (np.exp(hi * (t - s)) - np.exp(lo * (t - s))) * f(t), s, s_max)
                / gap
            )
        else:
            outer = integral(lambda t: np.exp(lo * (t - s)) * f(t), s, s_max)
            inner = integral(lambda t: np.exp(hi * (t - s)) * f(t), op.s0, s)
            out[index] = -(outer + inner) / gap
    logger.debug(
        f"G quadrature ({branch}) on {grid.size} nodes, tail slope {slope:.4g}, S_max {s_max:.4g}"
    )
    return out


def quadrature_residual(
    op: RadialOperator,
    values: np.ndarray,
    f_values: np.ndarray,
    grid: Sequence[float],
    mode: int = 0,
) -> float:
    """max |(d^2 + H d - lambda) y - f| on interior nodes, five-point stencils."""
    grid = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    h = float(grid[1] - grid[0])
    first = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * h)
    second = (-y[4:] + 16.0 * y[3:-1] - 30.0 * y[2:-2] + 16.0 * y[1:-3] - y[:-4]) / (
        12.0 * h * h
    )
    lam = op.eigenvalues[mode].value
    residual = second + op.hessian.value * first - lam * y[2:-2] - np.asarray(f_values)[2:-2]
    return float(np.max(np.abs(residual)))


# Model problems and the iteration


@dataclass(frozen=True, eq=False)
class ModelProblem:
    """I(phi) + q(phi) = f with q_i(phi) = c_i (sum_j phi_j)^2."""

    operator: RadialOperator
    quadratic: Tuple[float, ...]
    forcing: PolySeries
    generators: Tuple[ExactWeight, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "quadratic", tuple(float(c) for c in self.quadratic))
        object.__setattr__(self, "generators", tuple(as_weight(g) for g in self.generators))
        modes = self.operator.modes
        if len(self.quadratic) != modes:
            raise ValueError(f"{len(self.quadratic)} quadratic coefficients for {modes} modes")
        if self.forcing.modes != modes:
            raise ValueError(f"forcing has {self.forcing.modes} modes, operator has {modes}")
        if not self.generators:
            raise ValueError("model problem needs monoid generators")
        floor = self.forcing.floor
        if floor is not None and not floor > self.mu_plus:
            raise ValueError(f"forcing floor {floor} must exceed mu_+ = {self.mu_plus}")

    @property
    def modes(self) -> int:
        return self.operator.modes

    @property
    def mu_plus(self) -> ExactWeight:
        return self.operator.mu_plus

    def nonlinearity(self, phi: PolySeries) -> PolySeries:
        total = phi.mode_sum()
        return (total * total).broadcast(self.quadratic)

    def residual(self, phi: PolySeries) -> PolySeries:
        """F(phi) = I(phi) + q(phi) - f, merged in one pass."""
        parts = (
            apply_indicial(self.operator, phi).terms
            + self.nonlinearity(phi).terms
            + (-self.forcing).terms
        )
        return PolySeries(parts, self.modes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "operator": self.operator.to_dict(),
            "quadratic": list(self.quadratic),
            "forcing": self.forcing.to_records(),
            "generators": [g.to_dict() for g in self.generators],
        }


@dataclass
class PhgResult:
    """Corrections psi_0..psi_K, kernel terms, phi_K and the residual floors."""

    problem: ModelProblem
    psi: List[PolySeries]
    kernel: PolySeries
    phi: PolySeries
    residuals: List[PolySeries]
    ladder: List[ExactWeight]
    branches: List[Dict[int, str]] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.psi) - 1

    @property
    def rungs(self) -> List[ExactWeight]:
        """mu_+ + a_{k+1} for k = 0..K."""
        mu = self.problem.mu_plus
        return [mu + a for a in self.ladder[1:]]

    @property
    def floors(self) -> List[Optional[ExactWeight]]:
        return [r.floor for r in self.residuals]

    def floors_respect_ladder(self) -> bool:
        return all(f is None or f >= rung for f, rung in zip(self.floors, self.rungs))

    def final_floor_equals_rung(self) -> bool:
        return self.floors[-1] is not None and self.floors[-1] == self.rungs[-1]

    def resonant_terms(self) -> List[Dict[str, Any]]:
        """Terms s^sigma e^{-tau s} of phi with sigma > 0."""
        return [
            {"sigma": t.sigma, "tau_expr": str(t.tau), "tau_value": t.tau.value}
            for t in self.phi.terms
            if t.sigma > 0
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "problem": self.problem.to_dict(),
            "ladder": [a.to_dict() for a in self.ladder],
            "rungs": [r.to_dict() for r in self.rungs],
            "floors": [f.to_dict() if f is not None else None for f in self.floors],
            "psi": [p.to_records() for p in self.psi],
            "kernel": self.kernel.to_records(),
            "phi": self.phi.to_records(),
            "branches": [{str(k): v for k, v in b.items()} for b in self.branches],
            "resonant_terms": self.resonant_terms(),
        }


def correct_component(
    op: RadialOperator, component: PolySeries, weight: ExactWeight
) -> Tuple[PolySeries, PolySeries, Dict[int, str]]:
    """Apply G_inf or G_0 modewise to a single-weight component."""
    main = PolySeries.zero(op.modes)
    kernel = PolySeries.zero(op.modes)
    used: Dict[int, str] = {}
    for mode in range(op.modes):
        part = component.scale(_unit(op.modes, mode, 1.0))
        if part.is_zero:
            continue
        branch = op.branch(mode, weight)
        extra_main, extra_kernel = _apply_G(op, part, branch)
        main = main + extra_main
        kernel = kernel + extra_kernel
        used[mode] = branch
    return main, kernel, used


def phg_iterate(problem: ModelProblem, steps: int) -> PhgResult:
    """
    Approximate solutions phi_k = sum psi_j (+ kernel terms) with
    F(phi_k) of weight at least mu_+ + a_{k+1}.

    psi_{k+1} = G([F(phi_k)]_{mu_+ + a_{k+1}}) with G_inf or G_0 chosen per
    mode, which cancels the rung since I o G = -Id.

    Raises:
        ResonanceBookkeepingError: If a residual term sits below its rung.
        LadderExhaustedError: If the ladder cannot be extended to K+1 steps.
    """
    op = problem.operator
    mu = problem.mu_plus
    exponents = ladder(mu, problem.generators, steps + 1)
    rungs = [mu + a for a in exponents[1:]]

    phi = PolySeries.zero(problem.modes)
    kernel = PolySeries.zero(problem.modes)
    psi = [PolySeries.zero(problem.modes)]
    residuals: List[PolySeries] = []
    branches: List[Dict[int, str]] = []
    for k in range(steps + 1):
        residual = problem.residual(phi)
        residuals.append(residual)
        floor = residual.floor
        if floor is not None and floor < rungs[k]:
            raise ResonanceBookkeepingError(str(floor), k)
        logger.debug(f"step {k}: residual floor {floor}, rung {rungs[k]}")
        if k == steps:
            break
        component = residual.extract_component(rungs[k])
        correction, endpoint, used = correct_component(op, component, rungs[k])
        psi.append(correction)
        kernel = kernel + endpoint
        phi = phi + correction + endpoint
        branches.append(used)

    logger.info(
        f"{problem.name}: {steps} steps, final residual floor {residuals[-1].floor}, "
        f"rung {rungs[-1]}"
    )
    return PhgResult(problem, psi, kernel, phi, residuals, exponents, branches)


# ODE oracles


@dataclass
class OdeSolution:
    """Collocation solution of the full radial equation."""

    s: np.ndarray
    values: np.ndarray
    residual: float
    solution: Any = field(repr=False, default=None)

    def __call__(self, s: Any) -> np.ndarray:
        modes = self.values.shape[0]
        return self.solution.sol(np.asarray(s, dtype=float))[:modes]


def _radial_rhs(problem: ModelProblem) -> Callable[[Any, np.ndarray], np.ndarray]:
    modes = problem.modes
    big_h = problem.operator.hessian.value
    lam = np.array([v.value for v in problem.operator.eigenvalues])
    c = np.array(problem.quadratic)

    def fun(s: Any, y: np.ndarray) -> np.ndarray:
        phi, dphi = y[:modes], y[modes:]
        total = phi.sum(axis=0)
        forcing = problem.forcing.evaluate(s)
        second = (
            -big_h * dphi
            + lam.reshape((modes,) + (1,) * (phi.ndim - 1)) * phi
            + c.reshape((modes,) + (1,) * (phi.ndim - 1)) * total**2
            - forcing
        )
        return np.concatenate([dphi, second])

    return fun


def ode_reference_solve(
    problem: ModelProblem,
    s_left: float,
    s_right: float,
    left_values: Sequence[float],
    right_values: Optional[Sequence[float]] = None,
    nodes: int = 2001,
    guess: Optional[PolySeries] = None,
) -> OdeSolution:
    """
    Solve -phi'' - H phi' + lambda phi + q(phi) = f by collocation.

    Args:
        left_values: Dirichlet data phi(s_left), per mode.
        right_values: Dirichlet data phi(s_right); None imposes the decay
            condition phi' + alpha_+ phi = 0 at s_right.
        guess: Optional initial guess, e.g. phi_K.

    Raises:
        NonConvergenceError: If the collocation solver does not converge.
    """
    modes = problem.modes
    left = np.asarray(left_values, dtype=float)
    alpha = np.array([problem.operator.alpha_plus(i).value for i in range(modes)])
    right = None if right_values is None else np.asarray(right_values, dtype=float)

    def bc(ya: np.ndarray, yb: np.ndarray) -> np.ndarray:
        start = ya[:modes] - left
        if right is not None:
            end = yb[:modes] - right
        else:
            end = yb[modes:] + alpha * yb[:modes]
        return np.concatenate([start, end])

    grid = np.linspace(s_left, s_right, nodes)
    if guess is not None:
        y0 = np.concatenate([guess.evaluate(grid), guess.derivative().evaluate(grid)])
    else:
        y0 = np.zeros((2 * modes, grid.size))

    sol = solve_bvp(_radial_rhs(problem), bc, grid, y0, tol=BVP_TOL, max_nodes=BVP_MAX_NODES)
    residual = float(np.max(sol.rms_residuals)) if sol.rms_residuals.size else 0.0
    if sol.status != 0:
        raise NonConvergenceError(f"collocation failed: {sol.message}", residual)
    logger.debug(f"BVP on [{s_left}, {s_right}] converged, {sol.x.size} nodes")
    return OdeSolution(sol.x, sol.y[:modes], residual, sol)


@dataclass
class RemainderFit:
    """Decay rate of phi - phi_K measured on a window."""

    slope: Optional[float]
    intercept: Optional[float]
    expected_slope: float
    window: Tuple[float, float]
    samples: int
    s: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    remainder: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    @property
    def relative_error(self) -> float:
        if self.slope is None:
            return 0.0
        return abs(self.slope - self.expected_slope) / abs(self.expected_slope)

    def passed(self, tolerance: float = SLOPE_REL_TOL) -> bool:
        return self.slope is None or self.relative_error <= tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "expected_slope": self.expected_slope,
            "relative_error": self.relative_error,
            "window": list(self.window),
            "samples": self.samples,
        }


def remainder_reference_solve(
    problem: ModelProblem,
    result: PhgResult,
    s_right: float = REMAINDER_RIGHT_END,
    window: Tuple[float, float] = SLOPE_WINDOW,
    samples: int = SLOPE_SAMPLES,
) -> RemainderFit:
    """
    Integrate the equation for r = phi - phi_K backwards from s_right with
    zero data and fit the slope of log|r| on the window.

    r'' = -H r' + lambda r + c (2 Phi R + R^2) + F(phi_K), with Phi and R the
    mode sums of phi_K and r. The decaying particular solution dominates
    kernel contamination in the backward direction.
    """
    modes = problem.modes
    phi = result.phi
    forcing = result.residuals[-1]
    rungs = result.rungs
    expected = -rungs[-1].value
    if forcing.is_zero:
        return RemainderFit(None, None, expected, window, samples)

    big_h = problem.operator.hessian.value
    lam = np.array([v.value for v in problem.operator.eigenvalues])
    c = np.array(problem.quadratic)
    phi_sum = phi.mode_sum()

    def fun(s: float, y: np.ndarray) -> np.ndarray:
        r, dr = y[:modes], y[modes:]
        total_r = float(np.sum(r))
        big_phi = float(phi_sum.evaluate(s)[0]) if not phi_sum.is_zero else 0.0
        second = (
            -big_h * dr
            + lam * r
            + c * (2.0 * big_phi * total_r + total_r**2)
            + forcing.evaluate(s)
        )
        return np.concatenate([dr, second])

    s_eval = np.linspace(window[1], window[0], samples)
    sol = solve_ivp(
        fun,
        (s_right, window[0]),
        np.zeros(2 * modes),
        method="DOP853",
        t_eval=s_eval,
        rtol=1e-10,
        atol=1e-300,
    )
    if not sol.success:
        raise NonConvergenceError(f"remainder integration failed: {sol.message}")
    magnitude = np.max(np.abs(sol.y[:modes]), axis=0)
    if np.any(magnitude == 0.0):
        raise NonConvergenceError("remainder vanished on the fit window")
    slope, intercept = np.polyfit(sol.t, np.log(magnitude), 1)
    fit = RemainderFit(
        float(slope), float(intercept), expected, window, samples, sol.t, magnitude
    )
    logger.info(
        f"{problem.name}: remainder slope {fit.slope:.5g} vs expected {expected:.5g} "
        f"on {window}"
    )
    return fit
