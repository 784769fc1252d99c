"""
Numeric differential geometry on a MetricModel.

Conventions:
    christoffel[k, i, j] = Gamma^k_{ij}
    riemann[i, j, k, l] = R(d_i, d_j, d_k, d_l) = g(R(d_i, d_j) d_k, d_l)
        with R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]
    sectional K(X, Y) = R(X, Y, Y, X) / (|X|^2 |Y|^2 - <X, Y>^2)
    ricci[j, k] = trace(X -> R(X, d_j) d_k)
    Delta f = -g^{ij}(d_ij f - Gamma^k_ij d_k f)   (nonnegative Laplacian)

With these conventions the upper half-plane has K = -1, Ric = -(n-1) g and
Delta log x_1 = 1.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .constants import (
    CONDITION_LIMIT,
    DEGENERATE_PLANE,
    FD_STEP,
    FD_STEP_SECOND,
    RICHARDSON_FACTOR,
)
from .exceptions import (
    DegeneratePlaneError,
    DomainError,
    IllConditionedMetricError,
    UnsupportedChartError,
)
from .hyperbolic import ChartMap, ChartPoint, MetricModel, bisector_frame

logger = logging.getLogger(__name__)

if not logger.handlers:
    logger.addHandler(logging.NullHandler())

ScalarField = Callable[[ChartPoint], float]


def richardson_derivative(
    fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, axis: int, step: float
) -> np.ndarray:
    """Central difference along one axis with one Richardson level."""
    h = step * max(1.0, abs(float(x[axis])))

    def central(width: float) -> np.ndarray:
        shift = np.zeros_like(x)
        shift[axis] = width
        return (np.asarray(fun(x + shift)) - np.asarray(fun(x - shift))) / (2.0 * width)

    coarse = central(h)
    fine = central(h / RICHARDSON_FACTOR)
    ratio = RICHARDSON_FACTOR**2
    return (ratio * fine - coarse) / (ratio - 1.0)


def gradient_coords(
    fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Stack of partial derivatives, first index the differentiation axis."""
    return np.stack([richardson_derivative(fun, x, k, step) for k in range(x.size)])


def hessian_coords(
    fun: Callable[[np.ndarray], float], x: np.ndarray, step: float = FD_STEP_SECOND
) -> np.ndarray:
    """Second partials of a scalar function, Richardson-extrapolated."""
    size = x.size
    scales = np.array([step * max(1.0, abs(float(v))) for v in x])

    def stencil(widths: np.ndarray) -> np.ndarray:
        hess = np.zeros((size, size))
        f0 = fun(x)
        for i in range(size):
            ei = np.zeros(size)
            ei[i] = widths[i]
            hess[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / widths[i] ** 2
            for j in range(i + 1, size):
                ej = np.zeros(size)
                ej[j] = widths[j]
                value = (
                    fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
                ) / (4.0 * widths[i] * widths[j])
                hess[i, j] = hess[j, i] = value
        return hess

    coarse = stencil(scales)
    fine = stencil(scales / RICHARDSON_FACTOR)
    ratio = RICHARDSON_FACTOR**2
    return (ratio * fine - coarse) / (ratio - 1.0)


def inverse_metric(g: np.ndarray) -> np.ndarray:
    """Inverse of a metric matrix; refuses ill-conditioned input."""
    condition = float(np.linalg.cond(g))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise IllConditionedMetricError(condition)
    inv = np.linalg.inv(g)
    return 0.5 * (inv + inv.T)


def metric_derivatives(model: MetricModel, x: np.ndarray) -> np.ndarray:
    """dg[k, i, j] = d_k g_ij; analytic when the model provides it."""
    if model.derivative is not None:
        return np.asarray(model.derivative(x))
    return gradient_coords(model.evaluate, x, FD_STEP)


def _christoffel_coords(model: MetricModel, x: np.ndarray) -> np.ndarray:
    g = model.evaluate(x)
    ginv = inverse_metric(g)
    dg = metric_derivatives(model, x)
    # lowered[l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
    lowered = np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    return 0.5 * np.einsum("kl,lij->kij", ginv, lowered)


def christoffel(model: MetricModel, p: ChartPoint) -> np.ndarray:
    """Gamma^k_{ij} of the Levi-Civita connection at p."""
    model.check_point(p)
    return _christoffel_coords(model, np.array(p.coords))


@dataclass(frozen=True, eq=False)
class CurvatureAtPoint:
    """Connection and curvature tensors at one point."""

    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float

    def symmetry_defect(self) -> float:
        """Largest violation of the Riemann symmetries and first Bianchi identity."""
        r = self.riemann
        scale = max(1.0, float(np.max(np.abs(r))))
        defects = [
            np.max(np.abs(r + np.transpose(r, (1, 0, 2, 3)))),
            np.max(np.abs(r + np.transpose(r, (0, 1, 3, 2)))),
            np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1)))),
            np.max(
                np.abs(r + np.transpose(r, (1, 2, 0, 3)) + np.transpose(r, (2, 0, 1, 3)))
            ),
        ]
        return float(max(defects) / scale)

    def einstein_constant(self) -> float:
        """c with Ric = c g, measured as trace(g^{-1} Ric) / dim."""
        return float(np.trace(self.inverse @ self.ricci) / self.metric.shape[0])

    def einstein_defect(self) -> float:
        """max |Ric - c g| relative to max |g|."""
        c = self.einstein_constant()
        return float(
            np.max(np.abs(self.ricci - c * self.metric)) / max(1.0, np.max(np.abs(self.metric)))
        )


def curvature(model: MetricModel, p: ChartPoint) -> CurvatureAtPoint:
    """Christoffel symbols, Riemann, Ricci and scalar curvature at p."""
    model.check_point(p)
    x = np.array(p.coords)
    g = model.evaluate(x)
    ginv = inverse_metric(g)
    gamma = _christoffel_coords(model, x)
    # d_gamma[c, a, d, b] = d_c Gamma^a_{db}
    d_gamma = gradient_coords(lambda y: _christoffel_coords(model, y), x, FD_STEP_SECOND)
    # up[a, b, c, d] = R^a_{bcd}, R(d_c, d_d) d_b = R^a_{bcd} d_a
    up = (
        np.einsum("cadb->abcd", d_gamma)
        - np.einsum("dacb->abcd", d_gamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )
    riemann = np.einsum("la,akij->ijkl", g, up)
    ricci = np.einsum("akaj->jk", up)
    ricci = 0.5 * (ricci + ricci.T)
    scalar = float(np.einsum("jk,jk->", ginv, ricci))
    return CurvatureAtPoint(g, ginv, gamma, riemann, ricci, scalar)


def sectional_curvature(
    model: MetricModel,
    p: ChartPoint,
    X: np.ndarray,
    Y: np.ndarray,
    at_point: Optional[CurvatureAtPoint] = None,
) -> float:
    """K(X, Y); pass ``at_point`` to reuse a curvature evaluation across planes."""
    curv = at_point if at_point is not None else curvature(model, p)
    g = curv.metric
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    xx, yy, xy = X @ g @ X, Y @ g @ Y, X @ g @ Y
    denom = float(xx * yy - xy**2)
    if denom < DEGENERATE_PLANE * max(1.0, float(xx * yy)):
        raise DegeneratePlaneError(f"plane spanned by X, Y is degenerate (|X^Y|^2={denom:.3e})")
    numer = float(np.einsum("ijkl,i,j,k,l->", curv.riemann, X, Y, Y, X))
    return numer / denom


def _lift_field(scalar_field: ScalarField, p: ChartPoint) -> Callable[[np.ndarray], float]:
    def at(x: np.ndarray) -> float:
        return float(scalar_field(p.with_coords(x)))

    return at


def differential(scalar_field: ScalarField, p: ChartPoint) -> np.ndarray:
    """df at p in coordinate components."""
    return gradient_coords(_lift_field(scalar_field, p), np.array(p.coords), FD_STEP)


def inner_product_of_differentials(
    model: MetricModel, p: ChartPoint, first: ScalarField, second: ScalarField
) -> float:
    """<df, dh>_g = g^{ij} d_i f d_j h."""
    model.check_point(p)
    ginv = inverse_metric(model(p))
    return float(differential(first, p) @ ginv @ differential(second, p))


def laplace_beltrami(model: MetricModel, scalar_field: ScalarField, p: ChartPoint) -> float:
    """Nonnegative Laplacian Delta f = -g^{ij}(d_ij f - Gamma^k_ij d_k f)."""
    model.check_point(p)
    x = np.array(p.coords)
    ginv = inverse_metric(model.evaluate(x))
    gamma = _christoffel_coords(model, x)
    lifted = _lift_field(scalar_field, p)
    hess = hessian_coords(lifted, x)
    grad = gradient_coords(lifted, x, FD_STEP)
    covariant_hessian = hess - np.einsum("kij,k->ij", gamma, grad)
    return float(-np.einsum("ij,ij->", ginv, covariant_hessian))


@dataclass(frozen=True, eq=False)
class FoliationData:
    """Second fundamental form of the level sets of the slice axis."""

    slice_metric: np.ndarray
    second_fundamental_form: np.ndarray
    shape_operator: np.ndarray
    mean_curvature: float


def second_fundamental_form(model: MetricModel, p: ChartPoint) -> FoliationData:
    """II = -1/2 d_s g_s for a chart written as ds^2 + g_s."""
    model.check_point(p)
    if model.slice_axis != 0:
        raise UnsupportedChartError(f"{model.chart.value} exposes no ds^2 + g_s splitting")
    x = np.array(p.coords)
    g = model.evaluate(x)
    if abs(g[0, 0] - 1.0) > 1e-10 or np.max(np.abs(g[0, 1:])) > 1e-10:
        raise UnsupportedChartError("metric is not of the form ds^2 + g_s at this point")
    g_s = g[1:, 1:]
    dg = metric_derivatives(model, x)
    form = -0.5 * dg[0][1:, 1:]
    form = 0.5 * (form + form.T)
    inverse_metric(g_s)
    shape = np.linalg.solve(g_s, form)
    return FoliationData(g_s, form, shape, float(np.trace(shape)))


def mean_curvature(model: MetricModel, p: ChartPoint) -> float:
    """H = trace(g_s^{-1} II)."""
    return second_fundamental_form(model, p).mean_curvature


def equidistant_frame_block(model: MetricModel, p: ChartPoint) -> np.ndarray:
    """II on the orthonormal pair (e2, e1) dual to (omega2, omega1) at a bisector point."""
    foliation = second_fundamental_form(model, p)
    frame = bisector_frame(p)
    basis = np.stack([frame.e2[1:], frame.e1[1:]], axis=1)
    return basis.T @ foliation.second_fundamental_form @ basis


def rho_direction_eigenvalue(model: MetricModel, p: ChartPoint) -> float:
    """Rayleigh quotient of the shape operator on d/drho."""
    foliation = second_fundamental_form(model, p)
    vec = np.zeros(p.dimension - 1)
    vec[1] = 1.0
    numer = vec @ foliation.second_fundamental_form @ vec
    return float(numer / (vec @ foliation.slice_metric @ vec))


@dataclass
class PullbackReport:
    """Outcome of a pullback comparison over sample points."""

    map_name: str
    max_deviation: float = 0.0
    max_relative_deviation: float = 0.0
    checked: int = 0
    skipped: List[str] = field(default_factory=list)
    analytic_jacobian: bool = False


def map_jacobian(chart_map: ChartMap, p: ChartPoint) -> np.ndarray:
    """Jacobian of a chart map at p; analytic when registered."""
    x = np.array(p.coords)
    if chart_map.jacobian_coords is not None:
        return np.asarray(chart_map.jacobian_coords(x, p.parameter))
    columns = gradient_coords(lambda y: chart_map.apply_coords(y, p.parameter), x, FD_STEP)
    return columns.T


def pullback_check(
    chart_map: ChartMap,
    source: MetricModel,
    target: MetricModel,
    points: List[ChartPoint],
) -> PullbackReport:
    """
    max over points of the entrywise |J^T g_target(Phi(p)) J - g_source(p)|.

    The same deviation divided by max(1, max |g_source(p)|) is reported as
    max_relative_deviation.

    Points outside either domain are skipped and listed in the report.
    """
    report = PullbackReport(chart_map.name, analytic_jacobian=chart_map.jacobian_coords is not None)
    for p in points:
        try:
            image = chart_map(p)
            jac = map_jacobian(chart_map, p)
            pulled = jac.T @ target(image) @ jac
            expected = source(p)
            deviation = float(np.max(np.abs(pulled - expected)))
            scale = max(1.0, float(np.max(np.abs(expected))))
        except DomainError as exc:
            report.skipped.append(f"{p.coords.tolist()}: {exc}")
            continue
        report.max_deviation = max(report.max_deviation, deviation)
        report.max_relative_deviation = max(report.max_relative_deviation, deviation / scale)
        report.checked += 1
    if report.skipped:
        logger.warning(f"{chart_map.name}: skipped {len(report.skipped)} points outside the domain")
    logger.debug(
        f"{chart_map.name}: {report.checked} points, max deviation {report.max_deviation:.3e}"
        f" (relative {report.max_relative_deviation:.3e})"
    )
    return report
