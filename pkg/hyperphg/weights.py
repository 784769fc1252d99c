"""
Double weights and the weighted maximum-principle functional.

w = cosh(s)^d1 cosh(rho)^d2 on real hyperbolic space (Fermi chart) and
w = cosh(s/2)^(2 d1) (cosh^2(rho/2) cosh(tau/2))^d2 on complex hyperbolic
space (bisector chart). The quantity -Delta log w - |d log w|^2 is evaluated
in closed form, numerically through the tensor engine, and certified
positive by a grid scan over the compact box of tanh^2 variables.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .constants import BOX_EPSILON, DEFAULT_RESOLUTION, LIMIT_FAR_S, TAU_AXIS_NODES
from .exceptions import UnsupportedShiftError, WeightRangeError
from .hyperbolic import ChartKind, ChartPoint, MetricModel, fermi_slice_cosh_distance, metric_model
from .indicial import dirichlet_interval
from .models import GeometryKind, ScanReport, ShiftedIntervalReport, WeightSpec
from .tensor import inner_product_of_differentials, laplace_beltrami

logger = logging.getLogger(__name__)

if not logger.handlers:
    logger.addHandler(logging.NullHandler())


def _log_cosh(x: float) -> float:
    return float(np.logaddexp(x, -x) - np.log(2.0))


def check_admissible(spec: WeightSpec) -> None:
    """Raise WeightRangeError naming the first violated hypothesis."""
    violated = spec.violated_inequality()
    if violated is not None:
        raise WeightRangeError(violated, f"delta1={spec.delta1}, delta2={spec.delta2}")


def weight_chart(spec: WeightSpec) -> ChartKind:
    return ChartKind.REAL_FERMI if spec.kind == GeometryKind.REAL else ChartKind.BISECTOR


def weight_model(spec: WeightSpec) -> MetricModel:
    """Exact metric in the chart the weight is written in."""
    return metric_model(weight_chart(spec), spec.dimension)


def _check_chart(spec: WeightSpec, p: ChartPoint) -> None:
    chart = weight_chart(spec)
    if p.chart != chart or p.parameter != spec.dimension:
        raise WeightRangeError(
            f"weight of kind {spec.kind.value} lives on {chart.value}({spec.dimension})",
            f"got {p.chart.value}({p.parameter})",
        )


def log_weight(spec: WeightSpec, p: ChartPoint) -> float:
    """log w at p."""
    _check_chart(spec, p)
    x = p.coords
    if spec.kind == GeometryKind.REAL:
        cosh_rho = fermi_slice_cosh_distance(x[1:])
        return spec.delta1 * _log_cosh(x[0]) + spec.delta2 * float(np.log(cosh_rho))
    s, tau, rho = x[0], x[1], x[2]
    return 2.0 * spec.delta1 * _log_cosh(s / 2.0) + spec.delta2 * (
        2.0 * _log_cosh(rho / 2.0) + _log_cosh(tau / 2.0)
    )


def weight_value(spec: WeightSpec, p: ChartPoint) -> float:
    """
    The double weight at p.

    Args:
        spec: Weight exponents and geometry.
        p: Point in the Fermi chart (real) or the bisector chart (complex).

    Returns:
        w(p) > 0.
    """
    return float(np.exp(log_weight(spec, p)))


# Closed forms in the tanh^2 variables


def real_functional_form(
    spec: WeightSpec, ts: np.ndarray, tr: np.ndarray, lower_bound: bool = False
) -> np.ndarray:
    """Functional as a polynomial in ts = tanh^2 s and tr = tanh^2 rho."""
    n, d1, d2 = spec.dimension, spec.delta1, spec.delta2
    ts = np.asarray(ts, dtype=float)
    tr = np.asarray(tr, dtype=float)
    across = d1 * (1.0 + (n - 2.0 - d1) * ts)
    if lower_bound:
        along = d2 * (1.0 - ts) * (1.0 + (n - 3.0 - d2) * tr)
    else:
        along = d2 * (1.0 - ts) * ((n - 1.0) - (1.0 + d2) * tr)
    return across + along


def tau_gradient_norm2(p: np.ndarray, varpi: np.ndarray) -> np.ndarray:
    """|d tau|^2 in terms of p = tanh^2(s/2) and varpi = tanh^2(rho/2)."""
    one_minus = 1.0 - varpi
    denom = 1.0 + p * one_minus
    return (1.0 - p) * one_minus * (1.0 - p * one_minus) / denom**2


def complex_tau_term(
    spec: WeightSpec, p: np.ndarray, varpi: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """Contribution of the cosh(tau/2)^d2 factor, t = tanh^2(tau/2)."""
    d2 = spec.delta2
    return 0.25 * d2 * (1.0 - (1.0 + d2) * np.asarray(t)) * tau_gradient_norm2(p, varpi)


def complex_functional_form(
    spec: WeightSpec, p: np.ndarray, varpi: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """Functional as a rational function of p, varpi and t = tanh^2(tau/2)."""
    m, d1, d2 = spec.dimension, spec.delta1, spec.delta2
    p = np.asarray(p, dtype=float)
    varpi = np.asarray(varpi, dtype=float)
    one_minus = 1.0 - varpi
    denom = 1.0 + p * one_minus
    across = d1 * (0.5 + (m - 0.5 - d1) * p + p * (1.0 - p) * one_minus / denom)
    along = (
        d2 * (1.0 - p) * (m - 1.0 + (0.5 - d2) * varpi - p * varpi * one_minus / denom)
    )
    return across + along + complex_tau_term(spec, p, varpi, t)


def _point_invariants(spec: WeightSpec, p: ChartPoint) -> Tuple[float, float, float]:
    _check_chart(spec, p)
    x = p.coords
    if spec.kind == GeometryKind.REAL:
        cosh_rho = fermi_slice_cosh_distance(x[1:])
        return float(np.tanh(x[0]) ** 2), 1.0 - 1.0 / cosh_rho**2, 0.0
    return (
        float(np.tanh(x[0] / 2.0) ** 2),
        float(np.tanh(x[2] / 2.0) ** 2),
        float(np.tanh(x[1] / 2.0) ** 2),
    )


def weight_functional_closed(spec: WeightSpec, p: ChartPoint) -> float:
    """-Delta log w - |d log w|^2 at p from the closed forms."""
    a, b, t = _point_invariants(spec, p)
    if spec.kind == GeometryKind.REAL:
        return float(real_functional_form(spec, a, b))
    return float(complex_functional_form(spec, a, b, t))


def weight_functional_lower_bound(spec: WeightSpec, p: ChartPoint) -> float:
    """
    Classical lower bound of the functional.

    Real case: the slice term d2/cosh^2 s (1 + (n-3-d2) tanh^2 rho), which
    is below the exact slice term and equal to it when n = 2 or rho -> inf.
    Complex case: the tau term replaced by its infimum over tau.
    """
    a, b, _ = _point_invariants(spec, p)
    if spec.kind == GeometryKind.REAL:
        return float(real_functional_form(spec, a, b, lower_bound=True))
    return float(complex_functional_form(spec, a, b, 1.0))


def weight_functional_numeric(
    spec: WeightSpec, p: ChartPoint, model: Optional[MetricModel] = None
) -> float:
    """-Delta log w - |d log w|^2 through the numeric Laplace-Beltrami operator."""
    model = model or weight_model(spec)

    def u(q: ChartPoint) -> float:
        return log_weight(spec, q)

    return -laplace_beltrami(model, u, p) - inner_product_of_differentials(model, p, u, u)


def _sample_function(p: ChartPoint) -> float:
    x = p.coords
    return float(np.sin(x[0]) * np.cos(0.5 * x[1]) + 0.1 * x[-1] ** 2)


def weighted_identity_residual(
    spec: WeightSpec,
    p: ChartPoint,
    model: Optional[MetricModel] = None,
    test_function: Optional[Callable[[ChartPoint], float]] = None,
) -> float:
    """
    Residual of w Delta f = Delta(wf) + F wf + 2 <d log w, d(wf)>.

    F is the closed-form functional; f defaults to a smooth sample function.
    The residual is relative to the largest of the four terms (and at least 1).
    """
    model = model or weight_model(spec)
    f = test_function or _sample_function

    def u(q: ChartPoint) -> float:
        return log_weight(spec, q)

    def wf(q: ChartPoint) -> float:
        return weight_value(spec, q) * f(q)

    lhs = weight_value(spec, p) * laplace_beltrami(model, f, p)
    terms = [
        laplace_beltrami(model, wf, p),
        weight_functional_closed(spec, p) * wf(p),
        2.0 * inner_product_of_differentials(model, p, u, wf),
    ]
    scale = max(1.0, abs(lhs), *(abs(t) for t in terms))
    return abs(lhs - sum(terms)) / scale


# Limits and certificates


def asymptotic_limit(spec: WeightSpec) -> float:
    """Limit d1 (H - d1) of the functional as s -> inf."""
    return spec.delta1 * (spec.hessian_trace - spec.delta1)


def limit_deviation(spec: WeightSpec, s: float = LIMIT_FAR_S) -> float:
    """|functional(s, ...) - d1 (H - d1)| at a fixed far point."""
    if spec.kind == GeometryKind.REAL:
        xi = np.zeros(spec.dimension - 1)
        xi[0] = 1.5
        point = ChartPoint(ChartKind.REAL_FERMI, spec.dimension, np.concatenate([[s], xi]))
    else:
        sphere = np.zeros(2 * spec.dimension - 3)
        point = ChartPoint(
            ChartKind.BISECTOR, spec.dimension, np.concatenate([[s, 0.5, 1.0], sphere])
        )
    return abs(weight_functional_closed(spec, point) - asymptotic_limit(spec))


def _axis(resolution: float, upper: float) -> np.ndarray:
    count = max(2, int(round(upper / resolution)) + 1)
    return np.linspace(0.0, upper, count)


def _scan_values(
    spec: WeightSpec,
    upper: float,
    resolution: float,
    shift: float,
    lower_bound: bool,
    max_workers: int,
) -> Tuple[float, Dict[str, float], int]:
    first = _axis(resolution, upper)
    second = _axis(resolution, upper)

    if spec.kind == GeometryKind.REAL:
        names = ("tanh2_s", "tanh2_rho")
        t_axis = np.zeros(1)
    else:
        names = ("p", "varpi", "t")
        t_axis = np.ones(1) if lower_bound else np.linspace(0.0, 1.0, TAU_AXIS_NODES)

    def row_block(rows: np.ndarray) -> Tuple[float, Dict[str, float]]:
        a, b = np.meshgrid(rows, second, indexing="ij")
        best = np.inf
        where: Dict[str, float] = {}
        for t in t_axis:
            if spec.kind == GeometryKind.REAL:
                values = real_functional_form(spec, a, b, lower_bound)
            else:
                values = complex_functional_form(spec, a, b, t)
            values = values + shift
            index = np.unravel_index(int(np.argmin(values)), values.shape)
            if values[index] < best:
                best = float(values[index])
                where = {names[0]: float(a[index]), names[1]: float(b[index])}
                if spec.kind == GeometryKind.COMPLEX:
                    where[names[2]] = float(t)
        return best, where

    blocks = np.array_split(first, max(1, min(max_workers, first.size)))
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(row_block, blocks))

    infimum, argmin = min(results, key=lambda item: item[0])
    nodes = first.size * second.size * t_axis.size
    return infimum, argmin, nodes


def _scan(
    spec: WeightSpec, resolution: float, shift: float, max_workers: int
) -> ScanReport:
    upper = 1.0 - BOX_EPSILON
    infimum, argmin, nodes = _scan_values(spec, upper, resolution, shift, False, max_workers)
    closed, _, _ = _scan_values(spec, 1.0, resolution, shift, False, max_workers)
    bound, _, _ = _scan_values(spec, upper, resolution, shift, True, max_workers)
    axes = "(tanh^2 s, tanh^2 rho)" if spec.kind == GeometryKind.REAL else "(p, varpi)"
    domain = f"{axes} in [0, {upper:g}]^2"
    if spec.kind == GeometryKind.COMPLEX:
        domain += f", tanh^2(tau/2) in [0, 1] ({TAU_AXIS_NODES} nodes)"
    report = ScanReport(
        infimum=infimum,
        argmin=argmin,
        resolution=resolution,
        domain=domain,
        passed=infimum > 0.0,
        closed_box_infimum=closed,
        epsilon=BOX_EPSILON,
        nodes=nodes,
        lower_bound_infimum=bound,
    )
    logger.info(
        f"Scanned {nodes} nodes for {spec.kind.value}({spec.dimension}) "
        f"delta=({spec.delta1}, {spec.delta2}): infimum {infimum:.6g}"
    )
    return report


def certify_positivity(
    spec: WeightSpec, resolution: float = DEFAULT_RESOLUTION, max_workers: int = 1
) -> ScanReport:
    """
    Certify inf(-Delta log w - |d log w|^2) > 0 by a dense grid scan.

    Args:
        spec: Weight exponents, must satisfy the admissibility hypotheses.
        resolution: Grid spacing on each tanh^2 axis.
        max_workers: Threads for the row-block map-reduce.

    Returns:
        ScanReport with the scanned infimum as an empirical constant.

    Raises:
        WeightRangeError: If spec is outside the admissible ranges.
    """
    check_admissible(spec)
    return _scan(spec, resolution, 0.0, max_workers)


def shifted_interval(
    spec: WeightSpec,
    lambda_shift: float,
    resolution: float = DEFAULT_RESOLUTION,
    max_workers: int = 1,
) -> ShiftedIntervalReport:
    """
    Weighted estimate for Delta + lambda: d1 inside ]mu_-, mu_+[ and
    inf(functional + lambda) > 0.

    Raises:
        UnsupportedShiftError: If lambda < 0.
    """
    if lambda_shift < 0:
        raise UnsupportedShiftError(f"negative shift lambda={lambda_shift} is not supported")
    lower, upper = dirichlet_interval(lambda_shift, spec.hessian_trace)
    scan = _scan(spec, resolution, lambda_shift, max_workers)
    inside = lower.value < spec.delta1 < upper.value
    return ShiftedIntervalReport(
        lambda_shift=lambda_shift,
        lower=lower.value,
        upper=upper.value,
        delta1_inside=inside,
        scan=scan,
    )


def scan_grid_frame(spec: WeightSpec, resolution: float = 0.05) -> pd.DataFrame:
    """
    Functional on a coarse grid for CSV export.

    In the complex case the value column is the minimum over the tau axis,
    which is attained at t = 0 or t = 1 since the functional is affine in t.
    """
    upper = 1.0 - BOX_EPSILON
    first = _axis(resolution, upper)
    second = _axis(resolution, upper)
    a, b = np.meshgrid(first, second, indexing="ij")
    if spec.kind == GeometryKind.REAL:
        values = real_functional_form(spec, a, b)
        columns = ["tanh2_s", "tanh2_rho"]
    else:
        values = np.minimum(
            complex_functional_form(spec, a, b, 0.0), complex_functional_form(spec, a, b, 1.0)
        )
        columns = ["p", "varpi"]
    return pd.DataFrame(
        {columns[0]: a.ravel(), columns[1]: b.ravel(), "value": values.ravel()}
    )


def admissible_grid(kind: GeometryKind, dimension: int, size: int = 5) -> List[WeightSpec]:
    """size x size admissible (delta1, delta2) pairs strictly inside the ranges."""
    spec = WeightSpec(kind=kind, dimension=dimension, delta1=1.0)
    top1 = float(spec.hessian_trace)
    if kind == GeometryKind.REAL:
        top2 = float(dimension - 2)
    else:
        top2 = 1.25 if dimension == 2 else dimension - 0.5
    delta1_values = np.linspace(0.0, top1, size + 2)[1:-1]
    delta2_values = np.linspace(0.0, top2, size)
    return [
        WeightSpec(kind=kind, dimension=dimension, delta1=float(d1), delta2=float(d2))
        for d1 in delta1_values
        for d2 in delta2_values
    ]
