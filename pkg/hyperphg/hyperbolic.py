"""
Closed-form hyperbolic models.

Real hyperbolic space in the upper half-space and in Fermi coordinates
around a totally geodesic wall; complex hyperbolic space in the Siegel
half-space and in bisector coordinates (s, tau, rho, y). Chart maps,
the holomorphic inversion, the complex structure and the (u, v, varrho)
dictionary live here too. Everything is a pure function of its inputs.

Chart coordinates:
    UPPER_HALF_REAL  (x_1, ..., x_n), x_1 > 0
    REAL_FERMI       (r, xi_1, ..., xi_{n-1}), xi_1 > 0
    SIEGEL           (f, v, Re z_1, Im z_1, ..., Re z_{m-1}, Im z_{m-1}), f > 0
    BISECTOR         (s, tau, rho, sigma), rho > 0
    UV_RHO           (u, v, varrho, sigma)

sigma are intrinsic coordinates on S^{2m-3}: the angle beta with
y = e^{i beta} when m = 2, stereographic coordinates from the south pole
when m >= 3.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg

from .constants import (
    ANGLE_RANGE,
    RHO_RANGE,
    S_RANGE,
    SPHERE_COORD_BOUND,
    TAU_RANGE,
    XI_RANGE,
)
from .exceptions import DomainError, UnsupportedChartError

logger = logging.getLogger(__name__)

if not logger.handlers:
    logger.addHandler(logging.NullHandler())


class ChartKind(str, Enum):
    """Named coordinate charts."""

    UPPER_HALF_REAL = "upper_half_real"
    REAL_FERMI = "real_fermi"
    SIEGEL = "siegel"
    BISECTOR = "bisector"
    UV_RHO = "uv_rho"


COMPLEX_CHARTS = (ChartKind.SIEGEL, ChartKind.BISECTOR, ChartKind.UV_RHO)
REAL_CHARTS = (ChartKind.UPPER_HALF_REAL, ChartKind.REAL_FERMI)


def chart_dimension(chart: ChartKind, parameter: int) -> int:
    """Real dimension of the manifold carried by a chart (n, or 2m)."""
    if chart in COMPLEX_CHARTS:
        if parameter < 2:
            raise DomainError(f"complex hyperbolic space needs m >= 2, got m={parameter}")
        return 2 * parameter
    if parameter < 2:
        raise DomainError(f"real hyperbolic space needs n >= 2, got n={parameter}")
    return parameter


def _check_domain(chart: ChartKind, parameter: int, x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"non-finite coordinates in {chart.value}: {x}")
    if chart == ChartKind.UPPER_HALF_REAL and x[0] <= 0:
        raise DomainError(f"upper half-space needs x_1 > 0, got {x[0]}")
    if chart == ChartKind.REAL_FERMI and x[1] <= 0:
        raise DomainError(f"Fermi chart needs xi_1 > 0, got {x[1]}")
    if chart == ChartKind.SIEGEL and x[0] <= 0:
        raise DomainError(f"Siegel domain needs f > 0, got {x[0]}")
    if chart == ChartKind.BISECTOR and x[2] <= 0:
        raise DomainError(f"bisector chart degenerates at rho <= 0, got {x[2]}")
    if chart == ChartKind.UV_RHO:
        if not (0 < x[0] <= 1 and 0 < x[1] <= 1 and x[2] > 0):
            raise DomainError(f"(u, v, varrho) outside (0,1] x (0,1] x (0,inf): {x[:3]}")


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """A point in a named chart; coordinates are validated on construction."""

    chart: ChartKind
    parameter: int
    coords: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.coords, dtype=float).reshape(-1)
        expected = chart_dimension(self.chart, self.parameter)
        if x.size != expected:
            raise DomainError(
                f"{self.chart.value} with parameter {self.parameter} needs "
                f"{expected} coordinates, got {x.size}"
            )
        _check_domain(self.chart, self.parameter, x)
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)

    @property
    def dimension(self) -> int:
        return int(self.coords.size)

    def with_coords(self, coords: np.ndarray) -> "ChartPoint":
        return ChartPoint(self.chart, self.parameter, coords)

    def sphere_vector(self) -> np.ndarray:
        """Unit vector y on S^{2m-3} (bisector and (u, v, varrho) charts)."""
        if self.chart not in (ChartKind.BISECTOR, ChartKind.UV_RHO):
            raise UnsupportedChartError(f"{self.chart.value} carries no sphere factor")
        return sphere_from_coords(self.coords[3:], self.parameter)


# Sphere S^{2m-3} in C^{m-1}


def sphere_from_coords(sigma: np.ndarray, m: int) -> np.ndarray:
    """Embed intrinsic sphere coordinates as a unit vector in R^{2m-2}."""
    if m == 2:
        return np.array([np.cos(sigma[0]), np.sin(sigma[0])])
    r2 = float(np.dot(sigma, sigma))
    return np.concatenate([2.0 * sigma, [1.0 - r2]]) / (1.0 + r2)


def sphere_jacobian(sigma: np.ndarray, m: int) -> np.ndarray:
    """d y / d sigma, shape (2m-2, 2m-3)."""
    if m == 2:
        return np.array([[-np.sin(sigma[0])], [np.cos(sigma[0])]])
    r2 = float(np.dot(sigma, sigma))
    denom = 1.0 + r2
    top = 2.0 * np.eye(sigma.size) / denom - 4.0 * np.outer(sigma, sigma) / denom**2
    bottom = -4.0 * sigma / denom**2
    return np.vstack([top, bottom])


def sphere_coords_from_vector(y: np.ndarray, m: int) -> np.ndarray:
    """Inverse of sphere_from_coords; the south pole is outside the chart for m >= 3."""
    y = np.asarray(y, dtype=float)
    if y.size != 2 * m - 2:
        raise DomainError(f"sphere vector for m={m} needs {2 * m - 2} components")
    norm = np.linalg.norm(y)
    if abs(norm - 1.0) > 1e-10:
        raise DomainError(f"sphere vector must be a unit vector, |y|={norm}")
    if m == 2:
        return np.array([np.arctan2(y[1], y[0])])
    if 1.0 + y[-1] < 1e-12:
        raise DomainError("stereographic chart excludes the south pole")
    return y[:-1] / (1.0 + y[-1])


def multiply_by_i(y: np.ndarray) -> np.ndarray:
    """Complex multiplication by i on R^{2k} read as C^k (pairs (Re, Im))."""
    out = np.empty_like(y)
    out[0::2] = -y[1::2]
    out[1::2] = y[0::2]
    return out


def as_complex(y: np.ndarray) -> np.ndarray:
    return y[0::2] + 1j * y[1::2]


def contact_form(sigma: np.ndarray, m: int) -> np.ndarray:
    """theta = Im(<y, dy>) pulled back to sphere coordinates."""
    y = sphere_from_coords(sigma, m)
    return multiply_by_i(y) @ sphere_jacobian(sigma, m)


# Real hyperbolic space


def metric_upper_half_real(p: ChartPoint, n: Optional[int] = None) -> np.ndarray:
    """(delta_ij) / x_1^2."""
    _expect(p, ChartKind.UPPER_HALF_REAL, n)
    return _upper_half_matrix(p.coords)


def _upper_half_matrix(x: np.ndarray) -> np.ndarray:
    return np.eye(x.size) / x[0] ** 2


def _upper_half_derivative(x: np.ndarray) -> np.ndarray:
    dg = np.zeros((x.size, x.size, x.size))
    dg[0] = -2.0 * np.eye(x.size) / x[0] ** 3
    return dg


def metric_real_fermi(p: ChartPoint, n: Optional[int] = None) -> np.ndarray:
    """dr^2 + cosh^2(r) * (sum d xi^2) / xi_1^2."""
    _expect(p, ChartKind.REAL_FERMI, n)
    return _fermi_matrix(p.coords)


def _fermi_matrix(x: np.ndarray) -> np.ndarray:
    g = np.eye(x.size)
    g[1:, 1:] *= np.cosh(x[0]) ** 2 / x[1] ** 2
    return g


def _fermi_derivative(x: np.ndarray) -> np.ndarray:
    size = x.size
    dg = np.zeros((size, size, size))
    slice_eye = np.eye(size)
    slice_eye[0, 0] = 0.0
    dg[0] = slice_eye * 2.0 * np.cosh(x[0]) * np.sinh(x[0]) / x[1] ** 2
    dg[1] = slice_eye * -2.0 * np.cosh(x[0]) ** 2 / x[1] ** 3
    return dg


def real_fermi_to_upper_half(p: ChartPoint, n: Optional[int] = None) -> ChartPoint:
    """x = (xi_1 / cosh r, xi_2, ..., xi_{n-1}, xi_1 tanh r)."""
    _expect(p, ChartKind.REAL_FERMI, n)
    return ChartPoint(ChartKind.UPPER_HALF_REAL, p.parameter, _fermi_to_upper(p.coords))


def _fermi_to_upper(x: np.ndarray) -> np.ndarray:
    r, xi = x[0], x[1:]
    return np.concatenate([[xi[0] / np.cosh(r)], xi[1:], [xi[0] * np.tanh(r)]])


def _fermi_to_upper_jacobian(x: np.ndarray) -> np.ndarray:
    size = x.size
    r, xi1 = x[0], x[1]
    sech, tanh = 1.0 / np.cosh(r), np.tanh(r)
    jac = np.zeros((size, size))
    jac[0, 0] = -xi1 * sech * tanh
    jac[0, 1] = sech
    for k in range(2, size):
        jac[k - 1, k] = 1.0
    jac[size - 1, 0] = xi1 * sech**2
    jac[size - 1, 1] = tanh
    return jac


def fermi_slice_cosh_distance(xi: np.ndarray) -> float:
    """cosh of the slice distance from the base point (1, 0, ..., 0) in RH^{n-1}."""
    offset = np.array(xi, dtype=float)
    offset[0] -= 1.0
    return 1.0 + float(np.dot(offset, offset)) / (2.0 * xi[0])


# Complex hyperbolic space: Siegel half-space


def siegel_height(z: np.ndarray) -> float:
    """f(z) = Re z_m - |z'|^2 / 4 for complex coordinates (z_1, ..., z_m)."""
    z = np.asarray(z, dtype=complex)
    return float(z[-1].real - 0.25 * np.sum(np.abs(z[:-1]) ** 2))


def siegel_point(z: np.ndarray) -> ChartPoint:
    """Chart point from holomorphic coordinates (z_1, ..., z_m)."""
    z = np.asarray(z, dtype=complex)
    return ChartPoint(ChartKind.SIEGEL, z.size, _siegel_coords(z))


def siegel_to_complex(p: ChartPoint) -> np.ndarray:
    """Recover (z_1, ..., z_m) from (f, v, z')."""
    _expect(p, ChartKind.SIEGEL, None)
    return _siegel_complex(p.coords)


def _siegel_complex(x: np.ndarray) -> np.ndarray:
    zp = x[2::2] + 1j * x[3::2]
    zm = x[0] + 0.25 * np.sum(np.abs(zp) ** 2) - 1j * x[1]
    return np.concatenate([zp, [zm]])


def _siegel_coords(z: np.ndarray) -> np.ndarray:
    coords = np.empty(2 * z.size)
    coords[0] = z[-1].real - 0.25 * np.sum(np.abs(z[:-1]) ** 2)
    coords[1] = -z[-1].imag
    coords[2::2] = z[:-1].real
    coords[3::2] = z[:-1].imag
    return coords


def metric_siegel(p: ChartPoint, m: Optional[int] = None) -> np.ndarray:
    """(df^2 + eta^2)/f^2 + sum |dz_i|^2 / f with eta = dv + Im(sum conj(z_i) dz_i)/2."""
    _expect(p, ChartKind.SIEGEL, m)
    return _siegel_matrix(p.coords)


def _siegel_matrix(x: np.ndarray) -> np.ndarray:
    size = x.size
    f = x[0]
    df = np.zeros(size)
    df[0] = 1.0
    eta = np.zeros(size)
    eta[1] = 1.0
    eta[2::2] = -0.5 * x[3::2]
    eta[3::2] = 0.5 * x[2::2]
    g = (np.outer(df, df) + np.outer(eta, eta)) / f**2
    flat = np.zeros(size)
    flat[2:] = 1.0 / f
    return g + np.diag(flat)


# Complex hyperbolic space: bisector coordinates


@dataclass(frozen=True, eq=False)
class BisectorFrame:
    """
    Adapted coframe at a bisector point, all covectors in coordinate differentials.

    The metric is ds^2 + omega2^2 + cosh^2(s/2) drho^2 + omega1^2
    + 4 cosh^2(s/2) sinh^2(rho/2) gamma' with
    omega2 = cosh^2(s/2) cosh(rho/2) vartheta2 and
    omega1 = cosh(s/2) sinh(rho) vartheta1.
    """

    m: int
    s: float
    rho: float
    ds: np.ndarray
    dtau: np.ndarray
    drho: np.ndarray
    theta: np.ndarray
    vartheta1: np.ndarray
    vartheta2: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    gamma_prime: np.ndarray
    reeb: np.ndarray
    e_s: np.ndarray
    e_rho: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    sphere_jacobian: np.ndarray = field(repr=False)

    @property
    def cosh_half_s(self) -> float:
        return float(np.cosh(self.s / 2.0))

    def metric(self) -> np.ndarray:
        big_c = self.cosh_half_s
        sh = np.sinh(self.rho / 2.0)
        g = (
            np.outer(self.ds, self.ds)
            + np.outer(self.omega2, self.omega2)
            + big_c**2 * np.outer(self.drho, self.drho)
            + np.outer(self.omega1, self.omega1)
            + 4.0 * big_c**2 * sh**2 * self.gamma_prime
        )
        return 0.5 * (g + g.T)


def bisector_frame(p: ChartPoint, m: Optional[int] = None) -> BisectorFrame:
    """Coframe (ds, vartheta2, drho, vartheta1, gamma') of the bisector chart at p."""
    _expect(p, ChartKind.BISECTOR, m)
    return _bisector_frame(p.coords, p.parameter)


def _bisector_frame(x: np.ndarray, m: int) -> BisectorFrame:
    size = 2 * m
    s, rho, sigma = x[0], x[2], x[3:]
    if rho <= 0:
        raise DomainError(f"bisector frame degenerates at rho={rho}")
    big_c = np.cosh(s / 2.0)
    q = np.tanh(s / 2.0)
    p = q * q
    c = np.cosh(rho / 2.0)
    sh = np.sinh(rho / 2.0)
    big_s = np.sinh(rho)

    basis = np.eye(size)
    ds, dtau, drho = basis[0], basis[1], basis[2]

    y = sphere_from_coords(sigma, m)
    jac = sphere_jacobian(sigma, m)
    iy = multiply_by_i(y)
    theta = np.zeros(size)
    theta[3:] = iy @ jac
    round_metric = np.zeros((size, size))
    round_metric[3:, 3:] = jac.T @ jac
    gamma_prime = round_metric - np.outer(theta, theta)

    vartheta2 = (1.0 + p) * dtau + (2.0 * sh**2 * q / c) * theta
    vartheta1 = theta + (q / (2.0 * c)) * dtau
    omega2 = big_c**2 * c * vartheta2
    omega1 = big_c * big_s * vartheta1

    reeb = np.zeros(size)
    reeb[3:] = np.linalg.pinv(jac) @ iy

    # Dual vectors to (omega2, omega1) inside span(d/dtau, Reeb).
    pair = np.array(
        [
            [omega2[1], omega2 @ reeb],
            [omega1[1], omega1 @ reeb],
        ]
    )
    coeffs = np.linalg.solve(pair, np.eye(2))
    e2 = coeffs[0, 0] * dtau + coeffs[1, 0] * reeb
    e1 = coeffs[0, 1] * dtau + coeffs[1, 1] * reeb

    return BisectorFrame(
        m=m,
        s=float(s),
        rho=float(rho),
        ds=ds,
        dtau=dtau,
        drho=drho,
        theta=theta,
        vartheta1=vartheta1,
        vartheta2=vartheta2,
        omega1=omega1,
        omega2=omega2,
        gamma_prime=gamma_prime,
        reeb=reeb,
        e_s=ds.copy(),
        e_rho=drho / big_c,
        e1=e1,
        e2=e2,
        sphere_jacobian=jac,
    )


def metric_bisector(p: ChartPoint, m: Optional[int] = None) -> np.ndarray:
    """ds^2 + C^4 c^2 vartheta2^2 + C^2 (drho^2 + sinh^2(rho) vartheta1^2 + 4 sh^2 gamma')."""
    _expect(p, ChartKind.BISECTOR, m)
    return _bisector_frame(p.coords, p.parameter).metric()


def _bisector_matrix_for(m: int) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(x: np.ndarray) -> np.ndarray:
        return _bisector_frame(x, m).metric()

    return evaluate


def bisector_point(s: float, tau: float, rho: float, y: np.ndarray) -> ChartPoint:
    """Bisector chart point from a unit vector y in C^{m-1} = R^{2m-2}."""
    y = np.asarray(y, dtype=float)
    m = y.size // 2 + 1
    sigma = sphere_coords_from_vector(y, m)
    return ChartPoint(ChartKind.BISECTOR, m, np.concatenate([[s, tau, rho], sigma]))


def _bisector_to_siegel_coords(x: np.ndarray, m: int) -> np.ndarray:
    s, tau, rho, sigma = x[0], x[1], x[2], x[3:]
    if rho <= 0:
        raise DomainError(f"bisector chart degenerates at rho={rho}")
    q = np.tanh(s / 2.0)
    c = np.cosh(rho / 2.0)
    sh = np.sinh(rho / 2.0)
    # t e^{i alpha / 2}
    w = 2.0 * sh / (c + 1j * q)
    alpha = 2.0 * np.angle(w)
    zm = np.exp(tau + 1j * alpha)
    zp = np.exp(tau / 2.0) * w * as_complex(sphere_from_coords(sigma, m))
    return _siegel_coords(np.concatenate([zp, [zm]]))


def bisector_to_siegel(p: ChartPoint, m: Optional[int] = None) -> ChartPoint:
    """z_m = e^{tau + i alpha}, z_i = e^{(tau + i alpha)/2} t y_i."""
    _expect(p, ChartKind.BISECTOR, m)
    return ChartPoint(
        ChartKind.SIEGEL, p.parameter, _bisector_to_siegel_coords(p.coords, p.parameter)
    )


def defining_function(s: float, tau: float, rho: float, tau_exponent: float = 1.0) -> float:
    """Siegel height in bisector coordinates, e^{k tau} / (C^2 (c^2 + tanh^2(s/2)))."""
    big_c = np.cosh(s / 2.0)
    c = np.cosh(rho / 2.0)
    q = np.tanh(s / 2.0)
    return float(np.exp(tau_exponent * tau) / (big_c**2 * (c**2 + q**2)))


def measured_tau_exponent(p: ChartPoint, step: float = 1e-3) -> float:
    """d log f / d tau of the Siegel height along the bisector chart, at p."""
    _expect(p, ChartKind.BISECTOR, None)
    shift = np.zeros(p.dimension)
    shift[1] = step
    up = _bisector_to_siegel_coords(p.coords + shift, p.parameter)[0]
    down = _bisector_to_siegel_coords(p.coords - shift, p.parameter)[0]
    return float((np.log(up) - np.log(down)) / (2.0 * step))


# Inversions


def inversion(p: ChartPoint) -> ChartPoint:
    """The model inversion iota in the chart of p."""
    x = np.array(p.coords)
    if p.chart == ChartKind.UPPER_HALF_REAL:
        x[-1] = -x[-1]
    elif p.chart == ChartKind.REAL_FERMI:
        x[0] = -x[0]
    elif p.chart == ChartKind.BISECTOR:
        x[0], x[1] = -x[0], -x[1]
    elif p.chart == ChartKind.SIEGEL:
        x = _siegel_inversion_coords(x)
    else:
        raise UnsupportedChartError(f"no inversion in chart {p.chart.value}")
    return p.with_coords(x)


def _siegel_inversion_coords(x: np.ndarray) -> np.ndarray:
    z = _siegel_complex(x)
    zm = z[-1]
    return _siegel_coords(np.concatenate([z[:-1] / zm, [1.0 / zm]]))


# Complex structure


def complex_structure_J(p: ChartPoint, m: Optional[int] = None) -> np.ndarray:
    """
    Matrix of J acting on coordinate tangent vectors at a bisector point.

    J e_s = e2, J e_rho = e1 (and J^2 = -1 on both planes); on ker(theta)
    J is complex multiplication in C^{m-1}.
    """
    _expect(p, ChartKind.BISECTOR, m)
    frame = _bisector_frame(p.coords, p.parameter)
    size = p.dimension
    jac = frame.sphere_jacobian
    jac_pinv = np.linalg.pinv(jac)
    reeb_sphere = frame.reeb[3:]
    big_c = frame.cosh_half_s
    matrix = np.zeros((size, size))
    for col in range(size):
        vec = np.zeros(size)
        vec[col] = 1.0
        a_s = vec[0]
        a_rho = big_c * vec[2]
        a2 = frame.omega2 @ vec
        a1 = frame.omega1 @ vec
        image = a_s * frame.e2 - a2 * frame.e_s + a_rho * frame.e1 - a1 * frame.e_rho
        sphere_part = vec[3:]
        horizontal = sphere_part - (frame.theta[3:] @ sphere_part) * reeb_sphere
        image[3:] += jac_pinv @ multiply_by_i(jac @ horizontal)
        matrix[:, col] = image
    return matrix


# (u, v, varrho) dictionary


def uv_dictionary(p: ChartPoint) -> ChartPoint:
    """u = 1/cosh^2(s/2), v = 1/cosh(rho/2), varrho = e^{-2 tau}; sphere passes through."""
    _expect(p, ChartKind.BISECTOR, None)
    s, tau, rho = p.coords[:3]
    head = [1.0 / np.cosh(s / 2.0) ** 2, 1.0 / np.cosh(rho / 2.0), np.exp(-2.0 * tau)]
    return ChartPoint(ChartKind.UV_RHO, p.parameter, np.concatenate([head, p.coords[3:]]))


def uv_to_bisector(p: ChartPoint, s_sign: int = 1) -> ChartPoint:
    """
    Inverse of uv_dictionary on one half of the bisector chart.

    u is even in s, so the side is not encoded in (u, v, varrho): s_sign = 1
    returns s >= 0 and s_sign = -1 returns s <= 0.
    """
    _expect(p, ChartKind.UV_RHO, None)
    if s_sign not in (1, -1):
        raise ValueError(f"s_sign must be 1 or -1, got {s_sign}")
    u, v, varrho = p.coords[:3]
    if v >= 1.0:
        raise DomainError("v = 1 is the spine rho = 0, outside the bisector chart")
    s = s_sign * 2.0 * np.arccosh(1.0 / np.sqrt(u))
    rho = 2.0 * np.arccosh(1.0 / v)
    tau = -0.5 * np.log(varrho)
    coords = np.concatenate([[s, tau, rho], p.coords[3:]])
    return ChartPoint(ChartKind.BISECTOR, p.parameter, coords)


# Large-rho corrected frame


def large_rho_metric(p: ChartPoint) -> np.ndarray:
    """ds^2 + omega2^2 + C^2 (drho^2 + sinh^2(rho/2)(dtau^2 + 4 gamma'))."""
    frame = bisector_frame(p)
    big_c = frame.cosh_half_s
    sh = np.sinh(frame.rho / 2.0)
    g = (
        np.outer(frame.ds, frame.ds)
        + np.outer(frame.omega2, frame.omega2)
        + big_c**2
        * (
            np.outer(frame.drho, frame.drho)
            + sh**2 * (np.outer(frame.dtau, frame.dtau) + 4.0 * frame.gamma_prime)
        )
    )
    return 0.5 * (g + g.T)


def large_rho_deviation(p: ChartPoint) -> float:
    """Spectral radius of g^{-1}(g_approx - g): relative size of the corrected-frame error."""
    exact = metric_bisector(p)
    approx = large_rho_metric(p)
    eigenvalues = linalg.eigh(approx - exact, exact, eigvals_only=True)
    return float(np.max(np.abs(eigenvalues)))


# Closed forms along the equidistant foliation


def equidistant_mean_curvature(s: float, rho: float, m: int) -> float:
    """H = -tanh(s/2) (m + 1 / (cosh^2(s/2)(cosh^2(rho/2) + tanh^2(s/2))))."""
    return _mean_curvature_form(s, rho, m, 1.0)


def equidistant_mean_curvature_displayed(s: float, rho: float, m: int) -> float:
    """Variant with coefficient 2 on the second term, kept for comparison reports."""
    return _mean_curvature_form(s, rho, m, 2.0)


def _mean_curvature_form(s: float, rho: float, m: int, coefficient: float) -> float:
    q = np.tanh(s / 2.0)
    big_c = np.cosh(s / 2.0)
    c = np.cosh(rho / 2.0)
    return float(-q * (m + coefficient / (big_c**2 * (c**2 + q**2))))


def equidistant_shape_block(s: float, rho: float, off_diagonal_scale: float = 1.0) -> np.ndarray:
    """
    Second fundamental form on the orthonormal pair dual to (omega2, omega1).

    off_diagonal_scale=2 gives the variant with the doubled mixed entry.
    """
    q = np.tanh(s / 2.0)
    p = q * q
    big_c = np.cosh(s / 2.0)
    c = np.cosh(rho / 2.0)
    sh = np.sinh(rho / 2.0)
    denom = c**2 + p
    a = -q * (4.0 + sh**2 * (3.0 - p)) / (2.0 * denom)
    d = -q * (1.0 + p * c**2) / (2.0 * denom)
    b = -off_diagonal_scale * np.sinh(rho) / (4.0 * big_c**3 * denom)
    return np.array([[a, b], [b, d]])


# Metric models and chart maps


@dataclass(frozen=True, eq=False)
class MetricModel:
    """
    A closed-form metric field on one chart.

    ``evaluate`` and ``derivative`` act on raw coordinate arrays so the
    tensor engine can difference them without re-validating every stencil
    point; ``slice_axis`` marks charts written as ds^2 + g_s.
    """

    chart: ChartKind
    parameter: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    slice_axis: Optional[int] = None

    @property
    def dimension(self) -> int:
        return chart_dimension(self.chart, self.parameter)

    @property
    def has_analytic_derivatives(self) -> bool:
        return self.derivative is not None

    def __call__(self, p: ChartPoint) -> np.ndarray:
        self.check_point(p)
        return self.evaluate(p.coords)

    def check_point(self, p: ChartPoint) -> None:
        if p.chart != self.chart or p.parameter != self.parameter:
            raise UnsupportedChartError(
                f"model on {self.chart.value}({self.parameter}) evaluated at "
                f"{p.chart.value}({p.parameter})"
            )

    def without_derivatives(self) -> "MetricModel":
        return MetricModel(self.chart, self.parameter, self.evaluate, None, self.slice_axis)


def metric_model(chart: ChartKind, parameter: int) -> MetricModel:
    """The exact hyperbolic metric in the given chart."""
    chart_dimension(chart, parameter)
    if chart == ChartKind.UPPER_HALF_REAL:
        return MetricModel(chart, parameter, _upper_half_matrix, _upper_half_derivative)
    if chart == ChartKind.REAL_FERMI:
        return MetricModel(chart, parameter, _fermi_matrix, _fermi_derivative, slice_axis=0)
    if chart == ChartKind.SIEGEL:
        return MetricModel(chart, parameter, _siegel_matrix)
    if chart == ChartKind.BISECTOR:
        return MetricModel(chart, parameter, _bisector_matrix_for(parameter), slice_axis=0)
    raise UnsupportedChartError(f"no closed-form metric registered for {chart.value}")


def euclidean_model(dimension: int) -> MetricModel:
    """Flat metric on the upper-half-space chart; used as a zero-curvature reference."""

    def evaluate(x: np.ndarray) -> np.ndarray:
        return np.eye(x.size)

    def derivative(x: np.ndarray) -> np.ndarray:
        return np.zeros((x.size, x.size, x.size))

    return MetricModel(ChartKind.UPPER_HALF_REAL, dimension, evaluate, derivative)


@dataclass(frozen=True)
class ChartMap:
    """A smooth map between charts, with an optional analytic Jacobian."""

    name: str
    source: ChartKind
    target: ChartKind
    apply_coords: Callable[[np.ndarray, int], np.ndarray]
    jacobian_coords: Optional[Callable[[np.ndarray, int], np.ndarray]] = None

    def __call__(self, p: ChartPoint) -> ChartPoint:
        if p.chart != self.source:
            raise UnsupportedChartError(f"{self.name} expects {self.source.value} points")
        return ChartPoint(self.target, p.parameter, self.apply_coords(p.coords, p.parameter))


def _identity_coords(x: np.ndarray, parameter: int) -> np.ndarray:
    return np.array(x)


def _identity_jacobian(x: np.ndarray, parameter: int) -> np.ndarray:
    return np.eye(x.size)


def _fermi_inversion_coords(x: np.ndarray, parameter: int) -> np.ndarray:
    out = np.array(x)
    out[0] = -out[0]
    return out


def _upper_inversion_coords(x: np.ndarray, parameter: int) -> np.ndarray:
    out = np.array(x)
    out[-1] = -out[-1]
    return out


def _reflection_jacobian(index: int) -> Callable[[np.ndarray, int], np.ndarray]:
    def jacobian(x: np.ndarray, parameter: int) -> np.ndarray:
        jac = np.eye(x.size)
        jac[index, index] = -1.0
        return jac

    return jacobian


def _bisector_inversion_coords(x: np.ndarray, parameter: int) -> np.ndarray:
    out = np.array(x)
    out[0], out[1] = -out[0], -out[1]
    return out


def chart_map(name: str) -> ChartMap:
    """Registered chart maps by name."""
    maps: Dict[str, ChartMap] = {
        "real_fermi_to_upper_half": ChartMap(
            name,
            ChartKind.REAL_FERMI,
            ChartKind.UPPER_HALF_REAL,
            lambda x, n: _fermi_to_upper(x),
            lambda x, n: _fermi_to_upper_jacobian(x),
        ),
        "bisector_to_siegel": ChartMap(
            name, ChartKind.BISECTOR, ChartKind.SIEGEL, _bisector_to_siegel_coords
        ),
        "inversion_upper_half": ChartMap(
            name,
            ChartKind.UPPER_HALF_REAL,
            ChartKind.UPPER_HALF_REAL,
            _upper_inversion_coords,
            lambda x, n: _reflection_jacobian(x.size - 1)(x, n),
        ),
        "inversion_fermi": ChartMap(
            name,
            ChartKind.REAL_FERMI,
            ChartKind.REAL_FERMI,
            _fermi_inversion_coords,
            _reflection_jacobian(0),
        ),
        "inversion_bisector": ChartMap(
            name, ChartKind.BISECTOR, ChartKind.BISECTOR, _bisector_inversion_coords
        ),
        "inversion_siegel": ChartMap(
            name,
            ChartKind.SIEGEL,
            ChartKind.SIEGEL,
            lambda x, m: _siegel_inversion_coords(x),
        ),
    }
    if name.startswith("identity_"):
        chart = ChartKind(name[len("identity_") :])
        return ChartMap(name, chart, chart, _identity_coords, _identity_jacobian)
    if name not in maps:
        raise ValueError(f"Unknown chart map '{name}'")
    return maps[name]


# Sampling in the regular part of each chart


def sample_points(
    chart: ChartKind,
    parameter: int,
    count: int,
    rng: np.random.Generator,
    ranges: Optional[Dict[str, Tuple[float, float]]] = None,
) -> List[ChartPoint]:
    """Random valid points, kept away from the chart degeneracies."""
    box = {
        "s": S_RANGE,
        "tau": TAU_RANGE,
        "rho": RHO_RANGE,
        "angle": ANGLE_RANGE,
        "xi": XI_RANGE,
        "r": (-3.0, 3.0),
        "flat": (-2.0, 2.0),
    }
    if ranges:
        box.update(ranges)
    dim = chart_dimension(chart, parameter)
    points = []
    for _ in range(count):
        if chart == ChartKind.UPPER_HALF_REAL:
            x = rng.uniform(*box["flat"], size=dim)
            x[0] = rng.uniform(*box["xi"])
        elif chart == ChartKind.REAL_FERMI:
            x = rng.uniform(*box["flat"], size=dim)
            x[0] = rng.uniform(*box["r"])
            x[1] = rng.uniform(*box["xi"])
        elif chart == ChartKind.SIEGEL:
            x = rng.uniform(*box["flat"], size=dim)
            x[0] = rng.uniform(*box["xi"])
        elif chart in (ChartKind.BISECTOR, ChartKind.UV_RHO):
            head = [rng.uniform(*box["s"]), rng.uniform(*box["tau"]), rng.uniform(*box["rho"])]
            x = np.concatenate([head, _sample_sphere_coords(parameter, rng, box["angle"])])
            if chart == ChartKind.UV_RHO:
                x[0] = abs(x[0])
                points.append(uv_dictionary(ChartPoint(ChartKind.BISECTOR, parameter, x)))
                continue
        else:
            raise UnsupportedChartError(f"no sampler for {chart.value}")
        points.append(ChartPoint(chart, parameter, x))
    return points


def _sample_sphere_coords(
    m: int, rng: np.random.Generator, angle_range: Tuple[float, float]
) -> np.ndarray:
    if m == 2:
        return np.array([rng.uniform(*angle_range)])
    x = rng.uniform(-1.0, 1.0, size=2 * m - 3)
    norm = np.linalg.norm(x)
    if norm > SPHERE_COORD_BOUND:
        x *= SPHERE_COORD_BOUND / norm
    return x


def _expect(p: ChartPoint, chart: ChartKind, parameter: Optional[int]) -> None:
    if p.chart != chart:
        raise UnsupportedChartError(f"expected a {chart.value} point, got {p.chart.value}")
    if parameter is not None and p.parameter != parameter:
        raise DomainError(f"point has parameter {p.parameter}, expected {parameter}")
