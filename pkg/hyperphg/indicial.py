"""
Critical weights of radial indicial operators and the exponent ladder.

For -d^2 - H d + lambda the functions e^{-mu s} in the kernel have
mu = H/2 +- sqrt(H^2/4 + lambda). Upper critical weights generate, together
with a unit step, the additive monoid N_L; the ladder a_k lists the
successive elements of N_L above mu_+.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from .exact import ExactLike, ExactWeight, as_weight, to_expr
from .exceptions import (
    ComplexIndicialError,
    ExactArithmeticError,
    LadderExhaustedError,
    MonoidError,
    UnsupportedShiftError,
)

logger = logging.getLogger(__name__)

if not logger.handlers:
    logger.addHandler(logging.NullHandler())

# Slack for the numeric bound test; ordering itself is structural.
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class Mode:
    """One eigenvalue of the zero-order part, with multiplicity."""

    eigenvalue: ExactWeight
    multiplicity: int = 1
    label: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalue": self.eigenvalue.to_dict(),
            "multiplicity": self.multiplicity,
            "label": self.label,
        }


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigenmodes of the indicial operator sharing the radial part -d^2 - H d."""

    hessian: ExactWeight
    modes: Tuple[Mode, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.hessian.value <= 0:
            raise ValueError(f"mean-curvature limit H must be positive, got {self.hessian}")
        if not self.modes:
            raise ValueError("spectrum has no modes")
        for mode in self.modes:
            if mode.multiplicity < 1:
                raise ValueError(f"mode '{mode.label}' has multiplicity {mode.multiplicity}")

    @property
    def eigenvalues(self) -> List[ExactWeight]:
        return [mode.eigenvalue for mode in self.modes]

    def to_dict(self) -> Dict[str, Any]:
        return {"hessian": self.hessian.to_dict(), "modes": [m.to_dict() for m in self.modes]}


def spectrum_from_records(records: Iterable[Dict[str, Any]], hessian: ExactLike) -> ModeSpectrum:
    """Build a spectrum from ``{"eigenvalue", "multiplicity", "label"}`` records."""
    modes = []
    for index, record in enumerate(records):
        if "eigenvalue" not in record:
            raise ValueError(f"spectrum record {index} has no 'eigenvalue'")
        modes.append(
            Mode(
                eigenvalue=as_weight(str(record["eigenvalue"])),
                multiplicity=int(record.get("multiplicity", 1)),
                label=str(record.get("label", f"mode{index}")),
            )
        )
    return ModeSpectrum(as_weight(hessian), tuple(modes))


def einstein_complex_spectrum(m: int) -> ModeSpectrum:
    """Zero-order eigenvalues of the gauged Einstein operator near complex hyperbolic space."""
    if m < 2:
        raise ValueError(f"complex dimension m must be >= 2, got {m}")
    eigenvalues = [
        (sp.Integer(0), "trace"),
        (sp.Integer(2), "primitive"),
        (sp.Rational(2 * m + 5, 4), "hermitian_mixed"),
        (sp.Integer(m + 1), "anti_hermitian"),
    ]
    modes = tuple(Mode(ExactWeight(value), 1, label) for value, label in eigenvalues)
    return ModeSpectrum(ExactWeight(m), modes)


# Critical weights


def critical_pair(eigenvalue: ExactLike, hessian: ExactLike) -> Tuple[ExactWeight, ExactWeight]:
    """
    Roots (mu_-, mu_+) of mu^2 - H mu - lambda = 0.

    Args:
        eigenvalue: lambda, rational.
        hessian: H, rational.

    Returns:
        Exact weights mu_- <= H/2 <= mu_+.

    Raises:
        ComplexIndicialError: If H^2/4 + lambda < 0.
        ExactArithmeticError: If H or lambda is irrational.
    """
    lam = to_expr(eigenvalue)
    big_h = to_expr(hessian)
    if not isinstance(lam, sp.Rational) or not isinstance(big_h, sp.Rational):
        raise ExactArithmeticError(
            f"critical weights need rational data, got H={big_h}, lambda={lam}"
        )
    disc = big_h**2 / 4 + lam
    if disc < 0:
        raise ComplexIndicialError(
            f"indicial roots are complex for H={big_h}, lambda={lam} (discriminant {disc})"
        )
    root = ExactWeight.sqrt(disc)
    half = ExactWeight(big_h / 2)
    return half - root, half + root


def indicial_polynomial(mu: ExactLike, eigenvalue: ExactLike, hessian: ExactLike) -> sp.Expr:
    """Symbol of -d^2 - H d + lambda on e^{-mu s}: -mu^2 + H mu + lambda, expanded."""
    mu_expr = to_expr(mu)
    return sp.expand(-(mu_expr**2) + to_expr(hessian) * mu_expr + to_expr(eigenvalue))


@dataclass(frozen=True)
class CriticalWeightSet:
    """Per-mode critical pairs and their aggregates."""

    pairs: Tuple[Tuple[ExactWeight, ExactWeight], ...]
    labels: Tuple[str, ...] = ()

    @property
    def upper(self) -> ExactWeight:
        """mu_+ = min over modes of mu_+^(i)."""
        return min(pair[1] for pair in self.pairs)

    @property
    def lower(self) -> ExactWeight:
        """mu_- = max over modes of mu_-^(i)."""
        return max(pair[0] for pair in self.pairs)

    @property
    def upper_max(self) -> ExactWeight:
        return max(pair[1] for pair in self.pairs)

    @property
    def lower_min(self) -> ExactWeight:
        return min(pair[0] for pair in self.pairs)

    @property
    def upper_weights(self) -> List[ExactWeight]:
        return sorted({pair[1] for pair in self.pairs})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pairs": [
                {"label": label, "mu_minus": lo.to_dict(), "mu_plus": hi.to_dict()}
                for label, (lo, hi) in zip(self.labels or [""] * len(self.pairs), self.pairs)
            ],
            "mu_plus": self.upper.to_dict(),
            "mu_minus": self.lower.to_dict(),
            "mu_plus_max": self.upper_max.to_dict(),
            "mu_minus_min": self.lower_min.to_dict(),
        }


def critical_weights(spectrum: ModeSpectrum) -> CriticalWeightSet:
    """Critical pairs of every mode of the spectrum."""
    pairs = tuple(critical_pair(mode.eigenvalue, spectrum.hessian) for mode in spectrum.modes)
    labels = tuple(mode.label for mode in spectrum.modes)
    return CriticalWeightSet(pairs, labels)


def einstein_complex_weights(m: int) -> List[ExactWeight]:
    """
    Upper critical weights of the Einstein operator on complex hyperbolic space.

    m, (m + sqrt(m^2+8))/2, (m + sqrt(m^2+2m+5))/2 and m+1, sorted.
    """
    weights = critical_weights(einstein_complex_spectrum(m))
    return sorted(pair[1] for pair in weights.pairs)


def dirichlet_interval(
    eigenvalue: ExactLike, hessian: ExactLike
) -> Tuple[ExactWeight, ExactWeight]:
    """
    Open interval ]mu_-, mu_+[ of weights where Delta + lambda is an isomorphism.

    Raises:
        UnsupportedShiftError: If lambda < 0.
    """
    if to_expr(eigenvalue) < 0:
        raise UnsupportedShiftError(f"negative shift lambda={eigenvalue} is not supported")
    return critical_pair(eigenvalue, hessian)


# The monoid N_L and the ladder


def _check_generators(generators: Sequence[ExactLike]) -> List[ExactWeight]:
    weights = sorted({as_weight(g) for g in generators})
    if not weights:
        raise MonoidError("the monoid needs at least one generator")
    nonpositive = [str(w) for w in weights if w.value <= 0]
    if nonpositive:
        raise MonoidError(f"generators must be positive, got {', '.join(nonpositive)}")
    return weights


def monoid_enumerate(generators: Sequence[ExactLike], bound: float) -> List[ExactWeight]:
    """
    All finite sums of generators (0 included) with value <= bound, increasing.

    Best-first expansion from 0 with structural deduplication, so ordering
    never depends on floating-point ties.
    """
    gens = _check_generators(generators)
    counter = itertools.count()
    heap: List[Tuple[float, int, ExactWeight]] = [(0.0, next(counter), ExactWeight(0))]
    seen = {heap[0][2]}
    elements: List[ExactWeight] = []
    while heap:
        _, _, current = heapq.heappop(heap)
        elements.append(current)
        for g in gens:
            candidate = current + g
            if candidate.value > bound + BOUND_SLACK or candidate in seen:
                continue
            seen.add(candidate)
            heapq.heappush(heap, (candidate.value, next(counter), candidate))
    logger.debug(f"Enumerated {len(elements)} monoid elements up to {bound}")
    return elements


def ladder(
    mu_plus: ExactLike,
    generators: Sequence[ExactLike],
    length: int,
    unit: Optional[ExactLike] = None,
) -> List[ExactWeight]:
    """
    Exponents a_0 = 0 < a_1 < ... < a_length with mu_+ + a_{k+1} the successor
    of mu_+ + a_k in N_L.

    Args:
        mu_plus: Upper critical weight, must lie in N_L.
        generators: Generators of N_L (upper critical weights and the unit).
        length: K, number of steps.
        unit: Step bound to enforce (1 real, 1/2 complex); defaults to the
            smallest generator.

    Raises:
        MonoidError: If mu_+ is not in N_L or the unit exceeds a step.
        LadderExhaustedError: If fewer than K rungs were enumerated.
    """
    mu = as_weight(mu_plus)
    gens = _check_generators(generators)
    step = as_weight(unit) if unit is not None else gens[0]
    bound = mu.value + length * gens[0].value + 1e-9
    elements = monoid_enumerate(gens, bound)
    if mu not in elements:
        raise MonoidError(f"mu_+ = {mu} is not a sum of the generators")
    start = elements.index(mu)
    rungs = elements[start : start + length + 1]
    if len(rungs) < length + 1:
        raise LadderExhaustedError(f"only {len(rungs) - 1} ladder steps below {bound:.6g}")
    exponents = [rung - mu for rung in rungs]
    for k in range(length):
        if exponents[k + 1].value > exponents[k].value + step.value + BOUND_SLACK:
            raise MonoidError(f"ladder step a_{k + 1} - a_{k} exceeds the unit {step}")
    return exponents


def ladder_rungs(
    mu_plus: ExactLike, generators: Sequence[ExactLike], length: int
) -> List[ExactWeight]:
    """mu_+ + a_k for k = 0..length."""
    mu = as_weight(mu_plus)
    return [mu + a for a in ladder(mu, generators, length)]
