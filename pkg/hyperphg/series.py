"""
Polyhomogeneous series: finite sums of c s^sigma e^{-tau s}.

Exponents tau are ExactWeight so weight components and resonances are
decided structurally; coefficients are float vectors indexed by eigenmode.
Series are immutable and every operation returns a new one.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .constants import CANCELLATION_RTOL
from .exact import ExactLike, ExactWeight, as_weight

TermKey = Tuple[int, ExactWeight]


@dataclass(frozen=True, eq=False)
class PolyTerm:
    """coeff * s^sigma * e^{-tau s}, one coefficient per mode."""

    sigma: int
    tau: ExactWeight
    coeff: np.ndarray

    def __post_init__(self) -> None:
        if self.sigma < 0 or int(self.sigma) != self.sigma:
            raise ValueError(f"polynomial power must be a nonnegative integer, got {self.sigma}")
        coeff = np.atleast_1d(np.asarray(self.coeff, dtype=float)).copy()
        coeff.setflags(write=False)
        object.__setattr__(self, "coeff", coeff)

    @property
    def key(self) -> TermKey:
        return (self.sigma, self.tau)

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        """Values with shape (modes,) + s.shape."""
        s = np.asarray(s, dtype=float)
        base = np.exp(-self.tau.value * s)
        if self.sigma:
            base = s**self.sigma * base
        return np.multiply.outer(self.coeff, base)


def _merge(terms: Iterable[PolyTerm], modes: int) -> Tuple[PolyTerm, ...]:
    totals: Dict[TermKey, np.ndarray] = {}
    magnitudes: Dict[TermKey, np.ndarray] = defaultdict(lambda: np.zeros(modes))
    for term in terms:
        if term.coeff.size != modes:
            raise ValueError(f"term has {term.coeff.size} modes, series has {modes}")
        totals[term.key] = totals.get(term.key, np.zeros(modes)) + term.coeff
        magnitudes[term.key] = magnitudes[term.key] + np.abs(term.coeff)
    merged = []
    for key, total in totals.items():
        # Drop entries that cancel to rounding level of their contributions.
        total = np.where(np.abs(total) <= CANCELLATION_RTOL * magnitudes[key], 0.0, total)
        if np.any(total != 0.0):
            merged.append(PolyTerm(key[0], key[1], total))
    merged.sort(key=lambda t: (t.tau.value, t.sigma))
    return tuple(merged)


class PolySeries:
    """
    Sorted sum of PolyTerms with structurally distinct (sigma, tau).

    The weight floor is the smallest tau present; the empty series has
    floor None.
    """

    __slots__ = ("terms", "modes")

    def __init__(self, terms: Iterable[PolyTerm] = (), modes: int = 1):
        if modes < 1:
            raise ValueError(f"series needs at least one mode, got {modes}")
        self.modes: int = modes
        self.terms: Tuple[PolyTerm, ...] = _merge(terms, modes)

    # Construction

    @classmethod
    def zero(cls, modes: int = 1) -> "PolySeries":
        return cls((), modes)

    @classmethod
    def monomial(
        cls,
        coeff: float,
        tau: ExactLike,
        sigma: int = 0,
        mode: int = 0,
        modes: int = 1,
    ) -> "PolySeries":
        """coeff * s^sigma * e^{-tau s} placed in one mode."""
        vector = np.zeros(modes)
        vector[mode] = coeff
        return cls([PolyTerm(sigma, as_weight(tau), vector)], modes)

    @classmethod
    def from_components(cls, components: Sequence["PolySeries"]) -> "PolySeries":
        """Stack scalar series into one multi-mode series."""
        modes = len(components)
        terms = []
        for index, component in enumerate(components):
            for term in component.terms:
                vector = np.zeros(modes)
                vector[index] = term.coeff[0]
                terms.append(PolyTerm(term.sigma, term.tau, vector))
        return cls(terms, modes)

    # Inspection

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def floor(self) -> Optional[ExactWeight]:
        return self.terms[0].tau if self.terms else None

    @property
    def weights(self) -> List[ExactWeight]:
        seen: List[ExactWeight] = []
        for term in self.terms:
            if not seen or seen[-1] != term.tau:
                seen.append(term.tau)
        return seen

    @property
    def max_sigma(self) -> int:
        return max((term.sigma for term in self.terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((float(np.max(np.abs(term.coeff))) for term in self.terms), default=0.0)

    def coefficient(self, sigma: int, tau: ExactLike) -> np.ndarray:
        """Coefficient vector of s^sigma e^{-tau s}; zeros when absent."""
        key = (sigma, as_weight(tau))
        for term in self.terms:
            if term.key == key:
                return np.array(term.coeff)
        return np.zeros(self.modes)

    def component(self, mode: int) -> "PolySeries":
        """Scalar series of one mode."""
        return PolySeries(
            (PolyTerm(t.sigma, t.tau, t.coeff[mode : mode + 1]) for t in self.terms), 1
        )

    def extract_component(self, alpha: ExactLike) -> "PolySeries":
        """[u]_alpha: all terms whose weight equals alpha structurally."""
        alpha = as_weight(alpha)
        return PolySeries((t for t in self.terms if t.tau == alpha), self.modes)

    def without_component(self, alpha: ExactLike) -> "PolySeries":
        alpha = as_weight(alpha)
        return PolySeries((t for t in self.terms if t.tau != alpha), self.modes)

    # Algebra

    def _check_modes(self, other: "PolySeries") -> None:
        if other.modes != self.modes:
            raise ValueError(f"mode mismatch: {self.modes} vs {other.modes}")

    def __add__(self, other: "PolySeries") -> "PolySeries":
        self._check_modes(other)
        return PolySeries(self.terms + other.terms, self.modes)

    def __neg__(self) -> "PolySeries":
        return self.scale(-1.0)

    def __sub__(self, other: "PolySeries") -> "PolySeries":
        return self + (-other)

    def scale(self, factor: Any) -> "PolySeries":
        """Multiply by a scalar or by a per-mode vector."""
        factor = np.asarray(factor, dtype=float)
        return PolySeries(
            (PolyTerm(t.sigma, t.tau, t.coeff * factor) for t in self.terms), self.modes
        )

    def __mul__(self, other: Any) -> "PolySeries":
        if isinstance(other, PolySeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def mode_sum(self) -> "PolySeries":
        """Scalar series sum_j u_j."""
        return PolySeries(
            (PolyTerm(t.sigma, t.tau, [float(np.sum(t.coeff))]) for t in self.terms), 1
        )

    def broadcast(self, weights: Sequence[float]) -> "PolySeries":
        """Scalar series times a vector of per-mode factors."""
        if self.modes != 1:
            raise ValueError("broadcast expects a scalar series")
        vector = np.asarray(weights, dtype=float)
        return PolySeries(
            (PolyTerm(t.sigma, t.tau, t.coeff[0] * vector) for t in self.terms), vector.size
        )

    def derivative(self) -> "PolySeries":
        """d/ds, termwise."""
        terms = []
        for t in self.terms:
            terms.append(PolyTerm(t.sigma, t.tau, -t.tau.value * t.coeff))
            if t.sigma:
                terms.append(PolyTerm(t.sigma - 1, t.tau, t.sigma * t.coeff))
        return PolySeries(terms, self.modes)

    # Evaluation and export

    def evaluate(self, s: Any) -> np.ndarray:
        """Values with shape (modes,) + shape(s)."""
        s = np.asarray(s, dtype=float)
        total = np.zeros((self.modes,) + s.shape)
        for term in self.terms:
            total = total + term.evaluate(s)
        return total

    def to_records(self) -> List[Dict[str, Any]]:
        records = []
        for t in self.terms:
            coeff: Any = float(t.coeff[0]) if self.modes == 1 else [float(c) for c in t.coeff]
            records.append(
                {"sigma": t.sigma, "tau_expr": str(t.tau), "tau_value": t.tau.value, "coeff": coeff}
            )
        return records

    def __repr__(self) -> str:
        if not self.terms:
            return "PolySeries(0)"
        parts = []
        for t in self.terms:
            if self.modes == 1:
                coeff = f"{t.coeff[0]:.6g}"
            else:
                coeff = np.array2string(t.coeff, precision=6)
            power = f" s^{t.sigma}" if t.sigma else ""
            parts.append(f"{coeff}{power} e^(-({t.tau}) s)")
        return "PolySeries(" + " + ".join(parts) + ")"


def series_mul(a: PolySeries, b: PolySeries) -> PolySeries:
    """Termwise product, modewise on the coefficients."""
    a._check_modes(b)
    tau_sums: Dict[Tuple[ExactWeight, ExactWeight], ExactWeight] = {}
    terms = []
    for x in a.terms:
        for y in b.terms:
            pair = (x.tau, y.tau)
            if pair not in tau_sums:
                tau_sums[pair] = x.tau + y.tau
            terms.append(PolyTerm(x.sigma + y.sigma, tau_sums[pair], x.coeff * y.coeff))
    return PolySeries(terms, a.modes)


def extract_component(u: PolySeries, alpha: ExactLike) -> PolySeries:
    return u.extract_component(alpha)
