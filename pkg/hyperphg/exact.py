"""
Exact weights: rational combinations of square roots of integers.

Weights enter resonance tests (tau == alpha_+) and monoid bookkeeping, so
equality must be structural. Every value is kept as an expanded sympy
expression of the form q0 + sum(q_k * sqrt(d_k)) with squarefree d_k, which
is a canonical form; the float value is cached for ordering.
"""

from fractions import Fraction
from typing import Any, Dict, Union

import sympy as sp

from .constants import EXACT_NUMERIC_DIGITS
from .exceptions import ExactArithmeticError

ExactLike = Union["ExactWeight", int, float, str, Fraction, sp.Expr]


def _is_radical(atom: sp.Expr) -> bool:
    return (
        isinstance(atom, sp.Pow)
        and atom.exp == sp.Rational(1, 2)
        and isinstance(atom.base, sp.Integer)
        and atom.base > 0
    )


def to_expr(value: Any) -> sp.Expr:
    """Convert a user value to an exact sympy expression (floats via their repr)."""
    if isinstance(value, ExactWeight):
        return value.expr
    if isinstance(value, bool):
        raise ExactArithmeticError("booleans are not weights")
    if isinstance(value, int):
        return sp.Integer(value)
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ExactArithmeticError(f"non-finite weight {value!r}")
        return sp.Rational(repr(value))
    if isinstance(value, str):
        try:
            return sp.sympify(value.strip(), rational=True)
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise ExactArithmeticError(f"cannot parse weight {value!r}") from exc
    if isinstance(value, sp.Expr):
        return value
    raise ExactArithmeticError(f"unsupported weight type {type(value).__name__}")


class ExactWeight:
    """Element of Q + Q*sqrt(d1) + Q*sqrt(d2) + ... with a cached float value."""

    __slots__ = ("expr", "value")

    def __init__(self, value: ExactLike = 0):
        expr = sp.expand(to_expr(value))
        for atom, coeff in expr.as_coefficients_dict().items():
            if not isinstance(coeff, sp.Rational):
                raise ExactArithmeticError(f"non-rational coefficient in {expr}")
            if atom != sp.S.One and not _is_radical(atom):
                raise ExactArithmeticError(f"{expr} is not a rational combination of square roots")
        self.expr: sp.Expr = expr
        self.value: float = float(sp.N(expr, EXACT_NUMERIC_DIGITS))

    @classmethod
    def sqrt(cls, radicand: ExactLike) -> "ExactWeight":
        """Square root of a nonnegative rational."""
        base = to_expr(radicand)
        if not isinstance(base, sp.Rational):
            raise ExactArithmeticError(f"square root of non-rational {base}")
        if base < 0:
            raise ExactArithmeticError(f"square root of negative {base}")
        return cls(sp.sqrt(base))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.expr, sp.Rational)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ExactArithmeticError(f"{self.expr} is irrational")
        rational = sp.Rational(self.expr)
        return Fraction(int(rational.p), int(rational.q))

    def to_dict(self) -> Dict[str, Any]:
        return {"expr": str(self), "value": self.value}

    # Arithmetic stays inside the module; products only with rationals.

    def __add__(self, other: ExactLike) -> "ExactWeight":
        return ExactWeight(self.expr + to_expr(other))

    __radd__ = __add__

    def __sub__(self, other: ExactLike) -> "ExactWeight":
        return ExactWeight(self.expr - to_expr(other))

    def __rsub__(self, other: ExactLike) -> "ExactWeight":
        return ExactWeight(to_expr(other) - self.expr)

    def __neg__(self) -> "ExactWeight":
        return ExactWeight(-self.expr)

    def __mul__(self, other: ExactLike) -> "ExactWeight":
        factor = to_expr(other)
        if not isinstance(factor, sp.Rational) and not self.is_rational:
            raise ExactArithmeticError("products of radicals are outside the weight module")
        return ExactWeight(self.expr * factor)

    __rmul__ = __mul__

    def __truediv__(self, other: ExactLike) -> "ExactWeight":
        divisor = to_expr(other)
        if not isinstance(divisor, sp.Rational) or divisor == 0:
            raise ExactArithmeticError(f"division by {divisor} outside the weight module")
        return ExactWeight(self.expr / divisor)

    # Structural equality; ordering by value.

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExactWeight):
            return bool(self.expr == other.expr)
        try:
            return self == ExactWeight(other)  # type: ignore[arg-type]
        except ExactArithmeticError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.expr)

    def __lt__(self, other: ExactLike) -> bool:
        other_w = other if isinstance(other, ExactWeight) else ExactWeight(other)
        return self != other_w and self.value < other_w.value

    def __le__(self, other: ExactLike) -> bool:
        other_w = other if isinstance(other, ExactWeight) else ExactWeight(other)
        return self == other_w or self.value < other_w.value

    def __gt__(self, other: ExactLike) -> bool:
        other_w = other if isinstance(other, ExactWeight) else ExactWeight(other)
        return self != other_w and self.value > other_w.value

    def __ge__(self, other: ExactLike) -> bool:
        other_w = other if isinstance(other, ExactWeight) else ExactWeight(other)
        return self == other_w or self.value > other_w.value

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return str(self.expr)

    def __repr__(self) -> str:
        return f"ExactWeight({self.expr})"


def as_weight(value: ExactLike) -> ExactWeight:
    return value if isinstance(value, ExactWeight) else ExactWeight(value)


ZERO = ExactWeight(0)
ONE = ExactWeight(1)
HALF = ExactWeight(sp.Rational(1, 2))
