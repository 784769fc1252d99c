"""
Error taxonomy for the hyperbolic toolkit.

Domain errors also subclass ValueError so callers can keep a single
``except ValueError`` around model evaluation.
"""

from typing import List, Optional


class HyperPhgError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HyperPhgError, ValueError):
    """Point outside the validity domain of its chart."""


class IllConditionedMetricError(HyperPhgError, ValueError):
    """Metric inverse requested at a point where the matrix is nearly singular."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"metric condition number {condition:.3e} exceeds limit")


class DegeneratePlaneError(HyperPhgError, ValueError):
    """Sectional curvature requested on a (nearly) degenerate plane."""


class UnsupportedChartError(HyperPhgError, ValueError):
    """Operation needs structure the chart does not expose."""


class WeightRangeError(HyperPhgError, ValueError):
    """Weight exponents outside the admissible range."""

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        message = f"weight hypothesis violated: {inequality}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class UnsupportedShiftError(HyperPhgError, ValueError):
    """Negative spectral shift; the weighted estimates are not available there."""


class ComplexIndicialError(HyperPhgError, ValueError):
    """Indicial roots are not real."""


class ExactArithmeticError(HyperPhgError, ValueError):
    """Expression outside the rational span of square roots."""


class ResonanceDomainError(HyperPhgError, ValueError):
    """G_inf applied to a weight at or below the upper critical weight."""


class OutOfRangeError(HyperPhgError, ValueError):
    """G_0 applied to a weight outside ]alpha_-, alpha_+]."""


class MonoidError(HyperPhgError, ValueError):
    """Invalid generator set or weight outside the monoid."""


class LadderExhaustedError(HyperPhgError):
    """Ladder rung requested beyond the enumerated monoid."""


class ResonanceBookkeepingError(HyperPhgError):
    """A residual component survived a correction step."""

    def __init__(self, weight: str, step: int):
        self.weight = weight
        self.step = step
        super().__init__(f"residual component at weight {weight} not cancelled at step {step}")


class QuadratureError(HyperPhgError, ValueError):
    """Sampled input does not decay fast enough for the G_inf quadrature."""

    def __init__(self, measured_slope: float, required: float):
        self.measured_slope = measured_slope
        self.required = required
        super().__init__(
            f"insufficient decay: measured tail slope {measured_slope:.6g}, "
            f"need slope below {-required:.6g}"
        )


class NonConvergenceError(HyperPhgError):
    """ODE solver did not converge."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (final residual {residual:.3e})"
        super().__init__(message)


class ConfigError(HyperPhgError, ValueError):
    """Run configuration could not be parsed or validated."""

    def __init__(self, message: str, problems: Optional[List[str]] = None):
        self.problems = problems or []
        if self.problems:
            message = message + ": " + "; ".join(self.problems)
        super().__init__(message)
