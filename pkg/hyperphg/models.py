"""
Pydantic data models for run configuration and machine-readable reports.
Provides validation and serialization for everything that crosses the CLI.
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, computed_field, field_validator
from pydantic.config import ConfigDict

from .constants import (
    BOX_EPSILON,
    CURVATURE_TOL,
    DEFAULT_MAX_WORKERS,
    DEFAULT_RESOLUTION,
    DEFAULT_S0,
    FOLIATION_TOL,
    LIMIT_TOL,
    PULLBACK_TOL_FD,
    REPORT_SCHEMA_VERSION,
    SLOPE_REL_TOL,
    WEIGHT_TOL,
)
from .exact import ExactWeight


class GeometryKind(str, Enum):
    """Real or complex hyperbolic model."""

    REAL = "real"
    COMPLEX = "complex"


class CommandName(str, Enum):
    """CLI commands."""

    VERIFY_METRIC = "verify-metric"
    CURVATURE_REPORT = "curvature-report"
    WEIGHT_SCAN = "weight-scan"
    INDICIAL = "indicial"
    MONOID = "monoid"
    PHG_RUN = "phg-run"


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


# Weights


class WeightSpec(BaseModel):
    """Double weight cosh-powers: delta1 across the wall, delta2 along the slices."""

    model_config = ConfigDict(frozen=True)

    kind: GeometryKind
    dimension: int = Field(..., ge=2, description="n (real) or m (complex)")
    delta1: float
    delta2: float = 0.0

    @property
    def hessian_trace(self) -> int:
        """Mean-curvature limit H of the equidistant foliation: n-1 or m."""
        return self.dimension - 1 if self.kind == GeometryKind.REAL else self.dimension

    def violated_inequality(self) -> Optional[str]:
        """Name of the first admissibility inequality that fails, if any."""
        n = self.dimension
        if self.kind == GeometryKind.REAL:
            if not 0 < self.delta1 < n - 1:
                return f"0 < delta1 < n-1 = {n - 1}"
            if not 0 <= self.delta2 <= n - 2:
                return f"0 <= delta2 <= n-2 = {n - 2}"
            return None
        if not 0 < self.delta1 < n:
            return f"0 < delta1 < m = {n}"
        if not 0 <= self.delta2 <= n - 0.5:
            return f"0 <= delta2 <= m-1/2 = {n - 0.5}"
        if n == 2 and self.delta2 > 1.25:
            return "delta2 <= 5/4 when m = 2"
        return None


class ScanReport(BaseModel):
    """Grid-scan certificate for the weight functional."""

    infimum: float
    argmin: Dict[str, float]
    resolution: float
    domain: str
    passed: bool
    closed_box_infimum: float = Field(..., description="infimum with the box closed at 1")
    epsilon: float = BOX_EPSILON
    nodes: int = Field(..., ge=1)
    lower_bound_infimum: Optional[float] = Field(
        None, description="infimum of the classical lower-bound form of the functional"
    )


class ShiftedIntervalReport(BaseModel):
    """Weighted estimate for the shifted operator Delta + lambda."""

    lambda_shift: float = Field(..., ge=0)
    lower: float
    upper: float
    delta1_inside: bool
    scan: ScanReport

    @property
    def passed(self) -> bool:
        return self.delta1_inside and self.scan.passed


# Configuration sections


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Optional[CommandName] = None
    seed: int = 1
    output: Optional[str] = None
    sample_points: int = Field(100, gt=0)
    planes: int = Field(500, gt=0)
    curvature_points: int = Field(50, gt=0)
    max_workers: int = Field(DEFAULT_MAX_WORKERS, gt=0)


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    geometry: GeometryKind = GeometryKind.COMPLEX
    dimension: int = Field(2, ge=2, description="n for real, m for complex")


class WeightsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta1: float = 1.0
    delta2: float = 0.0
    lambda_shift: float = 0.0
    resolution: float = Field(DEFAULT_RESOLUTION, gt=0, le=0.5)
    admissible_grid: bool = Field(False, description="also certify the admissible grid")
    grid_size: int = Field(5, ge=2)

    @field_validator("delta1", "delta2", "lambda_shift", mode="before")
    @classmethod
    def parse_exact(cls, v: Any) -> Any:
        """Accept exact strings such as "5/4" or "1+sqrt(3)"."""
        if isinstance(v, str):
            return float(ExactWeight(v))
        return v


class IndicialSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spectrum: Optional[str] = Field(None, description="preset name")
    spectrum_file: Optional[str] = None
    hessian: Optional[str] = Field(None, description="exact H; defaults to n-1 or m")
    eigenvalues: List[str] = Field(default_factory=list)
    generators: List[str] = Field(default_factory=list)
    unit: Optional[str] = None
    bound: float = Field(3.1, gt=0)
    ladder_length: int = Field(4, ge=0)

    @field_validator("eigenvalues", "generators", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return _split_list(v)


class PhgSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str = "basic"
    hessian: str = "3"
    eigenvalues: List[str] = Field(default_factory=lambda: ["0"])
    quadratic: List[float] = Field(default_factory=lambda: [1.0])
    forcing: List[str] = Field(
        default_factory=lambda: ["0:1:0:4"], description="mode:coeff:sigma:tau terms"
    )
    generators: List[str] = Field(default_factory=lambda: ["1", "3"])
    steps: int = Field(4, ge=0)
    s0: float = Field(DEFAULT_S0, gt=0)

    @field_validator("eigenvalues", "quadratic", "forcing", "generators", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return _split_list(v)


class TolerancesSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pullback: float = Field(PULLBACK_TOL_FD, gt=0)
    curvature: float = Field(CURVATURE_TOL, gt=0)
    foliation: float = Field(FOLIATION_TOL, gt=0)
    weight: float = Field(WEIGHT_TOL, gt=0)
    limit: float = Field(LIMIT_TOL, gt=0)
    slope: float = Field(SLOPE_REL_TOL, gt=0)


class RunConfig(BaseModel):
    """Complete, validated configuration of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    run: RunSection = Field(default_factory=RunSection)
    model: ModelSection = Field(default_factory=ModelSection)
    weights: WeightsSection = Field(default_factory=WeightsSection)
    indicial: IndicialSection = Field(default_factory=IndicialSection)
    phg: PhgSection = Field(default_factory=PhgSection)
    tolerances: TolerancesSection = Field(default_factory=TolerancesSection)

    @property
    def is_complex(self) -> bool:
        return self.model.geometry == GeometryKind.COMPLEX

    def weight_spec(self) -> WeightSpec:
        return WeightSpec(
            kind=self.model.geometry,
            dimension=self.model.dimension,
            delta1=self.weights.delta1,
            delta2=self.weights.delta2,
        )


# Reports


class CheckResult(BaseModel):
    """One verified property: expected vs observed within a tolerance."""

    name: str
    kind: Literal["check", "diagnostic"] = "check"
    expected: Any = None
    observed: Any = None
    tolerance: Optional[float] = None
    passed: bool = True
    detail: Optional[str] = None


class Report(BaseModel):
    """Machine-readable outcome of a command."""

    schema_version: int = Field(REPORT_SCHEMA_VERSION, serialization_alias="schema")
    command: CommandName
    seed: int
    config: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict)
    wall_time_s: float = 0.0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks if check.kind == "check")

    def failed_checks(self) -> List[CheckResult]:
        return [check for check in self.checks if check.kind == "check" and not check.passed]
