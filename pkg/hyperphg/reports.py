"""
Report export module.
Writes command reports as versioned JSON and as CSV tables.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import orjson
import pandas as pd

from .constants import JSON_SIGNIFICANT_DIGITS
from .models import Report

CSV_FLOAT_FORMAT = f"%.{JSON_SIGNIFICANT_DIGITS}g"


def round_significant(value: Any, digits: int = JSON_SIGNIFICANT_DIGITS) -> Any:
    """Round every float inside nested containers to the given significant digits."""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value) or value == 0.0:
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, np.ndarray):
        return [round_significant(v, digits) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: round_significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(v, digits) for v in value]
    return value


def report_payload(report: Report, include_timing: bool = True) -> Dict[str, Any]:
    """JSON-ready dict with the schema key; timing can be dropped for run comparisons."""
    payload = report.model_dump(mode="json", by_alias=True)
    if not include_timing:
        payload.pop("wall_time_s", None)
    return round_significant(payload)


def report_to_json(report: Report, include_timing: bool = True) -> bytes:
    return orjson.dumps(
        report_payload(report, include_timing),
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )


def write_json(report: Report, path: Path) -> Path:
    """Write the report to path, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(report_to_json(report))
    return path


def create_checks_table(report: Report) -> pd.DataFrame:
    """One row per check."""
    rows = []
    for check in report.checks:
        rows.append(
            {
                "name": check.name,
                "kind": check.kind,
                "expected": _cell(check.expected),
                "observed": _cell(check.observed),
                "tolerance": check.tolerance,
                "passed": check.passed,
                "detail": check.detail or "",
            }
        )
    return pd.DataFrame(
        rows, columns=["name", "kind", "expected", "observed", "tolerance", "passed", "detail"]
    )


def create_grid_table(report: Report) -> Optional[pd.DataFrame]:
    grid = report.data.get("grid")
    return pd.DataFrame(grid) if grid else None


def create_admissible_grid_table(report: Report) -> Optional[pd.DataFrame]:
    """One row per certified (delta1, delta2) pair."""
    rows = report.data.get("admissible_grid")
    if not rows:
        return None
    return pd.DataFrame(rows, columns=["delta1", "delta2", "infimum", "passed"])


def create_floor_table(report: Report) -> Optional[pd.DataFrame]:
    """Residual floor against the ladder rung after each step."""
    result = report.data.get("result")
    if not result:
        return None
    rows = []
    for k, (rung, floor) in enumerate(zip(result["rungs"], result["floors"])):
        rows.append(
            {
                "step": k,
                "rung_expr": rung["expr"],
                "rung_value": rung["value"],
                "floor_expr": floor["expr"] if floor else None,
                "floor_value": floor["value"] if floor else None,
            }
        )
    return pd.DataFrame(rows)


def create_series_table(report: Report) -> Optional[pd.DataFrame]:
    """Terms of phi_K."""
    result = report.data.get("result")
    if not result:
        return None
    return pd.DataFrame(result["phi"], columns=["sigma", "tau_expr", "tau_value", "coeff"])


def create_monoid_table(report: Report) -> Optional[pd.DataFrame]:
    elements = report.data.get("elements")
    if not elements:
        return None
    return pd.DataFrame(
        {"expr": [e["expr"] for e in elements], "value": [e["value"] for e in elements]}
    )


def report_tables(report: Report) -> Dict[str, pd.DataFrame]:
    """All CSV tables available for a report, keyed by file stem suffix."""
    tables = {"checks": create_checks_table(report)}
    optional = {
        "grid": create_grid_table(report),
        "admissible_grid": create_admissible_grid_table(report),
        "floors": create_floor_table(report),
        "series": create_series_table(report),
        "monoid": create_monoid_table(report),
    }
    tables.update({name: df for name, df in optional.items() if df is not None})
    return tables


def export_csv(report: Report, directory: Path, stem: Optional[str] = None) -> List[Path]:
    """
    Write every table of the report as CSV.

    Args:
        report: Command report
        directory: Output directory, created if missing
        stem: File name prefix (defaults to the command name)

    Returns:
        Paths written
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or report.command.value
    paths = []
    for name, df in report_tables(report).items():
        path = directory / f"{stem}_{name}.csv"
        df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        paths.append(path)
    return paths


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict, tuple)):
        return orjson.dumps(round_significant(value)).decode()
    return value
