"""Structured results of verification runs and their serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class Report:
    check_name: str
    n_cases: int
    n_samples: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    pole_distance_min: Optional[float]
    wall_time_ms: int
    seed: Optional[int]

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "n_cases": self.n_cases,
            "n_samples": self.n_samples,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "pole_distance_min": self.pole_distance_min,
            "wall_time_ms": self.wall_time_ms,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        d = self.to_dict()
        header = ",".join(d.keys())
        row = ",".join(_csv_cell(v) for v in d.values())
        return header + "\n" + row + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def make_report(
    check_name: str,
    residuals: Sequence[float],
    tolerance: float,
    n_cases: int = 1,
    pole_distance_min: Optional[float] = None,
    seed: Optional[int] = None,
    wall_time_ms: int = 0,
    failed_reason: bool = False,
) -> Report:
    """Aggregate per-sample residuals into a Report.

    failed_reason forces pass=False regardless of residuals (used when a
    quadrature fails to converge: the check did not certify anything).
    """
    res = [float(r) for r in residuals]
    max_r = max(res) if res else 0.0
    mean_r = (sum(res) / len(res)) if res else 0.0
    passed = (max_r <= tolerance) and not failed_reason
    if pole_distance_min is not None and not math.isfinite(pole_distance_min):
        pole_distance_min = None
    return Report(
        check_name=check_name,
        n_cases=n_cases,
        n_samples=len(res),
        max_residual=max_r,
        mean_residual=mean_r,
        tolerance=tolerance,
        passed=passed,
        pole_distance_min=pole_distance_min,
        wall_time_ms=wall_time_ms,
        seed=seed,
    )


def combine_reports(reports: Sequence[Report], check_name: Optional[str] = None) -> Report:
    """Order-independent aggregation of several case reports."""
    if not reports:
        raise ValueError("no reports to combine")
    poles = [r.pole_distance_min for r in reports if r.pole_distance_min is not None]
    total_samples = sum(r.n_samples for r in reports)
    mean = (
        sum(r.mean_residual * r.n_samples for r in reports) / total_samples
        if total_samples
        else 0.0
    )
    return Report(
        check_name=check_name or reports[0].check_name,
        n_cases=sum(r.n_cases for r in reports),
        n_samples=total_samples,
        max_residual=max(r.max_residual for r in reports),
        mean_residual=mean,
        tolerance=reports[0].tolerance,
        passed=all(r.passed for r in reports),
        pole_distance_min=min(poles) if poles else None,
        wall_time_ms=sum(r.wall_time_ms for r in reports),
        seed=reports[0].seed,
    )
