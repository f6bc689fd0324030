from typing import Any, Dict, List

from pydantic import BaseModel, Field, field_validator

from .error import ErrorReport

SUMMARY_SCHEMA_VERSION = "1.0"


class AssumptionReport(BaseModel):
    """Outcome of checking a warp against the structural assumptions on phi."""

    warp: str
    passed: bool
    sup_log_derivative: float
    inf_phi_tail: float
    curvature_bound: float
    inf_phi_over_r: float
    phi_at_origin: float
    dphi_at_origin: float
    diagnostics: List[str] = Field(default_factory=list)


class RatioRecord(BaseModel):
    """One ensemble member of a weighted Strichartz ratio sweep."""

    n: int
    p: float
    q: float
    family: str
    T: float
    member: int
    ratio: float
    raw_ratio: float
    unweighted_ratio: float
    theta: float
    sobolev_s: float
    grid_tag: str
    seed: int

    @field_validator("ratio", "raw_ratio", "unweighted_ratio")
    @classmethod
    def ratio_must_be_finite(cls, value: float) -> float:
        if not (value >= 0 and value < float("inf")):
            raise ValueError(f"ratio must be finite and non-negative, got {value}")
        return value


class ExperimentResult(BaseModel):
    """What every experiment runner returns; ``rows`` become the CSV file."""

    name: str
    kind: str
    passed: bool = False
    columns: List[str] = Field(default_factory=list)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    headline: Dict[str, float | int | bool | str | None] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    refinement: Dict[str, float | None] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    error: ErrorReport | None = None
    wall_time_s: float = 0.0


class ExperimentSummary(BaseModel):
    name: str
    kind: str
    passed: bool
    csv: str | None = None
    headline: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    refinement: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    error: ErrorReport | None = None
    wall_time_s: float = 0.0


class RunSummary(BaseModel):
    """Schema of summary.json."""

    schema_version: str = SUMMARY_SCHEMA_VERSION
    package_version: str
    run_id: str
    seed: int
    threads: int
    config: Dict[str, Any]
    experiments: List[ExperimentSummary] = Field(default_factory=list)
    all_passed: bool = True
    wall_time_s: float = 0.0
