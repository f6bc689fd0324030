"""
Run configuration models.

Structural checks (types, ranges, unknown keys, admissibility) are pydantic
validators; checks that need the resolved warp and grid together are collected
by ``RunConfig.constraint_reports``.
"""

import math
from enum import Enum
from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_core import PydanticCustomError

from ..exceptions import DiracWarpError
from ..fields import RadialGrid
from ..manifold import (
    WarpFunction,
    builtin_warps,
    check_assumptions,
    odd_polynomial_warp,
    warp_by_name,
)
from ..nonlinear import DensityKind
from ..norms import MixedNormSpec, NormFamily, validate_admissible
from .error import ErrorCode, ErrorDetails, ErrorReport

# radius covering the Gaussian-bump ensembles (r0 <= 3, width <= 0.8, three widths)
ENSEMBLE_SUPPORT = 5.4


class Scheme(str, Enum):
    CRANK_NICOLSON = "crank-nicolson"
    SPECTRAL = "spectral-exponential"


class ExperimentKind(str, Enum):
    ALGEBRA = "algebra"
    STRICHARTZ = "strichartz"
    POTENTIAL_BOUND = "potential_bound"
    SIGMA_CONTINUITY = "sigma_continuity"
    ISOMETRY = "isometry"
    CONJUGATION = "conjugation"
    SPECTRAL = "spectral"
    UNITARITY = "unitarity"
    DUHAMEL = "duhamel"
    INVARIANCE = "invariance"
    CONTRACTION = "contraction"


# experiments whose data travel and must not reach R_max within the horizon
PROPAGATING_KINDS = {
    ExperimentKind.STRICHARTZ,
    ExperimentKind.DUHAMEL,
    ExperimentKind.INVARIANCE,
    ExperimentKind.CONTRACTION,
}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(StrictModel):
    N: int = Field(default=400, ge=3)
    dr: float = Field(default=0.025, gt=0)

    def to_grid(self) -> RadialGrid:
        return RadialGrid(self.N, self.dr)


class EvolutionConfig(StrictModel):
    dt: float = Field(default=0.01, gt=0)
    T: float = Field(default=1.0, gt=0)
    sample_stride: int = Field(default=10, ge=1)
    scheme: Scheme = Scheme.CRANK_NICOLSON

    @model_validator(mode="after")
    def horizon_covers_a_step(self):
        if self.T < self.dt:
            raise PydanticCustomError(
                "config_constraint", "T={T} is shorter than dt={dt}", {"T": self.T, "dt": self.dt}
            )
        return self


class NormSpecConfig(StrictModel):
    p: float
    q: float
    family: NormFamily = NormFamily.MASSLESS
    weight_exponent: float | None = None

    @model_validator(mode="after")
    def admissible(self):
        verdict = validate_admissible(self.p, self.q, self.family)
        if not verdict:
            raise PydanticCustomError(
                "admissibility", "admissibility: {reason}", {"reason": verdict.reason}
            )
        return self

    def to_spec(self, T: float | None = None) -> MixedNormSpec:
        return MixedNormSpec(self.p, self.q, self.family, self.weight_exponent, T)


class WarpConfig(StrictModel):
    """Either a built-in warp ``name`` or odd-power ``coefficients`` (c0 r + c1 r^3 + ...)."""

    name: str | None = None
    coefficients: List[float] | None = None

    @model_validator(mode="after")
    def exactly_one_source(self):
        if (self.name is None) == (self.coefficients is None):
            raise PydanticCustomError(
                "config_constraint", "give exactly one of 'name' or 'coefficients'"
            )
        if self.name is not None and self.name not in {w.name for w in builtin_warps()}:
            raise PydanticCustomError(
                "config_constraint",
                "unknown warp '{name}' (known: {known})",
                {"name": self.name, "known": ", ".join(w.name for w in builtin_warps())},
            )
        if self.coefficients is not None and (
            not self.coefficients or not all(math.isfinite(c) for c in self.coefficients)
        ):
            raise PydanticCustomError(
                "config_constraint", "coefficients must be a non-empty list of finite numbers"
            )
        return self

    def to_warp(self) -> WarpFunction:
        if self.name is not None:
            return warp_by_name(self.name)
        return odd_polynomial_warp(self.coefficients)


class ExperimentSpec(StrictModel):
    """One experiment; unset sections fall back to the run-level ones."""

    kind: ExperimentKind
    name: str | None = None
    warp: WarpConfig | None = None
    grid: GridConfig | None = None
    evolution: EvolutionConfig | None = None
    m: float = Field(default=0.0, ge=0)
    n_min: int = Field(default=0, ge=0)
    n_max: int = Field(default=8, ge=0)
    norms: List[NormSpecConfig] = Field(default_factory=list)
    ensemble: int = Field(default=20, ge=1)
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    tolerance: float | None = Field(default=None, gt=0)
    exponents: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    densities: List[DensityKind] = Field(
        default_factory=lambda: [DensityKind.CHARGE, DensityKind.MASS]
    )
    j_max: float | None = Field(default=None, gt=0)
    q_values: List[float] = Field(default_factory=lambda: [2.0, 4.0, 6.0, 12.0])
    amplitudes: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    T_cap: float = Field(default=2.0, gt=0)
    picard_tol: float = Field(default=1e-9, gt=0)
    margin: float = Field(default=1.0, ge=0)
    refine: bool = True
    waive_assumptions: bool = False

    @field_validator("exponents", "amplitudes", "q_values")
    @classmethod
    def positive_entries(cls, values: List[float]) -> List[float]:
        if not values or any(not (v > 0) for v in values):
            raise PydanticCustomError(
                "config_constraint", "entries must be positive and the list non-empty"
            )
        return values

    @field_validator("j_max")
    @classmethod
    def half_integer(cls, value: float | None) -> float | None:
        if value is None:
            return value
        twice = 2 * value
        if abs(twice - round(twice)) > 1e-12 or round(twice) % 2 != 1:
            raise PydanticCustomError("config_constraint", "j_max must be a half-integer")
        return value

    @model_validator(mode="after")
    def mode_range(self):
        if self.n_max < self.n_min:
            raise PydanticCustomError(
                "config_constraint",
                "n_max={n_max} is below n_min={n_min}",
                {"n_max": self.n_max, "n_min": self.n_min},
            )
        return self

    @property
    def label(self) -> str:
        return self.name or self.kind.value


class RunConfig(StrictModel):
    experiments: List[ExperimentSpec] = Field(default_factory=list)
    warp: WarpConfig = Field(default_factory=lambda: WarpConfig(name="flat"))
    grid: GridConfig = Field(default_factory=GridConfig)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    seed: int = Field(default=0, ge=0, lt=2**64)
    output_dir: str = "results"

    @model_validator(mode="after")
    def unique_names(self):
        labels = [spec.label for spec in self.experiments]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise PydanticCustomError(
                "config_constraint",
                "experiment names must be unique, repeated: {names}",
                {"names": ", ".join(duplicates)},
            )
        return self

    def warp_for(self, spec: ExperimentSpec) -> WarpConfig:
        return spec.warp or self.warp

    def grid_for(self, spec: ExperimentSpec) -> GridConfig:
        return spec.grid or self.grid

    def evolution_for(self, spec: ExperimentSpec) -> EvolutionConfig:
        return spec.evolution or self.evolution

    def seed_for(self, spec: ExperimentSpec) -> int:
        return self.seed if spec.seed is None else spec.seed

    def constraint_reports(self, positions: Sequence[int] | None = None) -> List[ErrorReport]:
        """
        Cross-section checks: warp assumptions on the grid and the R_max margin.

        ``positions`` maps each experiment to its index in the source document.
        """
        reports: List[ErrorReport] = []
        for position, spec in enumerate(self.experiments):
            location = f"experiments.{positions[position] if positions else position}"
            grid = self.grid_for(spec).to_grid()
            if not spec.waive_assumptions:
                try:
                    report = check_assumptions(self.warp_for(spec).to_warp(), grid)
                except DiracWarpError as exc:
                    reports.append(
                        ErrorReport(
                            error_code=exc.code,
                            message=exc.message,
                            details=ErrorDetails(location=f"{location}.warp"),
                        )
                    )
                    continue
                if not report.passed:
                    reports.append(
                        ErrorReport(
                            error_code=ErrorCode.CONFIG_CONSTRAINT,
                            message=f"warp '{report.warp}' fails the assumptions: "
                            + "; ".join(report.diagnostics),
                            details=ErrorDetails(
                                location=f"{location}.warp",
                                suggestions=["Set waive_assumptions: true for counterexample runs"],
                            ),
                        )
                    )
            if spec.kind in PROPAGATING_KINDS:
                horizon = self.evolution_for(spec).T
                if spec.kind == ExperimentKind.CONTRACTION:
                    horizon = spec.T_cap
                needed = ENSEMBLE_SUPPORT + horizon + spec.margin
                if grid.r_max < needed:
                    reports.append(
                        ErrorReport(
                            error_code=ErrorCode.INSUFFICIENT_DOMAIN,
                            message=(
                                f"R_max={grid.r_max:g} is too small for data support "
                                f"{ENSEMBLE_SUPPORT:g} over T={horizon:g} "
                                f"with margin {spec.margin:g}."
                            ),
                            details=ErrorDetails(location=f"{location}.grid", value=grid.r_max),
                        )
                    )
        return reports
