"""
Unit tests for the configuration models and error templates
"""

import pytest
from pydantic import ValidationError

from dirac_warp.models.config import (
    ENSEMBLE_SUPPORT,
    EvolutionConfig,
    ExperimentKind,
    ExperimentSpec,
    GridConfig,
    NormSpecConfig,
    RunConfig,
    Scheme,
    WarpConfig,
)
from dirac_warp.models.error import ErrorCode, ErrorDetails, get_error_message
from dirac_warp.norms import NormFamily


def _error_types(exc_info):
    return [e["type"] for e in exc_info.value.errors()]


class TestSections:
    """Test the grid, evolution and norm sections"""

    @pytest.mark.unit
    def test_defaults(self):
        config = RunConfig()
        assert config.experiments == []
        assert config.warp.name == "flat"
        assert (config.grid.N, config.grid.dr) == (400, 0.025)
        assert config.evolution.scheme == Scheme.CRANK_NICOLSON
        assert config.output_dir == "results"

    @pytest.mark.unit
    def test_grid_to_grid(self):
        grid = GridConfig(N=160, dr=0.05).to_grid()
        assert grid.N == 160
        assert grid.r_max == pytest.approx(8.0)

    @pytest.mark.unit
    @pytest.mark.parametrize("values", [{"N": 2}, {"dr": 0.0}, {"dr": -0.1}])
    def test_grid_rejects(self, values):
        with pytest.raises(ValidationError):
            GridConfig(**values)

    @pytest.mark.unit
    def test_horizon_shorter_than_step(self):
        with pytest.raises(ValidationError) as exc_info:
            EvolutionConfig(dt=0.1, T=0.05)
        assert _error_types(exc_info) == ["config_constraint"]

    @pytest.mark.unit
    def test_scheme_from_string(self):
        assert EvolutionConfig(scheme="spectral-exponential").scheme == Scheme.SPECTRAL

    @pytest.mark.unit
    def test_admissible_norm(self):
        spec = NormSpecConfig(p=4, q=4).to_spec(T=2.0)
        assert spec.family == NormFamily.MASSLESS
        assert spec.T == 2.0

    @pytest.mark.unit
    def test_inadmissible_norm(self):
        """(3, 3) misses 2/p + 2/q = 1"""
        with pytest.raises(ValidationError) as exc_info:
            NormSpecConfig(p=3, q=3)
        assert _error_types(exc_info) == ["admissibility"]
        assert "admissibility" in exc_info.value.errors()[0]["msg"]

    @pytest.mark.unit
    def test_massive_family(self):
        spec = NormSpecConfig(p=2, q=6, family="massive").to_spec()
        assert spec.family == NormFamily.MASSIVE


class TestWarpConfig:
    """Test warp selection"""

    @pytest.mark.unit
    def test_builtin_name(self):
        assert WarpConfig(name="hyperbolic").to_warp().name == "hyperbolic"

    @pytest.mark.unit
    def test_coefficients(self):
        warp = WarpConfig(coefficients=[1.0, 0.1]).to_warp()
        assert warp.phi(1.0) == pytest.approx(1.1)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "values",
        [{}, {"name": "flat", "coefficients": [1.0]}, {"name": "torus"}, {"coefficients": []}],
        ids=["neither", "both", "unknown", "empty"],
    )
    def test_rejects(self, values):
        with pytest.raises(ValidationError) as exc_info:
            WarpConfig(**values)
        assert _error_types(exc_info) == ["config_constraint"]

    @pytest.mark.unit
    def test_unknown_name_lists_known(self):
        with pytest.raises(ValidationError) as exc_info:
            WarpConfig(name="torus")
        assert "hyperbolic" in exc_info.value.errors()[0]["msg"]


class TestExperimentSpec:
    """Test per-experiment validation"""

    @pytest.mark.unit
    def test_label_defaults_to_kind(self):
        assert ExperimentSpec(kind="algebra").label == "algebra"
        assert ExperimentSpec(kind="algebra", name="clifford").label == "clifford"

    @pytest.mark.unit
    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            ExperimentSpec(kind="scattering")

    @pytest.mark.unit
    def test_unknown_key(self):
        with pytest.raises(ValidationError) as exc_info:
            ExperimentSpec(kind="algebra", colour="blue")
        assert _error_types(exc_info) == ["extra_forbidden"]

    @pytest.mark.unit
    @pytest.mark.parametrize("j_max", [1.5, 0.5, 7.5])
    def test_half_integer_j_max(self, j_max):
        assert ExperimentSpec(kind="spectral", j_max=j_max).j_max == j_max

    @pytest.mark.unit
    @pytest.mark.parametrize("j_max", [1.0, 1.25, 2.0])
    def test_rejects_integer_j_max(self, j_max):
        with pytest.raises(ValidationError):
            ExperimentSpec(kind="spectral", j_max=j_max)

    @pytest.mark.unit
    def test_mode_range(self):
        with pytest.raises(ValidationError) as exc_info:
            ExperimentSpec(kind="potential_bound", n_min=4, n_max=2)
        assert "n_max=2" in exc_info.value.errors()[0]["msg"]

    @pytest.mark.unit
    @pytest.mark.parametrize("field", ["exponents", "amplitudes", "q_values"])
    def test_positive_lists(self, field):
        with pytest.raises(ValidationError):
            ExperimentSpec(kind="invariance", **{field: [1.0, -2.0]})
        with pytest.raises(ValidationError):
            ExperimentSpec(kind="invariance", **{field: []})

    @pytest.mark.unit
    def test_negative_mass(self):
        with pytest.raises(ValidationError):
            ExperimentSpec(kind="unitarity", m=-1.0)


class TestRunConfig:
    """Test run-level resolution and cross-section checks"""

    @pytest.mark.unit
    def test_duplicate_names(self):
        with pytest.raises(ValidationError) as exc_info:
            RunConfig(experiments=[{"kind": "algebra"}, {"kind": "algebra"}])
        assert "algebra" in exc_info.value.errors()[0]["msg"]

    @pytest.mark.unit
    def test_named_duplicates_allowed_by_kind(self):
        config = RunConfig(
            experiments=[{"kind": "algebra", "name": "a"}, {"kind": "algebra", "name": "b"}]
        )
        assert [s.label for s in config.experiments] == ["a", "b"]

    @pytest.mark.unit
    def test_sections_fall_back_to_run_level(self):
        config = RunConfig(
            warp={"name": "hyperbolic"},
            seed=7,
            experiments=[
                {"kind": "algebra"},
                {"kind": "spectral", "warp": {"name": "conical"}, "seed": 3},
            ],
        )
        first, second = config.experiments
        assert config.warp_for(first).name == "hyperbolic"
        assert config.warp_for(second).name == "conical"
        assert config.seed_for(first) == 7
        assert config.seed_for(second) == 3
        assert config.grid_for(second) is config.grid
        assert config.evolution_for(second) is config.evolution

    @pytest.mark.unit
    def test_valid_config_has_no_reports(self):
        config = RunConfig(experiments=[{"kind": "algebra"}, {"kind": "strichartz"}])
        assert config.constraint_reports() == []

    @pytest.mark.unit
    def test_failing_warp(self):
        config = RunConfig(warp={"name": "sin"}, experiments=[{"kind": "algebra"}])
        reports = config.constraint_reports()
        assert len(reports) == 1
        assert reports[0].error_code == ErrorCode.CONFIG_CONSTRAINT
        assert reports[0].details.location == "experiments.0.warp"
        assert "positivity" in reports[0].message

    @pytest.mark.unit
    def test_waived_assumptions(self):
        config = RunConfig(
            warp={"name": "sin"}, experiments=[{"kind": "algebra", "waive_assumptions": True}]
        )
        assert config.constraint_reports() == []

    @pytest.mark.unit
    def test_insufficient_domain(self):
        """R_max = 5 cannot hold the ensemble over T = 1 with margin 1"""
        config = RunConfig(grid={"N": 200, "dr": 0.025}, experiments=[{"kind": "duhamel"}])
        reports = config.constraint_reports()
        assert [r.error_code for r in reports] == [ErrorCode.INSUFFICIENT_DOMAIN]
        assert reports[0].details.location == "experiments.0.grid"
        assert reports[0].details.value == pytest.approx(5.0)

    @pytest.mark.unit
    def test_locations_follow_source_positions(self):
        config = RunConfig(grid={"N": 200, "dr": 0.025}, experiments=[{"kind": "duhamel"}])
        reports = config.constraint_reports(positions=[2])
        assert reports[0].details.location == "experiments.2.grid"

    @pytest.mark.unit
    def test_static_kinds_ignore_domain(self):
        config = RunConfig(grid={"N": 200, "dr": 0.025}, experiments=[{"kind": "algebra"}])
        assert config.constraint_reports() == []

    @pytest.mark.unit
    def test_contraction_uses_cap(self):
        needed = ENSEMBLE_SUPPORT + 4.0 + 1.0
        config = RunConfig(
            experiments=[{"kind": "contraction", "T_cap": 4.0}],
            grid={"N": 400, "dr": 0.025},
        )
        assert config.grid.to_grid().r_max < needed
        assert [r.error_code for r in config.constraint_reports()] == [
            ErrorCode.INSUFFICIENT_DOMAIN
        ]

    @pytest.mark.unit
    def test_all_problems_collected(self):
        config = RunConfig(
            warp={"name": "sin"},
            grid={"N": 200, "dr": 0.025},
            experiments=[{"kind": "invariance"}, {"kind": "algebra", "name": "other"}],
        )
        codes = [r.error_code for r in config.constraint_reports()]
        assert codes.count(ErrorCode.CONFIG_CONSTRAINT) == 2
        assert codes.count(ErrorCode.INSUFFICIENT_DOMAIN) == 1

    @pytest.mark.unit
    def test_kinds_enumerated(self):
        assert len(ExperimentKind) == 11


class TestErrorMessages:
    """Test the message templates"""

    @pytest.mark.unit
    def test_simple_template(self):
        message = get_error_message(ErrorCode.CONFIG_UNKNOWN_KEY, key="colour")
        assert message == "Unknown configuration key 'colour'."

    @pytest.mark.unit
    def test_context_template(self):
        message = get_error_message(ErrorCode.INVALID_INDEX, "harmonic", l=1, m=2)
        assert "l=1" in message

    @pytest.mark.unit
    def test_missing_arguments_keep_template(self):
        message = get_error_message(ErrorCode.BLOW_UP)
        assert "{time}" in message

    @pytest.mark.unit
    def test_details_content(self):
        assert not ErrorDetails().has_content()
        assert ErrorDetails(location="grid").has_content()
