"""
Unit tests for admissibility, L^q norms, mixed norms and Sobolev-type norms
"""

import math

import numpy as np
import pytest

from dirac_warp.angular import PartialWaveIndex
from dirac_warp.exceptions import AdmissibilityError, DimensionMismatchError, DomainError
from dirac_warp.fields import Measure, RadialSpinor, Representation, SpinorField, Trajectory
from dirac_warp.manifold import FLAT, HYPERBOLIC
from dirac_warp.models.error import ErrorCode
from dirac_warp.norms import (
    MixedNormSpec,
    NormFamily,
    h1_continuity_ratio,
    hab_norm,
    hs_norm,
    japanese_bracket,
    l2_aggregate,
    leibniz_bound,
    lq_norm,
    sigma_isometry_gap,
    strichartz_functional,
    validate_admissible,
)


def _g_field(grid, representation=Representation.G_PHI2):
    profile = np.exp(-((grid.r - 3.0) ** 2))
    return SpinorField(
        {
            PartialWaveIndex(0.5, 0.5, 1): RadialSpinor(profile, 0.5 * profile, representation),
            PartialWaveIndex(1.5, -0.5, -2): RadialSpinor(
                0.2j * profile, np.zeros(grid.N), representation
            ),
        }
    )


class TestAdmissibility:
    """Test the admissibility rules for (p, q)"""

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "p,q,family",
        [
            (4, 4, "massless"),
            (math.inf, 2, "massless"),
            (3, 6, "massless"),
            (math.inf, 2, "massive"),
            (2, 6, "massive"),
            (4, 3, "massive"),
        ],
    )
    def test_admissible(self, p, q, family):
        assert validate_admissible(p, q, family)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "p,q,family,reason",
        [
            (3, 3, "massless", "2/3+2/3 ≠ 1"),
            (2, math.inf, "massless", "p=2 must exceed 2 for massless pairs"),
            (4, 4, "massive", "2/4+3/4 ≠ 3/2"),
            (4 / 3, math.inf, "massive", "p=1.33333 is below 2"),
            (0.5, 4, "massless", "exponents must be >= 1, got p=0.5, q=4"),
        ],
    )
    def test_rejected(self, p, q, family, reason):
        verdict = validate_admissible(p, q, family)
        assert not verdict
        assert verdict.reason == reason

    @pytest.mark.unit
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            validate_admissible(4, 4, "relativistic")

    @pytest.mark.unit
    def test_spec_rejects_inadmissible(self):
        with pytest.raises(AdmissibilityError) as exc_info:
            MixedNormSpec(3, 3)
        assert str(exc_info.value) == "admissibility: 2/3+2/3 ≠ 1"
        report = exc_info.value.to_report()
        assert report.error_code == ErrorCode.ADMISSIBILITY
        assert report.details.value == {"p": 3, "q": 3, "family": "massless"}

    @pytest.mark.unit
    def test_spec_defaults(self):
        spec = MixedNormSpec(4, 4)
        assert spec.weight_exponent == 0.5
        assert spec.sobolev_s == 0.5
        assert spec.label == "(4,4)"
        massive = MixedNormSpec(2, 6, NormFamily.MASSIVE, weight_exponent=0.0)
        assert massive.weight_exponent == 0.0
        assert massive.sobolev_s == 0.5


class TestLqNorm:
    """Test L^q norms by synthesis and sphere quadrature"""

    @pytest.mark.unit
    def test_l2_matches_modal_norm(self, grid):
        field = _g_field(grid, Representation.G_R2)
        assert lq_norm(field, 2, Measure.R2, grid) == pytest.approx(field.norm(grid), rel=1e-12)

    @pytest.mark.unit
    def test_manifold_measure(self, grid):
        field = _g_field(grid)
        phi = HYPERBOLIC.phi(grid.r)
        value = lq_norm(field, 2, Measure.PHI2, grid, HYPERBOLIC)
        assert value == pytest.approx(field.norm(grid, phi), rel=1e-12)

    @pytest.mark.unit
    def test_w_field_is_read_through_phi(self, grid):
        g = _g_field(grid)
        phi = HYPERBOLIC.phi(grid.r)
        w = g.map(lambda _, s: RadialSpinor(s.plus * phi, s.minus * phi, Representation.W))
        assert lq_norm(w, 4, Measure.PHI2, grid, HYPERBOLIC) == pytest.approx(
            lq_norm(g, 4, Measure.PHI2, grid, HYPERBOLIC), rel=1e-12
        )

    @pytest.mark.unit
    def test_sup_norm(self, grid):
        """|E+| is constant for j = 1/2"""
        spinor = RadialSpinor(np.ones(grid.N), np.zeros(grid.N), Representation.G_R2)
        field = SpinorField({PartialWaveIndex(0.5, 0.5, -1): spinor})
        expected = 1 / math.sqrt(4 * math.pi)
        assert lq_norm(field, math.inf, Measure.R2, grid) == pytest.approx(expected)

    @pytest.mark.unit
    def test_empty_field(self, grid):
        assert lq_norm(SpinorField(), 4, Measure.R2, grid) == 0.0

    @pytest.mark.unit
    def test_invalid_arguments(self, grid):
        with pytest.raises(DomainError):
            lq_norm(_g_field(grid), 0.5, Measure.R2, grid)
        with pytest.raises(DomainError):
            lq_norm(_g_field(grid), 2, Measure.DR, grid)

    @pytest.mark.unit
    @pytest.mark.parametrize("q", [2.0, 4.0, 6.0])
    def test_sigma_isometry(self, q, grid):
        assert sigma_isometry_gap(_g_field(grid), q, HYPERBOLIC, grid) <= 1e-12

    @pytest.mark.unit
    def test_isometry_needs_g_profiles(self, grid):
        with pytest.raises(DimensionMismatchError):
            sigma_isometry_gap(_g_field(grid, Representation.W), 4, HYPERBOLIC, grid)


class TestStrichartzFunctional:
    """Test the time-integrated mixed norm"""

    @pytest.mark.unit
    def test_constant_trajectory(self, grid):
        field = _g_field(grid)
        trajectory = Trajectory([0.0, 0.5, 1.0], [field, field, field])
        spec = MixedNormSpec(4, 4)
        expected = lq_norm(field, 4, Measure.PHI2, grid, FLAT)
        assert strichartz_functional(trajectory, spec, FLAT, grid) == pytest.approx(expected)

    @pytest.mark.unit
    def test_time_integral(self, grid):
        field = _g_field(grid)
        half = field.map(lambda _, s: s.scaled(0.5))
        trajectory = Trajectory([0.0, 2.0], [field, half])
        spec = MixedNormSpec(4, 4)
        full = lq_norm(field, 4, Measure.PHI2, grid, FLAT)
        expected = (2.0 * 0.5 * (full**4 + (0.5 * full) ** 4)) ** 0.25
        assert strichartz_functional(trajectory, spec, FLAT, grid) == pytest.approx(expected)

    @pytest.mark.unit
    def test_weight_exceeds_one_for_hyperbolic(self, grid):
        trajectory = Trajectory([0.0], [_g_field(grid)])
        spec = MixedNormSpec(math.inf, 2)
        weighted = strichartz_functional(trajectory, MixedNormSpec(4, 4), HYPERBOLIC, grid)
        plain = strichartz_functional(
            trajectory, MixedNormSpec(4, 4), HYPERBOLIC, grid, weighted=False
        )
        assert weighted > plain
        assert strichartz_functional(trajectory, spec, HYPERBOLIC, grid) == pytest.approx(
            lq_norm(_g_field(grid), 2, Measure.PHI2, grid, HYPERBOLIC)
        )

    @pytest.mark.unit
    def test_empty_trajectory(self, grid):
        with pytest.raises(DimensionMismatchError):
            strichartz_functional(Trajectory(), MixedNormSpec(4, 4), FLAT, grid)


class TestSobolevNorms:
    """Test H^s and H^{a,b}"""

    @pytest.mark.unit
    def test_hab_without_regularity(self, grid):
        field = _g_field(grid)
        phi = HYPERBOLIC.phi(grid.r)
        value = hab_norm(field, 0.0, 0.0, HYPERBOLIC, grid)
        assert value == pytest.approx(math.sqrt(2.0) * field.norm(grid, phi), rel=1e-12)

    @pytest.mark.unit
    def test_hab_grows_with_both_orders(self, grid):
        field = _g_field(grid)
        base = hab_norm(field, 0.0, 0.0, FLAT, grid)
        assert hab_norm(field, 1.0, 0.0, FLAT, grid) > base
        assert hab_norm(field, 0.0, 1.0, FLAT, grid) > base

    @pytest.mark.unit
    def test_hs_of_spinor_sums_components(self, grid):
        profile = np.exp(-((grid.r - 3.0) ** 2))
        spinor = RadialSpinor(profile, profile, Representation.G_PHI2)
        single = hs_norm(profile, 1.0, FLAT, grid)
        assert hs_norm(spinor, 1.0, FLAT, grid) == pytest.approx(math.sqrt(2) * single)

    @pytest.mark.unit
    def test_japanese_bracket(self):
        assert japanese_bracket(0) == 1.0
        assert japanese_bracket(-1) == pytest.approx(math.sqrt(2))

    @pytest.mark.unit
    def test_h1_continuity(self, grid):
        f = np.exp(-((grid.r - 3.0) ** 2))
        assert h1_continuity_ratio(f, FLAT, grid) == pytest.approx(1.0)
        assert h1_continuity_ratio(f, HYPERBOLIC, grid) <= leibniz_bound(HYPERBOLIC, grid)

    @pytest.mark.unit
    def test_h1_continuity_zero_profile(self, grid):
        with pytest.raises(DomainError):
            h1_continuity_ratio(np.zeros(grid.N), FLAT, grid)

    @pytest.mark.unit
    def test_leibniz_bound_flat(self, grid):
        assert leibniz_bound(FLAT, grid) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_l2_aggregate(self):
        assert l2_aggregate([3.0, 4.0]) == 5.0
