"""
Unit tests for partial-wave indices, spinor harmonics and the sphere quadrature
"""

import math

import numpy as np
import pytest

from dirac_warp.angular import (
    PartialWaveIndex,
    SphereQuadrature,
    angular_dirac_eigencheck,
    band_projector,
    block_indices,
    dyadic_level,
    four_spinor_basis,
    gamma_eigenspinor,
    gram_matrix,
    harmonic_block_indices,
    harmonic_leakage,
    indices_up_to,
    project,
    project_all,
    sigma3_relation_residual,
    spherical_harmonic,
    synthesize,
)
from dirac_warp.exceptions import InvalidIndexError, QuadratureDegreeError
from dirac_warp.fields import RadialSpinor, Representation, SpinorField

HALFSPIN_THETA = np.array([0.0, 0.4, 1.3, 2.2, np.pi])
HALFSPIN_PHI = np.array([0.0, 2.5, 0.9, 4.0, 1.1])


def _halfspin_closed_form(m, k, theta, phi):
    """
    The two j = 1/2 four-spinors of (m_j, k_j), written out by hand.

    The azimuthal factor is exp(2 i m_j phi), i.e. exp(-i phi) for m_j = -1/2.
    """
    c = 1.0 / (2.0 * math.sqrt(math.pi))
    cos, sin = np.cos(theta), np.sin(theta)
    e = np.exp(2j * m * phi)
    zero = np.zeros_like(theta, dtype=complex)
    const = np.full_like(theta, c, dtype=complex)
    forms = {
        (-0.5, -1): ([zero, 1j * const, zero, zero], [zero, zero, c * e * sin, -c * cos]),
        (-0.5, 1): ([1j * c * e * sin, -1j * c * cos, zero, zero], [zero, zero, zero, const]),
        (0.5, -1): ([1j * const, zero, zero, zero], [zero, zero, c * cos, c * e * sin]),
        (0.5, 1): ([1j * c * cos, 1j * c * e * sin, zero, zero], [zero, zero, const, zero]),
    }
    plus, minus = forms[(m, k)]
    return np.array(plus), np.array(minus)


class TestPartialWaveIndex:
    """Test index validation and derived labels"""

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "j,m,k",
        [(1.0, 0.5, 1), (0.5, 1.5, 1), (0.5, 0.0, 1), (0.5, 0.5, 2), (1.5, 0.5, 0), (-0.5, 0.5, 0)],
    )
    def test_invalid(self, j, m, k):
        with pytest.raises(InvalidIndexError):
            PartialWaveIndex(j, m, k)

    @pytest.mark.unit
    def test_error_message_names_the_index(self):
        with pytest.raises(InvalidIndexError) as exc_info:
            PartialWaveIndex(0.5, 0.5, 3)
        assert "k_j=3" in str(exc_info.value)

    @pytest.mark.unit
    @pytest.mark.parametrize("k,n", [(1, 1), (-1, 0), (2, 2), (-2, 1), (-3, 2)])
    def test_block_label(self, k, n):
        j = abs(k) - 0.5
        assert PartialWaveIndex(j, 0.5, k).n == n

    @pytest.mark.unit
    def test_branches(self):
        assert PartialWaveIndex(0.5, 0.5, 1).branches == ("F-", "F+")
        assert PartialWaveIndex(0.5, 0.5, -1).branches == ("G+", "G-")

    @pytest.mark.unit
    def test_label_and_eigenvalue(self, halfspin_index):
        assert halfspin_index.label == "j=0.5,m=0.5,k=1"
        assert halfspin_index.lam == 1.0

    @pytest.mark.unit
    def test_usable_as_key(self):
        assert {PartialWaveIndex(0.5, 0.5, 1): 1}[PartialWaveIndex(0.5, 0.5, 1)] == 1


class TestSphereQuadrature:
    """Test the product rule on S^2"""

    @pytest.mark.unit
    def test_weights_sum_to_sphere_area(self, quadrature):
        assert quadrature.weights.sum() == pytest.approx(4 * math.pi, rel=1e-14)

    @pytest.mark.unit
    def test_node_counts(self):
        quadrature = SphereQuadrature(5)
        assert (quadrature.n_theta, quadrature.n_phi, quadrature.size) == (3, 6, 18)

    @pytest.mark.unit
    def test_harmonics_are_orthonormal(self, quadrature):
        theta, phi = quadrature.theta, quadrature.phi
        y21 = spherical_harmonic(2, 1, theta, phi)
        y31 = spherical_harmonic(3, 1, theta, phi)
        assert quadrature.integrate(np.abs(y21) ** 2) == pytest.approx(1.0, rel=1e-12)
        assert abs(quadrature.integrate(np.conj(y21) * y31)) < 1e-13

    @pytest.mark.unit
    def test_negative_degree(self):
        with pytest.raises(QuadratureDegreeError):
            SphereQuadrature(-1)

    @pytest.mark.unit
    def test_invalid_harmonic(self, quadrature):
        with pytest.raises(InvalidIndexError):
            spherical_harmonic(1, 2, quadrature.theta, quadrature.phi)

    @pytest.mark.unit
    def test_for_j_max(self):
        assert SphereQuadrature.for_j_max(1.5).degree == 5


class TestBasis:
    """Test the four-spinor basis, projection and synthesis"""

    @pytest.mark.unit
    def test_gram_matrix_is_identity(self):
        indices = indices_up_to(2.5)
        gram = gram_matrix(indices, SphereQuadrature.for_j_max(2.5))
        np.testing.assert_allclose(gram, np.eye(2 * len(indices)), atol=1e-12)

    @pytest.mark.unit
    def test_indices_up_to(self):
        indices = indices_up_to(1.5)
        assert len(indices) == 12
        assert indices[0] == PartialWaveIndex(0.5, -0.5, -1)
        assert [i.j for i in indices] == sorted(i.j for i in indices)

    @pytest.mark.unit
    def test_project_inverts_synthesize(self):
        quadrature = SphereQuadrature.for_j_max(1.5)
        first, second = PartialWaveIndex(0.5, 0.5, 1), PartialWaveIndex(1.5, -0.5, -2)
        field = SpinorField(
            {
                first: RadialSpinor(np.array([1.0, 2.0, 0.5]), np.array([0.0, 1j, -1.0])),
                second: RadialSpinor(np.array([0.3, 0.0, 0.1j]), np.array([2.0, 2.0, 2.0])),
            }
        )
        samples = synthesize(field, quadrature)
        assert samples.shape == (4, 3, quadrature.size)
        recovered = project_all(samples, quadrature, 1.5, Representation.W)
        for index in indices_up_to(1.5):
            expected = field[index] if index in field else RadialSpinor.zeros(3)
            np.testing.assert_allclose(recovered[index].plus, expected.plus, atol=1e-12)
            np.testing.assert_allclose(recovered[index].minus, expected.minus, atol=1e-12)

    @pytest.mark.unit
    def test_projection_keeps_representation(self, halfspin_index):
        quadrature = SphereQuadrature(4)
        samples = np.zeros((4, 2, quadrature.size), complex)
        assert project(samples, halfspin_index, quadrature).representation == Representation.G_PHI2

    @pytest.mark.unit
    def test_quadrature_too_coarse(self):
        samples = np.zeros((4, 2, 2), complex)
        with pytest.raises(QuadratureDegreeError):
            project(samples, PartialWaveIndex(1.5, 0.5, 2), SphereQuadrature(1))

    @pytest.mark.unit
    @pytest.mark.parametrize("m,k", [(-0.5, -1), (-0.5, 1), (0.5, -1), (0.5, 1)])
    def test_halfspin_closed_forms(self, m, k):
        """k < 0 elements match up to the common factor i"""
        first, second = four_spinor_basis(PartialWaveIndex(0.5, m, k))
        plus, minus = _halfspin_closed_form(m, k, HALFSPIN_THETA, HALFSPIN_PHI)
        phase = 1j if k < 0 else 1.0
        np.testing.assert_allclose(
            phase * first.evaluate(HALFSPIN_THETA, HALFSPIN_PHI), plus, atol=1e-14
        )
        np.testing.assert_allclose(
            phase * second.evaluate(HALFSPIN_THETA, HALFSPIN_PHI), minus, atol=1e-14
        )

    @pytest.mark.unit
    def test_halfspin_at_north_pole(self):
        first, _ = four_spinor_basis(PartialWaveIndex(0.5, 0.5, 1))
        value = first.evaluate(np.array(0.0), np.array(0.0))
        np.testing.assert_allclose(value, [0.5j / math.sqrt(math.pi), 0, 0, 0], atol=1e-15)

    @pytest.mark.unit
    def test_synthesize_empty_field(self, quadrature):
        with pytest.raises(InvalidIndexError):
            synthesize(SpinorField(), quadrature)


class TestBlocks:
    """Test the blocks P_n and their dyadic bands"""

    @pytest.mark.unit
    def test_block_zero(self):
        assert block_indices(0) == [PartialWaveIndex(0.5, -0.5, -1), PartialWaveIndex(0.5, 0.5, -1)]

    @pytest.mark.unit
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_blocks_are_labelled_by_n(self, n):
        modes = block_indices(n)
        assert len(modes) == 2 * n + 2 * (n + 1)
        assert all(i.n == n for i in modes)

    @pytest.mark.unit
    def test_blocks_partition_the_indices(self):
        covered = [i for n in range(5) for i in block_indices(n) if i.j <= 3.5]
        assert sorted(covered) == sorted(indices_up_to(3.5))

    @pytest.mark.unit
    def test_negative_label(self):
        with pytest.raises(InvalidIndexError):
            block_indices(-1)
        with pytest.raises(InvalidIndexError):
            harmonic_block_indices(-1)

    @pytest.mark.unit
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_degree_n_harmonics_stay_in_their_block(self, n):
        rng = np.random.default_rng(n)
        quadrature = SphereQuadrature(2 * n + 4)
        theta, phi = quadrature.theta, quadrature.phi
        harmonics = np.array([spherical_harmonic(n, m, theta, phi) for m in range(-n, n + 1)])
        shape = (4, 2, 2 * n + 1)
        coefficients = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        samples = np.einsum("crm,mn->crn", coefficients, harmonics)

        field = project_all(samples, quadrature, n + 1.5)
        kept = set(harmonic_block_indices(n))
        outside = [np.max(np.abs(field[i].stacked())) for i in field if i not in kept]
        assert max(outside) <= 1e-12
        inside = field.restricted(kept)
        np.testing.assert_allclose(synthesize(inside, quadrature), samples, atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.parametrize("n,labels", [(0, {0, 1}), (1, {0, 1, 2}), (4, {3, 4, 5})])
    def test_harmonic_block_spans_three_labels(self, n, labels):
        modes = harmonic_block_indices(n)
        assert {i.n for i in modes} == labels
        assert {i.j for i in modes} == {n - 0.5, n + 0.5} - {-0.5}
        assert len(modes) == 4 * (2 * n + 1)

    @pytest.mark.unit
    def test_harmonic_leakage(self):
        assert harmonic_leakage(2, 3.5, SphereQuadrature(11)) <= 1e-12
        with pytest.raises(InvalidIndexError):
            harmonic_leakage(3, 2.5, SphereQuadrature(11))

    @pytest.mark.unit
    @pytest.mark.parametrize("n,level", [(0, -1), (1, 0), (2, 1), (3, 1), (4, 2), (7, 2), (8, 3)])
    def test_dyadic_level(self, n, level):
        assert dyadic_level(n) == level

    @pytest.mark.unit
    def test_band_projector(self):
        field = SpinorField({i: RadialSpinor.zeros(2) for i in indices_up_to(2.5)})
        band = band_projector(field, 1)
        assert band.indices() and all(i.n in (2, 3) for i in band)
        assert len(band_projector(field, -1)) == 2


class TestSphereDirac:
    """Test the eigenvalue relations of the sphere Dirac operator"""

    @pytest.mark.unit
    @pytest.mark.parametrize("j", [0.5, 1.5, 2.5])
    @pytest.mark.parametrize("branch", [1, -1])
    def test_eigenspinors(self, j, branch):
        for m in (-j, 0.5, j):
            assert angular_dirac_eigencheck(j, m, branch) <= 1e-6

    @pytest.mark.unit
    def test_truncated_band_misses(self):
        assert angular_dirac_eigencheck(1.5, 0.5, 1, band=1) > 1e-3

    @pytest.mark.unit
    def test_band_needs_degree(self):
        with pytest.raises(QuadratureDegreeError):
            angular_dirac_eigencheck(2.5, 0.5, 1, degree=4)

    @pytest.mark.unit
    @pytest.mark.parametrize("j,m", [(0.5, 0.5), (1.5, -1.5), (2.5, 0.5)])
    def test_sigma3_exchanges_branches(self, j, m):
        assert sigma3_relation_residual(j, m, SphereQuadrature(8)) <= 1e-12

    @pytest.mark.unit
    def test_invalid_branch(self, quadrature):
        with pytest.raises(InvalidIndexError):
            gamma_eigenspinor(0.5, 0.5, 0, quadrature.theta, quadrature.phi)
