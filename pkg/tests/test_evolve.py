"""
Tests for linear propagation, the Duhamel identity, the nonlinear flow and Picard iteration
"""

import numpy as np
import pytest

from dirac_warp.angular import PartialWaveIndex
from dirac_warp.evolve import (
    NonlinearPath,
    curved_operators,
    duhamel_residual,
    duhamel_residuals,
    eigensystem,
    evolve_field_linear,
    evolve_linear,
    evolve_nonlinear,
    picard_solve,
    propagator,
    release_caches,
    step,
    trajectory_to_rows,
)
from dirac_warp.exceptions import BudgetExhaustedError, DimensionMismatchError, InvalidIndexError
from dirac_warp.fields import RadialSpinor, Representation, SpinorField, Trajectory
from dirac_warp.manifold import FLAT, HYPERBOLIC
from dirac_warp.models.config import EvolutionConfig, Scheme
from dirac_warp.nonlinear import NonlinearSpec, leakage
from dirac_warp.radial_ops import build_curved, build_flat_reference, potential_operator
from dirac_warp.utils import convergence_orders


def _bump(grid, amplitude=1.0, r0=3.0):
    profile = amplitude * grid.r * np.exp(-((grid.r - r0) ** 2) / 0.25)
    return RadialSpinor(profile, 0.5j * profile)


class TestLinearPropagation:
    """Test the Crank-Nicolson and exponential propagators"""

    @pytest.mark.unit
    def test_propagators_are_cached(self, coarse_grid):
        H = build_curved(1, 1.0, HYPERBOLIC, coarse_grid)
        assert propagator(H, 0.01) is propagator(H, 0.01)
        assert propagator(H, 0.01) is not propagator(H, 0.01, Scheme.SPECTRAL)

    @pytest.mark.unit
    def test_release_caches(self, coarse_grid):
        H = build_curved(2, 0.0, HYPERBOLIC, coarse_grid)
        first = propagator(H, 0.01, Scheme.SPECTRAL)
        assert eigensystem.cache_info()["size"] >= 1
        release_caches()
        assert eigensystem.cache_info()["size"] == 0
        assert propagator.cache_info()["size"] == 0
        assert propagator(H, 0.01, Scheme.SPECTRAL) is not first

    @pytest.mark.unit
    def test_eigenbasis_is_real_for_real_operators(self, coarse_grid):
        eigenvalues, eigenvectors = eigensystem(build_curved(-1, 1.0, HYPERBOLIC, coarse_grid))
        assert eigenvectors.dtype == np.float64
        assert not eigenvectors.flags.writeable
        assert eigenvalues.shape == (2 * coarse_grid.N,)

    @pytest.mark.unit
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_unitary(self, scheme, coarse_grid, short_evolution):
        H = build_curved(-2, 1.0, HYPERBOLIC, coarse_grid)
        psi0 = _bump(coarse_grid)
        cfg = short_evolution.model_copy(update={"scheme": scheme})
        trajectory = evolve_linear(H, psi0, cfg)
        norm0 = psi0.norm(coarse_grid)
        for state in trajectory.states:
            assert state.norm(coarse_grid) == pytest.approx(norm0, rel=1e-12)

    @pytest.mark.unit
    def test_energy_is_conserved(self, coarse_grid, short_evolution):
        H = build_curved(1, 0.5, HYPERBOLIC, coarse_grid)
        trajectory = evolve_linear(H, _bump(coarse_grid), short_evolution)
        np.testing.assert_allclose(trajectory.energies, trajectory.energies[0], rtol=1e-10)

    @pytest.mark.unit
    def test_sample_times(self, coarse_grid, short_evolution):
        H = build_flat_reference(1, 1.0, coarse_grid)
        trajectory = evolve_linear(H, _bump(coarse_grid), short_evolution)
        np.testing.assert_allclose(trajectory.times, [0.0, 0.05, 0.1, 0.15, 0.2])

    @pytest.mark.unit
    def test_time_reversal(self, coarse_grid):
        H = build_curved(3, 1.0, HYPERBOLIC, coarse_grid)
        psi0 = _bump(coarse_grid)
        forward = psi0
        for _ in range(10):
            forward = step(H, forward, 0.02)
        backward = forward
        for _ in range(10):
            backward = step(H, backward, -0.02)
        difference = (backward - psi0).norm(coarse_grid) / psi0.norm(coarse_grid)
        assert difference <= 1e-12

    @pytest.mark.unit
    def test_schemes_agree_to_second_order(self, coarse_grid):
        H = build_curved(1, 1.0, HYPERBOLIC, coarse_grid)
        psi0 = _bump(coarse_grid)
        cfg = EvolutionConfig(dt=0.01, T=0.2, sample_stride=20)
        crank = evolve_linear(H, psi0, cfg).final
        exact = evolve_linear(H, psi0, cfg.model_copy(update={"scheme": Scheme.SPECTRAL})).final
        assert (crank - exact).norm(coarse_grid) <= 2e-3 * psi0.norm(coarse_grid)

    @pytest.mark.unit
    def test_step_needs_w_representation(self, coarse_grid):
        H = build_flat_reference(1, 1.0, coarse_grid)
        g = RadialSpinor.zeros(coarse_grid.N, Representation.G_R2)
        with pytest.raises(DimensionMismatchError):
            step(H, g, 0.01)

    @pytest.mark.unit
    def test_step_size_mismatch(self, grid, coarse_grid):
        with pytest.raises(DimensionMismatchError):
            step(build_flat_reference(1, 1.0, coarse_grid), np.zeros(2 * grid.N), 0.01)

    @pytest.mark.unit
    def test_field_blocks_do_not_exchange_mass(self, coarse_grid, short_evolution):
        index = PartialWaveIndex(0.5, 0.5, 1)
        other = PartialWaveIndex(1.5, 0.5, -2)
        field = SpinorField({index: _bump(coarse_grid), other: RadialSpinor.zeros(coarse_grid.N)})
        operators = curved_operators(1.0, HYPERBOLIC, coarse_grid)
        trajectory = evolve_field_linear(field, operators, short_evolution)
        assert all(leakage(state, {index}, coarse_grid) == 0.0 for state in trajectory.states)
        assert len(trajectory.energies) == len(trajectory.times)

    @pytest.mark.unit
    def test_rows(self, coarse_grid, short_evolution):
        H = build_flat_reference(1, 1.0, coarse_grid)
        trajectory = evolve_linear(H, _bump(coarse_grid), short_evolution)
        rows = trajectory_to_rows(trajectory, coarse_grid)
        assert len(rows) == 2 * 5
        assert {row["mode"] for row in rows} == {"block", "total"}


class TestDuhamel:
    """Test the Duhamel identity for the flat operator plus the warp potential"""

    @pytest.mark.unit
    @pytest.mark.parametrize("k", [1, -1])
    def test_second_order(self, k, coarse_grid):
        H0 = build_flat_reference(k, 1.0, coarse_grid)
        V = potential_operator(k, HYPERBOLIC, coarse_grid)
        H = H0 + V
        psi0 = _bump(coarse_grid)
        residuals = []
        for dt in (0.02, 0.01, 0.005):
            cfg = EvolutionConfig(dt=dt, T=0.4, sample_stride=1)
            residuals.append(duhamel_residual(H0, V, evolve_linear(H, psi0, cfg)))
        assert residuals[-1] <= 1e-3 * psi0.norm(coarse_grid)
        assert min(convergence_orders(residuals)) >= 1.7

    @pytest.mark.unit
    def test_starts_at_zero(self, coarse_grid):
        H0 = build_flat_reference(1, 1.0, coarse_grid)
        V = potential_operator(1, HYPERBOLIC, coarse_grid)
        cfg = EvolutionConfig(dt=0.01, T=0.05, sample_stride=1)
        residuals = duhamel_residuals(H0, V, evolve_linear(H0 + V, _bump(coarse_grid), cfg))
        assert residuals[0] == 0.0
        assert len(residuals) == 6

    @pytest.mark.unit
    def test_repeated_calls_share_the_eigenbasis(self, coarse_grid):
        release_caches()
        V = potential_operator(-1, HYPERBOLIC, coarse_grid)
        cfg = EvolutionConfig(dt=0.01, T=0.05, sample_stride=1)
        for _ in range(3):
            H0 = build_flat_reference(-1, 0.0, coarse_grid)
            duhamel_residuals(H0, V, evolve_linear(H0 + V, _bump(coarse_grid), cfg))
        info = eigensystem.cache_info()
        assert build_flat_reference(-1, 0.0, coarse_grid) is H0
        assert info["size"] == 1
        assert info["hits"] == 2

    @pytest.mark.unit
    def test_needs_uniform_samples(self, coarse_grid):
        H0 = build_flat_reference(1, 1.0, coarse_grid)
        V = potential_operator(1, HYPERBOLIC, coarse_grid)
        psi = _bump(coarse_grid)
        trajectory = Trajectory([0.0, 0.1, 0.3], [psi, psi, psi])
        with pytest.raises(DimensionMismatchError):
            duhamel_residual(H0, V, trajectory)


class TestNonlinearFlow:
    """Test the split-step nonlinear evolution"""

    @pytest.mark.unit
    @pytest.mark.parametrize("kind", ["charge", "mass"])
    def test_fast_path_conserves_charge(self, kind, coarse_grid, short_evolution):
        index = PartialWaveIndex(0.5, -0.5, -1)
        field = SpinorField({index: _bump(coarse_grid, amplitude=2.0)})
        nl = NonlinearSpec(2.0, kind)
        trajectory = evolve_nonlinear(field, 1.0, HYPERBOLIC, coarse_grid, short_evolution, nl)
        norm0 = field.norm(coarse_grid)
        for state in trajectory.states:
            assert state.indices() == [index]
            assert state.norm(coarse_grid) == pytest.approx(norm0, rel=1e-12)

    @pytest.mark.unit
    def test_general_path_matches_fast_path(self, coarse_grid, halfspin_index):
        field = SpinorField({halfspin_index: _bump(coarse_grid, amplitude=2.0)})
        nl = NonlinearSpec(3.0, "charge")
        cfg = EvolutionConfig(dt=0.01, T=0.1, sample_stride=10)
        fast = evolve_nonlinear(field, 1.0, FLAT, coarse_grid, cfg, nl, NonlinearPath.FAST)
        general = evolve_nonlinear(
            field, 1.0, FLAT, coarse_grid, cfg, nl, NonlinearPath.GENERAL, j_max=1.5
        )
        assert len(general.final) == 12
        gap = (general.final - fast.final).norm(coarse_grid)
        assert gap <= 1e-6 * field.norm(coarse_grid)

    @pytest.mark.unit
    def test_fast_path_needs_single_halfspin_mode(self, coarse_grid, short_evolution):
        field = SpinorField({PartialWaveIndex(1.5, 0.5, 2): _bump(coarse_grid)})
        with pytest.raises(InvalidIndexError):
            evolve_nonlinear(
                field,
                1.0,
                FLAT,
                coarse_grid,
                short_evolution,
                NonlinearSpec(2.0),
                NonlinearPath.FAST,
            )

    @pytest.mark.unit
    def test_mode_above_j_max(self, coarse_grid, short_evolution):
        field = SpinorField({PartialWaveIndex(2.5, 0.5, 3): _bump(coarse_grid)})
        with pytest.raises(InvalidIndexError):
            evolve_nonlinear(
                field, 1.0, FLAT, coarse_grid, short_evolution, NonlinearSpec(2.0), j_max=1.5
            )

    @pytest.mark.unit
    def test_needs_w_representation(self, coarse_grid, short_evolution, halfspin_index):
        g = RadialSpinor.zeros(coarse_grid.N, Representation.G_PHI2)
        with pytest.raises(DimensionMismatchError):
            evolve_nonlinear(
                SpinorField({halfspin_index: g}),
                1.0,
                FLAT,
                coarse_grid,
                short_evolution,
                NonlinearSpec(2.0),
            )

    @pytest.mark.unit
    def test_empty_field(self, coarse_grid, short_evolution):
        with pytest.raises(DimensionMismatchError):
            evolve_nonlinear(
                SpinorField(), 1.0, FLAT, coarse_grid, short_evolution, NonlinearSpec(2.0)
            )

    @pytest.mark.slow
    def test_j_three_halves_leaks(self, coarse_grid):
        index = PartialWaveIndex(1.5, 0.5, 2)
        field = SpinorField({index: _bump(coarse_grid, amplitude=3.0)})
        cfg = EvolutionConfig(dt=0.01, T=0.2, sample_stride=20)
        trajectory = evolve_nonlinear(
            field, 1.0, FLAT, coarse_grid, cfg, NonlinearSpec(2.0, "mass"), j_max=2.5
        )
        assert leakage(trajectory.final, {index}, coarse_grid) > 1e-6 * field.norm(coarse_grid)


class TestPicard:
    """Test the Picard iteration of the Duhamel map"""

    @pytest.mark.unit
    def test_contracts_for_small_data(self, coarse_grid, halfspin_index):
        field = SpinorField({halfspin_index: _bump(coarse_grid, amplitude=0.5)})
        nl = NonlinearSpec(2.0, "charge")
        result = picard_solve(field, 1.0, FLAT, coarse_grid, nl, T=0.1, tol=1e-10, dt=0.01)
        assert result.iterations >= 2
        assert all(ratio < 0.5 for ratio in result.ratios)
        assert result.trajectory.times[-1] == pytest.approx(0.1)

    @pytest.mark.unit
    def test_agrees_with_splitting(self, coarse_grid, halfspin_index):
        field = SpinorField({halfspin_index: _bump(coarse_grid, amplitude=0.5)})
        nl = NonlinearSpec(2.0, "charge")
        solution = picard_solve(field, 1.0, FLAT, coarse_grid, nl, T=0.1, tol=1e-10, dt=0.01)
        cfg = EvolutionConfig(dt=0.01, T=0.1, sample_stride=1)
        direct = evolve_nonlinear(field, 1.0, FLAT, coarse_grid, cfg, nl)
        gap = max(
            (a - b).norm(coarse_grid)
            for a, b in zip(solution.trajectory.states, direct.states)
        )
        assert gap <= max(1e-6, 5 * 0.01**2 * 0.1) * field.norm(coarse_grid)

    @pytest.mark.unit
    def test_budget(self, coarse_grid, halfspin_index):
        field = SpinorField({halfspin_index: _bump(coarse_grid)})
        with pytest.raises(BudgetExhaustedError):
            picard_solve(
                field, 1.0, FLAT, coarse_grid, NonlinearSpec(2.0), 0.1, tol=0.0, dt=0.01, max_iter=2
            )

    @pytest.mark.unit
    def test_horizon_shorter_than_step(self, coarse_grid, halfspin_index):
        field = SpinorField({halfspin_index: _bump(coarse_grid)})
        with pytest.raises(DimensionMismatchError):
            picard_solve(field, 1.0, FLAT, coarse_grid, NonlinearSpec(2.0), 0.001, 1e-9, 0.01)
