"""
Experiments on the time evolution: unitarity and time reversal, the Duhamel
identity for the flat operator plus the warp potential, invariance of the
j = 1/2 partial waves under the self-interaction, and Picard contraction.
"""

import math
from typing import List

import numpy as np
from glogger import get_component_logger

from ..angular import PartialWaveIndex, SphereQuadrature, indices_up_to, synthesize
from ..evolve import (
    NonlinearPath,
    curved_operators,
    duhamel_residual,
    evolve_field_linear,
    evolve_linear,
    evolve_nonlinear,
    picard_solve,
    propagator,
)
from ..exceptions import BudgetExhaustedError, NoContractionError
from ..fields import Measure, RadialSpinor, SpinorField
from ..manifold import check_assumptions, checked_phi
from ..models.records import ExperimentResult
from ..nonlinear import (
    LeakageResult,
    NonlinearSpec,
    leakage,
    nonlinear_multiplier,
    pointwise_density,
    reprojection_leakage,
)
from ..norms import g_profiles, hab_norm
from ..radial_ops import build_curved, build_flat_reference, potential_operator
from ..utils import convergence_orders
from .base import ExperimentContext, bump_spinor

logger = get_component_logger("experiments")

HALFSPIN_PAIRS = [(0.5, 1), (-0.5, 1), (0.5, -1), (-0.5, -1)]
COUNTEREXAMPLE_INDEX = PartialWaveIndex(1.5, 0.5, 2)
COUNTEREXAMPLE_THRESHOLD = 1e-4
LINEAR_LEAKAGE_TOL = 1e-12
DUHAMEL_MIN_ORDER = 1.7
# halvings below T* on which the Picard ratio is tracked
RATIO_SWEEP_LEVELS = 2


def run_unitarity(context: ExperimentContext) -> ExperimentResult:
    """Relative L^2 drift at every sample and the error of stepping back to t = 0."""
    result = context.result(["k", "max_drift", "reversal_error", "hermiticity"])
    grid, cfg = context.grid, context.evolution
    worst_drift, worst_reversal = 0.0, 0.0
    for n in range(context.spec.n_min, context.spec.n_max + 1):
        for k in (n + 1, -(n + 1)):
            H = build_curved(k, context.spec.m, context.warp, grid)
            psi0 = bump_spinor(grid, 3.0, 0.5, phases=(0.0, 0.7), amplitudes=(1.0, 0.5))
            trajectory = evolve_linear(H, psi0, cfg)
            norm0 = psi0.norm(grid)
            drift = max(abs(s.norm(grid) - norm0) / norm0 for s in trajectory.states)
            backward = propagator(H, -cfg.dt, cfg.scheme)
            vector = trajectory.final.stacked()
            for _ in range(int(round(cfg.T / cfg.dt))):
                vector = backward(vector)
            initial = psi0.stacked()
            reversal = float(np.linalg.norm(vector - initial) / np.linalg.norm(initial))
            worst_drift = max(worst_drift, drift)
            worst_reversal = max(worst_reversal, reversal)
            result.rows.append(
                {
                    "k": k,
                    "max_drift": drift,
                    "reversal_error": reversal,
                    "hermiticity": H.hermiticity_residual(),
                }
            )
    result.headline.update({"max_drift": worst_drift, "max_reversal_error": worst_reversal})
    result.passed = worst_drift <= context.tolerance and worst_reversal <= context.tolerance
    return result


def run_duhamel(context: ExperimentContext) -> ExperimentResult:
    """
    Duhamel residual of the flat operator plus V_k against the evolution of h^sigma,
    sampled every step, for dt, dt/2 and dt/4.
    """
    result = context.result(["k", "dt", "residual", "order"])
    result.tolerances["min_order"] = DUHAMEL_MIN_ORDER
    grid, base = context.grid, context.evolution
    finest, worst_order = 0.0, math.inf
    for k in (1, -1):
        H0 = build_flat_reference(k, context.spec.m, grid)
        V = potential_operator(k, context.warp, grid)
        H = H0 + V
        psi0 = bump_spinor(grid, 3.0, 0.5, phases=(0.0, 0.3))
        residuals, steps = [], []
        for level in range(3):
            cfg = base.model_copy(update={"dt": base.dt / 2**level, "sample_stride": 1})
            residuals.append(duhamel_residual(H0, V, evolve_linear(H, psi0, cfg)))
            steps.append(cfg.dt)
        orders = convergence_orders(residuals)
        for dt, residual, order in zip(steps, residuals, [math.nan] + orders):
            result.rows.append({"k": k, "dt": dt, "residual": residual, "order": order})
        finest = max(finest, residuals[-1])
        if residuals[-1] > 1e-13:
            worst_order = min(worst_order, min(orders))
    result.headline.update({"finest_residual": finest, "min_order": worst_order})
    result.passed = finest <= context.tolerance and (
        math.isinf(worst_order) or worst_order >= DUHAMEL_MIN_ORDER
    )
    return result


def _halfspin_data(grid, index: PartialWaveIndex, amplitude: float = 1.0) -> SpinorField:
    spinor = bump_spinor(grid, 3.0, 0.5, phases=(0.0, 0.4), amplitudes=(amplitude, 0.5 * amplitude))
    return SpinorField({index: spinor})


def _leakage_series(trajectory, kept, grid, norm0) -> List[float]:
    return [leakage(state, kept, grid) / norm0 for state in trajectory.states]


def _term_leakage(
    state: SpinorField,
    index: PartialWaveIndex,
    nl: NonlinearSpec,
    context: ExperimentContext,
    j_max: float,
    quadrature: SphereQuadrature,
) -> LeakageResult:
    """The pointwise self-interaction of ``state`` re-projected on every index up to j_max."""
    warp, grid = context.warp, context.grid
    samples = synthesize(g_profiles(state, Measure.PHI2, warp, grid), quadrature)
    term = nonlinear_multiplier(pointwise_density(samples, nl.kind), nl.exponent) * samples
    phi = checked_phi(warp, grid.r)
    return reprojection_leakage(term, {index}, quadrature, j_max, grid, Measure.PHI2, phi)


def run_invariance(context: ExperimentContext) -> ExperimentResult:
    """
    Leakage out of a single j = 1/2 mode under the general nonlinear path, the
    same for the linear flow, and a j = 3/2 counterexample that must leak.
    """
    result = context.result(["case", "m_j", "k", "density", "exponent", "t", "relative_leakage"])
    spec, grid, cfg = context.spec, context.grid, context.evolution
    j_max = spec.j_max or 1.5
    quadrature = SphereQuadrature(int(round(4 * j_max)) + 4)
    worst, worst_term = 0.0, 0.0
    for m_j, k in HALFSPIN_PAIRS:
        index = PartialWaveIndex(0.5, m_j, k)
        data = _halfspin_data(grid, index)
        norm0 = data.norm(grid)
        for density in spec.densities:
            for exponent in spec.exponents:
                nl = NonlinearSpec(exponent, density)
                trajectory = evolve_nonlinear(
                    data, spec.m, context.warp, grid, cfg, nl, NonlinearPath.GENERAL, j_max
                )
                series = _leakage_series(trajectory, {index}, grid, norm0)
                worst = max(worst, max(series))
                check = _term_leakage(trajectory.final, index, nl, context, j_max, quadrature)
                if check.total > 0:
                    worst_term = max(worst_term, check.leakage / check.total)
                if check.warning:
                    result.notes.append(f"{index.label}: {check.warning}")
                for t, value in zip(trajectory.times, series):
                    result.rows.append(
                        {
                            "case": "halfspin",
                            "m_j": m_j,
                            "k": k,
                            "density": density.value,
                            "exponent": exponent,
                            "t": t,
                            "relative_leakage": value,
                        }
                    )

    index = PartialWaveIndex(0.5, 0.5, 1)
    modes = {i: RadialSpinor.zeros(grid.N) for i in indices_up_to(j_max)}
    modes.update(_halfspin_data(grid, index).items())
    padded = SpinorField.from_mapping(modes)
    linear = evolve_field_linear(padded, curved_operators(spec.m, context.warp, grid), cfg)
    linear_leakage = max(_leakage_series(linear, {index}, grid, padded.norm(grid)))

    data = SpinorField({COUNTEREXAMPLE_INDEX: bump_spinor(grid, 3.0, 0.5, amplitudes=(1.0, 0.5))})
    nl = NonlinearSpec(2.0, spec.densities[0])
    trajectory = evolve_nonlinear(
        data, spec.m, context.warp, grid, cfg, nl, NonlinearPath.GENERAL, max(j_max, 1.5)
    )
    counterexample = _leakage_series(trajectory, {COUNTEREXAMPLE_INDEX}, grid, data.norm(grid))
    for t, value in zip(trajectory.times, counterexample):
        result.rows.append(
            {
                "case": "counterexample",
                "m_j": COUNTEREXAMPLE_INDEX.m,
                "k": COUNTEREXAMPLE_INDEX.k,
                "density": nl.kind.value,
                "exponent": nl.exponent,
                "t": t,
                "relative_leakage": value,
            }
        )

    result.headline.update(
        {
            "max_halfspin_leakage": worst,
            "max_term_leakage": worst_term,
            "linear_leakage": linear_leakage,
            "counterexample_leakage": max(counterexample),
        }
    )
    result.tolerances.update(
        {"linear": LINEAR_LEAKAGE_TOL, "counterexample_min": COUNTEREXAMPLE_THRESHOLD}
    )
    result.passed = (
        worst <= context.tolerance
        and worst_term <= context.tolerance
        and linear_leakage <= LINEAR_LEAKAGE_TOL
        and max(counterexample) > COUNTEREXAMPLE_THRESHOLD
    )
    return result


def _contraction_exponent(exponents: List[float]) -> float:
    return 2.0 if 2.0 in exponents else exponents[0]


def _decreasing(ratios: List[float]) -> bool:
    finite = [r for r in ratios if math.isfinite(r)]
    return all(later <= earlier for earlier, later in zip(finite, finite[1:]))


def run_contraction(context: ExperimentContext) -> ExperimentResult:
    """
    Largest T on the halving ladder from T_cap at which the Picard map contracts
    with final ratio <= 1/2, for a ladder of data sizes R measured in H^{1,1}.

    The ladder continues ``RATIO_SWEEP_LEVELS`` halvings below T*; ``ratio`` is the
    largest ratio of successive Picard distances and must decrease as T is halved.
    """
    spec, grid, warp = context.spec, context.grid, context.warp
    result = context.result(
        ["amplitude", "R", "T", "contracted", "iterations", "ratio", "final_ratio"]
    )
    report = check_assumptions(warp, grid)
    if not report.inf_phi_over_r > 0:
        result.notes.append(f"inf phi/r = {report.inf_phi_over_r:g}; the hypothesis fails")
        return result

    dt = context.evolution.dt
    nl = NonlinearSpec(_contraction_exponent(spec.exponents), spec.densities[0])
    index = PartialWaveIndex(0.5, 0.5, 1)
    horizons, sweeps = [], []
    for amplitude in spec.amplitudes:
        data = _halfspin_data(grid, index, amplitude)
        size = hab_norm(data, 1.0, 1.0, warp, grid)
        T, found, below = spec.T_cap, 0.0, 0
        ratios = []
        while T >= 2 * dt and below <= RATIO_SWEEP_LEVELS:
            try:
                solution = picard_solve(
                    data, spec.m, warp, grid, nl, T, spec.picard_tol, dt, context.evolution.scheme
                )
                final_ratio = solution.ratios[-1] if solution.ratios else 0.0
                ratio = max(solution.ratios, default=0.0)
                contracted = final_ratio <= context.tolerance
                iterations = solution.iterations
            except (NoContractionError, BudgetExhaustedError) as exc:
                contracted, ratio, final_ratio, iterations = False, math.nan, math.nan, 0
                logger.debug("Picard attempt failed", horizon=T, reason=exc.code.value)
            ratios.append(ratio)
            result.rows.append(
                {
                    "amplitude": amplitude,
                    "R": size,
                    "T": T,
                    "contracted": contracted,
                    "iterations": iterations,
                    "ratio": ratio,
                    "final_ratio": final_ratio,
                }
            )
            if found:
                below += 1
            elif contracted:
                found = T
                below = 1
            T /= 2
        horizons.append(found)
        sweeps.append(_decreasing(ratios))
        logger.info_with_context(
            "Contraction horizon found", {"experiment": spec.label, "R": size, "T_star": found}
        )

    monotone = all(later <= earlier for earlier, later in zip(horizons, horizons[1:]))
    ratio_decreasing = all(sweeps)
    result.headline.update(
        {f"T_star[{a:g}]": T for a, T in zip(spec.amplitudes, horizons)}
        | {"monotone": monotone, "ratio_decreasing": ratio_decreasing}
    )

    # cross-check the fixed point against the splitting integrator at the smallest amplitude
    smallest = _halfspin_data(grid, index, min(spec.amplitudes))
    horizon = horizons[int(np.argmin(spec.amplitudes))] or 2 * dt
    solution = picard_solve(smallest, spec.m, warp, grid, nl, horizon, spec.picard_tol, dt)
    cfg = context.evolution.model_copy(update={"T": horizon, "sample_stride": 1})
    direct = evolve_nonlinear(smallest, spec.m, warp, grid, cfg, nl)
    gap = max(
        (a - b).norm(grid) for a, b in zip(solution.trajectory.states, direct.states)
    ) / smallest.norm(grid)
    allowed = max(1e-6, 5 * dt**2 * horizon)
    result.headline["integrator_gap"] = gap
    result.tolerances["integrator_gap"] = allowed
    result.passed = (
        monotone and ratio_decreasing and all(h > 0 for h in horizons) and gap <= allowed
    )
    return result
