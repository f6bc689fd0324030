"""
Experiments on the weighted-spinor reduction: size of the partial-wave
potential, continuity of multiplication by sigma, the L^q isometry and the
discrete conjugation identity.
"""

import math

import numpy as np
from glogger import get_component_logger

from ..angular import indices_up_to
from ..fields import Measure, RadialSpinor, Representation
from ..manifold import FLAT, checked_phi, potential_sup_bound, sigma_weight
from ..models.records import ExperimentResult
from ..norms import h1_continuity_ratio, japanese_bracket, leibniz_bound, sigma_isometry_gap
from ..radial_ops import conjugation_residual, potential_operator
from ..utils import convergence_orders, gaussian_bump, make_rng
from .base import ExperimentContext, random_bump_field

logger = get_component_logger("experiments")

# (n + 1) / <n> peaks at n = 1
BLOCK_CONSTANT = math.sqrt(2.0)
FLAT_RESIDUAL_TOL = 1e-12


def run_potential_bound(context: ExperimentContext) -> ExperimentResult:
    """Discrete ||V_k|| against |k| sup|1/phi - 1/r|, aggregated per block P_n."""
    result = context.result(
        ["n", "k", "discrete_norm", "predicted_norm", "relative_gap", "block_norm", "normalized"]
    )
    bound = potential_sup_bound(context.warp, context.grid)
    sup_value = bound.sup_value
    worst_gap, worst_normalized = 0.0, 0.0
    for n in range(context.spec.n_min, context.spec.n_max + 1):
        ks = ([n] if n >= 1 else []) + [-(n + 1)]
        norms = {}
        for k in ks:
            V = potential_operator(k, context.warp, context.grid)
            # [[0, V], [V, 0]] with V diagonal: the l2 operator norm is max |V_ii|
            norms[k] = float(abs(V.matrix).max()) if V.matrix.nnz else 0.0
        block = max(norms.values())
        normalized = block / (sup_value * japanese_bracket(n)) if sup_value else 0.0
        worst_normalized = max(worst_normalized, normalized)
        for k, value in norms.items():
            predicted = abs(k) * sup_value
            gap = abs(value - predicted) / predicted if predicted else value
            worst_gap = max(worst_gap, gap)
            result.rows.append(
                {
                    "n": n,
                    "k": k,
                    "discrete_norm": value,
                    "predicted_norm": predicted,
                    "relative_gap": gap,
                    "block_norm": block,
                    "normalized": normalized,
                }
            )
    result.headline.update(
        {
            "sup_potential": sup_value,
            "argmax_r": bound.argmax_r,
            "sup_potential_derivative": bound.sup_derivative,
            "max_relative_gap": worst_gap,
            "max_normalized_block_norm": worst_normalized,
        }
    )
    result.tolerances["block_constant"] = BLOCK_CONSTANT
    result.passed = worst_gap <= context.tolerance and worst_normalized <= BLOCK_CONSTANT + 1e-12
    return result


def run_sigma_continuity(context: ExperimentContext) -> ExperimentResult:
    """C0 (L^2 isometry) and the empirical H^1 constant C1 against 1 + sup|sigma'/sigma|."""
    result = context.result(["member", "r0", "width", "l2_ratio", "h1_ratio"])
    grid, warp = context.grid, context.warp
    sigma, log_derivative = sigma_weight(warp, grid.r)
    phi = checked_phi(warp, grid.r)
    rng = make_rng(context.seed, 0)
    l2_ratios, h1_ratios = [], []
    for member in range(context.spec.ensemble):
        r0 = float(rng.uniform(1.0, 3.0))
        width = float(rng.uniform(0.3, 0.8))
        f = gaussian_bump(grid.r, r0, width) / grid.r
        euclidean = np.sum(grid.weights(Measure.R2) * np.abs(f) ** 2)
        curved = np.sum(grid.weights(Measure.PHI2, phi) * np.abs(sigma * f) ** 2)
        l2_ratio = math.sqrt(curved / euclidean)
        h1_ratio = h1_continuity_ratio(f, warp, grid)
        l2_ratios.append(l2_ratio)
        h1_ratios.append(h1_ratio)
        result.rows.append(
            {"member": member, "r0": r0, "width": width, "l2_ratio": l2_ratio, "h1_ratio": h1_ratio}
        )
    c0 = max(abs(v - 1.0) for v in l2_ratios) + 1.0
    c1 = max(h1_ratios)
    bound = leibniz_bound(warp, grid)
    result.headline.update(
        {
            "C0": c0,
            "C1": c1,
            "sup_log_derivative": float(np.max(np.abs(log_derivative))),
            "leibniz_bound": bound,
        }
    )
    if context.spec.refine:
        fine = context.refined()
        f = gaussian_bump(fine.grid.r, 2.0, 0.5) / fine.grid.r
        coarse_f = gaussian_bump(grid.r, 2.0, 0.5) / grid.r
        result.refinement["h1_ratio_coarse"] = h1_continuity_ratio(coarse_f, warp, grid)
        result.refinement["h1_ratio_fine"] = h1_continuity_ratio(f, warp, fine.grid)
    result.passed = abs(c0 - 1.0) <= context.tolerance and c1 <= bound
    return result


def run_isometry(context: ExperimentContext) -> ExperimentResult:
    """||sigma^{2/q} f||_{L^q(M)} = ||f||_{L^q(R^3)} on random fields for each q."""
    result = context.result(["q", "member", "relative_gap"])
    j_max = context.spec.j_max or 1.5
    indices = indices_up_to(j_max)
    worst = 0.0
    for position, q in enumerate(context.spec.q_values):
        rng = make_rng(context.seed, position)
        for member in range(context.spec.ensemble):
            data = random_bump_field(rng, context.grid, indices, representation=Representation.G_R2)
            gap = sigma_isometry_gap(data, q, context.warp, context.grid)
            worst = max(worst, gap)
            result.rows.append({"q": q, "member": member, "relative_gap": gap})
    result.headline["max_relative_gap"] = worst
    result.passed = worst <= context.tolerance
    return result


def run_conjugation(context: ExperimentContext) -> ExperimentResult:
    """sigma^-1 h sigma - h^sigma on a fixed bump over three refinements at fixed R_max."""
    result = context.result(["dr", "k", "residual", "order"])
    grids = [context.grid, context.grid.refined(2), context.grid.refined(4)]
    flat = context.warp == FLAT
    worst_order, worst_flat = math.inf, 0.0
    for k in (1, -2):
        residuals = []
        for grid in grids:
            g = RadialSpinor(
                gaussian_bump(grid.r, 3.0, 0.5) / grid.r,
                gaussian_bump(grid.r, 3.0, 0.5, phase=1.0) / grid.r,
                Representation.G_R2,
            )
            residuals.append(conjugation_residual(k, context.spec.m, context.warp, grid, g))
        orders = convergence_orders(residuals)
        for grid, residual, order in zip(grids, residuals, [math.nan] + orders):
            result.rows.append({"dr": grid.dr, "k": k, "residual": residual, "order": order})
        worst_flat = max(worst_flat, max(residuals))
        worst_order = min(worst_order, min(orders))
    result.headline["min_order"] = worst_order
    result.headline["max_residual"] = worst_flat
    if flat:
        result.tolerances["flat_residual"] = FLAT_RESIDUAL_TOL
        result.passed = worst_flat <= FLAT_RESIDUAL_TOL
    else:
        result.passed = worst_order >= context.tolerance
    return result
