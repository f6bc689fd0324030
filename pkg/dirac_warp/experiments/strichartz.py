"""
Weighted Strichartz ratio sweeps over the blocks P_n.

For every admissible (p, q) and every n, an ensemble of Gaussian-bump data on
the modes of P_n is evolved linearly and the ratio

    ||(phi/r)^{1-2/q} u||_{L^p_t L^q(M)} / (<n>^theta ||u_0||_{H^s(M)})

is recorded with theta = 1. The <n>-growth exponent is fitted on the raw
ratios (theta = 0).
"""

import math
from typing import Dict, List

import numpy as np
from glogger import get_component_logger

from ..angular import SphereQuadrature, block_indices
from ..evolve import curved_operators, evolve_field_linear
from ..exceptions import InsufficientDomainError
from ..models.config import ENSEMBLE_SUPPORT, NormSpecConfig
from ..models.records import ExperimentResult, RatioRecord
from ..norms import (
    MixedNormSpec,
    NormFamily,
    hs_norm,
    japanese_bracket,
    l2_aggregate,
    strichartz_functional,
)
from ..utils import growth_exponent, make_rng
from .base import ExperimentContext, random_bump_field

logger = get_component_logger("experiments")

COLUMNS = list(RatioRecord.model_fields)
GROWTH_LIMIT = 1.3
THETA = 1.0

DEFAULT_NORMS = [NormSpecConfig(p=4, q=4, family=NormFamily.MASSLESS)]


def _require_domain(context: ExperimentContext) -> None:
    needed = ENSEMBLE_SUPPORT + context.evolution.T + context.spec.margin
    if context.grid.r_max < needed:
        raise InsufficientDomainError(
            r_max=context.grid.r_max,
            support=ENSEMBLE_SUPPORT,
            horizon=context.evolution.T,
            margin=context.spec.margin,
        )


def ensemble_ratios(
    context: ExperimentContext, spec: MixedNormSpec, n: int, norm_position: int, members: int
) -> List[RatioRecord]:
    """One RatioRecord per ensemble member for block n."""
    _require_domain(context)
    grid, warp = context.grid, context.warp
    indices = block_indices(n)
    rng = make_rng(context.seed, n, norm_position)
    operators = curved_operators(context.spec.m, warp, grid)
    quadrature = SphereQuadrature.for_j_max(n + 0.5, extra=5)
    bracket = japanese_bracket(n)
    records = []
    for member in range(members):
        data = random_bump_field(rng, grid, indices)
        trajectory = evolve_field_linear(data, operators, context.evolution)
        weighted = strichartz_functional(trajectory, spec, warp, grid, quadrature)
        unweighted = strichartz_functional(trajectory, spec, warp, grid, quadrature, weighted=False)
        sobolev = l2_aggregate(hs_norm(s, spec.sobolev_s, warp, grid) for _, s in data.items())
        records.append(
            RatioRecord(
                n=n,
                p=spec.p,
                q=spec.q,
                family=spec.family.value,
                T=context.evolution.T,
                member=member,
                ratio=weighted / (bracket**THETA * sobolev),
                raw_ratio=weighted / sobolev,
                unweighted_ratio=unweighted / sobolev,
                theta=THETA,
                sobolev_s=spec.sobolev_s,
                grid_tag=grid.tag,
                seed=context.seed,
            )
        )
    return records


def run_strichartz_ratio(context: ExperimentContext) -> ExperimentResult:
    spec = context.spec
    result = context.result(COLUMNS)
    result.tolerances.update({"stability": context.tolerance, "growth_exponent": GROWTH_LIMIT})
    passed = True
    for position, norm in enumerate(spec.norms or DEFAULT_NORMS):
        mixed = norm.to_spec(context.evolution.T)
        by_n: Dict[int, List[RatioRecord]] = {}
        for n in range(spec.n_min, spec.n_max + 1):
            by_n[n] = ensemble_ratios(context, mixed, n, position, spec.ensemble)
            result.rows.extend(record.model_dump() for record in by_n[n])
            logger.info_with_context(
                "Strichartz block done",
                {
                    "experiment": spec.label,
                    "pair": mixed.label,
                    "n": n,
                    "max_ratio": max(r.ratio for r in by_n[n]),
                },
            )

        fit_ns = [n for n in by_n if n >= 1]
        exponent = growth_exponent(
            [japanese_bracket(n) for n in fit_ns],
            [max(r.raw_ratio for r in by_n[n]) for n in fit_ns],
        )
        all_records = [r for records in by_n.values() for r in records]
        max_ratio = max(r.ratio for r in all_records)
        weighted_max = max(r.raw_ratio for r in all_records)
        unweighted_max = max(r.unweighted_ratio for r in all_records)
        key = mixed.label
        result.headline[f"max_ratio{key}"] = max_ratio
        result.headline[f"growth_exponent{key}"] = exponent
        gain = unweighted_max / weighted_max if weighted_max else math.nan
        result.headline[f"weight_gain{key}"] = gain
        if not math.isnan(exponent) and exponent > GROWTH_LIMIT:
            passed = False
            result.notes.append(f"{key}: <n>-growth exponent {exponent:.3g} exceeds {GROWTH_LIMIT}")

        if spec.refine:
            members = min(spec.ensemble, 5)
            coarse = ensemble_ratios(context, mixed, spec.n_min, position, members)
            fine = ensemble_ratios(context.refined(), mixed, spec.n_min, position, members)
            coarse_max = max(r.raw_ratio for r in coarse)
            fine_max = max(r.raw_ratio for r in fine)
            change = abs(fine_max - coarse_max) / coarse_max
            result.refinement[f"relative_change{key}"] = change
            if change > context.tolerance:
                passed = False
                result.notes.append(f"{key}: ratio moved by {change:.3g} under refinement")
        if not all(np.isfinite([r.ratio for r in all_records])):
            passed = False
    result.passed = passed
    return result
