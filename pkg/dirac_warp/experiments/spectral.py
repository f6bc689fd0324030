"""Exact algebra checks and the spectrum of the angular Dirac operator."""

import itertools

import numpy as np
from glogger import get_component_logger

from ..angular import (
    SphereQuadrature,
    angular_dirac_eigencheck,
    gram_matrix,
    harmonic_leakage,
    indices_up_to,
    sigma3_relation_residual,
)
from ..clifford import block_structure_residual, clifford_defects, permutation_defects
from ..models.records import ExperimentResult
from .base import ExperimentContext

logger = get_component_logger("experiments")

DEFAULT_J_MAX = 4.5
GRAM_TOL = 1e-10
SIGMA3_TOL = 1e-12
HARMONIC_TOL = 1e-11
SAMPLE_RADII = (0.05, 0.5, 1.0, 2.5)
SAMPLE_POLAR = (0.3, 1.2, 2.7)


def run_algebra(context: ExperimentContext) -> ExperimentResult:
    """Clifford identities, the permutation rotation and the rotated block form."""
    result = context.result(["check", "value", "passed"])
    for name, count in clifford_defects().items():
        result.rows.append({"check": f"clifford.{name}", "value": count, "passed": count == 0})
    for name, holds in permutation_defects().items():
        result.rows.append({"check": f"rotation.{name}", "value": holds, "passed": holds})

    worst = 0.0
    for r, theta in itertools.product(SAMPLE_RADII, SAMPLE_POLAR):
        worst = max(worst, block_structure_residual(context.spec.m, context.warp, r, theta))
    block_ok = worst <= context.tolerance
    result.rows.append({"check": "block_form", "value": worst, "passed": block_ok})

    result.headline["block_form_residual"] = worst
    result.passed = all(row["passed"] for row in result.rows)
    return result


def run_spectral(context: ExperimentContext) -> ExperimentResult:
    """
    Residual of the angular eigen-relation for every j <= j_max, every m and both
    branches, exact band versus the band one lower, plus the Gram matrix of the
    whole basis and the sigma3 relation between branches.
    """
    j_max = context.spec.j_max or DEFAULT_J_MAX
    degree = int(round(2 * j_max)) + 4
    result = context.result(["j", "m", "branch", "residual", "coarse_residual", "sigma3"])
    result.tolerances.update({"gram": GRAM_TOL, "sigma3": SIGMA3_TOL, "harmonic": HARMONIC_TOL})
    quadrature = SphereQuadrature(degree)

    worst, worst_sigma3 = 0.0, 0.0
    j = 0.5
    while j <= j_max:
        for m in np.arange(-j, j + 1.0):
            m = float(m)
            sigma3 = sigma3_relation_residual(j, m, quadrature)
            worst_sigma3 = max(worst_sigma3, sigma3)
            for branch in (1, -1):
                residual = angular_dirac_eigencheck(j, m, branch, degree)
                coarse = angular_dirac_eigencheck(j, m, branch, degree, band=int(round(j - 0.5)))
                worst = max(worst, residual)
                result.rows.append(
                    {
                        "j": j,
                        "m": m,
                        "branch": branch,
                        "residual": residual,
                        "coarse_residual": coarse,
                        "sigma3": sigma3,
                    }
                )
        j += 1.0

    indices = indices_up_to(j_max)
    gram = gram_matrix(indices, SphereQuadrature(int(round(2 * j_max)) + 2))
    gram_gap = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    # degree-n harmonics stay in H_{n-1/2} + H_{n+1/2}
    leakage = max(
        harmonic_leakage(n, j_max, quadrature) for n in range(int(round(j_max - 0.5)) + 1)
    )
    logger.info_with_context(
        "Angular spectrum checked",
        {"j_max": j_max, "basis_size": gram.shape[0], "max_residual": worst, "gram_gap": gram_gap},
    )

    result.headline.update(
        {
            "max_residual": worst,
            "gram_gap": gram_gap,
            "max_sigma3_residual": worst_sigma3,
            "max_harmonic_leakage": leakage,
        }
    )
    result.passed = (
        worst <= context.tolerance
        and gram_gap <= GRAM_TOL
        and worst_sigma3 <= SIGMA3_TOL
        and leakage <= HARMONIC_TOL
    )
    return result
