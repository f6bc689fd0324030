"""
Self-interaction |rho|^{r/2} u with rho the mass density <u, u> or the charge
density <beta u, u>, on pointwise samples and on j = 1/2 partial waves.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Collection, NamedTuple

import numpy as np
from glogger import get_component_logger

from .angular import PartialWaveIndex, SphereQuadrature, project_all
from .exceptions import DimensionMismatchError, DomainError, InvalidIndexError
from .fields import Measure, RadialGrid, RadialSpinor, Representation, SpinorField

logger = get_component_logger("nonlinear")

# |rho| at or below this is treated as zero before fractional powers
DENSITY_FLOOR = 1e-30


class DensityKind(str, Enum):
    MASS = "mass"
    CHARGE = "charge"


@dataclass(frozen=True)
class NonlinearSpec:
    """Exponent r > 0 and the density entering |rho|^{r/2}; r = 2 is the Soler model."""

    exponent: float
    kind: DensityKind = DensityKind.CHARGE

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind(self.kind))
        if not self.exponent > 0 or not math.isfinite(self.exponent):
            raise DomainError(
                f"nonlinear exponent must be positive and finite, got {self.exponent}"
            )


def halfspin_density(uplus, uminus, kind: DensityKind | str):
    """Density of a j = 1/2 partial wave, constant over the sphere."""
    plus, minus = np.abs(uplus) ** 2, np.abs(uminus) ** 2
    if DensityKind(kind) == DensityKind.MASS:
        return (plus + minus) / (4.0 * np.pi)
    return (plus - minus) / (4.0 * np.pi)


def pointwise_density(samples: np.ndarray, kind: DensityKind | str) -> np.ndarray:
    """<u, u> or <beta u, u> for samples of shape (4, ...)."""
    squared = np.abs(samples) ** 2
    if DensityKind(kind) == DensityKind.MASS:
        return np.sum(squared, axis=0)
    return squared[0] + squared[1] - squared[2] - squared[3]


def nonlinear_multiplier(density: np.ndarray, exponent: float) -> np.ndarray:
    """|rho|^{r/2}, exactly zero where |rho| <= DENSITY_FLOOR."""
    magnitude = np.abs(np.asarray(density, dtype=float))
    safe = np.where(magnitude > DENSITY_FLOOR, magnitude, 1.0)
    return np.where(magnitude > DENSITY_FLOOR, safe ** (exponent / 2.0), 0.0)


def soler_rhs(
    index: PartialWaveIndex,
    g: RadialSpinor,
    exponent: float,
    kind: DensityKind | str,
    phi: np.ndarray | None = None,
) -> RadialSpinor:
    """
    |rho|^{r/2} (g+, g-) on a j = 1/2 mode. A w-representation input needs the
    phi values so the density is taken of g = w/phi; the output keeps the input
    representation.
    """
    if index.j != 0.5:
        raise InvalidIndexError(f"soler_rhs acts on j = 1/2 modes only, got {index.label}")
    if g.representation == Representation.W:
        if phi is None:
            raise DimensionMismatchError(expected="phi values for a w-profile", actual=None)
        plus, minus = g.plus / phi, g.minus / phi
    else:
        plus, minus = g.plus, g.minus
    multiplier = nonlinear_multiplier(halfspin_density(plus, minus, kind), exponent)
    return RadialSpinor(multiplier * g.plus, multiplier * g.minus, g.representation)


class LeakageResult(NamedTuple):
    leakage: float
    total: float
    truncation_gap: float
    warning: str | None


def leakage(
    field_: SpinorField,
    kept: Collection[PartialWaveIndex],
    grid: RadialGrid,
    phi: np.ndarray | None = None,
) -> float:
    """L^2 norm of the modes of ``field_`` outside ``kept``."""
    kept = set(kept)
    outside = field_.restricted(i for i in field_.indices() if i not in kept)
    return outside.norm(grid, phi)


def reprojection_leakage(
    samples: np.ndarray,
    kept: Collection[PartialWaveIndex],
    quadrature: SphereQuadrature,
    j_max: float,
    grid: RadialGrid,
    measure: Measure = Measure.PHI2,
    phi: np.ndarray | None = None,
    truncation_tol: float = 1e-6,
) -> LeakageResult:
    """
    Re-project pointwise g-samples on every index up to ``j_max`` and measure the
    part outside ``kept``. The Parseval deficit between the pointwise norm and
    the re-projected norm is the content above ``j_max``; a warning is attached
    when it exceeds ``truncation_tol`` relative to the total.

    The deficit is a difference of squares, so relative gaps near 1e-8 are rounding.
    """
    weights = grid.weights(measure, phi)
    pointwise = float(np.sum(weights * quadrature.integrate(np.sum(np.abs(samples) ** 2, axis=0))))
    representation = Representation.G_PHI2 if measure == Measure.PHI2 else Representation.G_R2
    projected = project_all(samples, quadrature, j_max, representation)
    norm_phi = phi if measure == Measure.PHI2 else None
    outside = leakage(projected, kept, grid, norm_phi)
    captured = projected.norm_squared(grid, norm_phi)
    gap = math.sqrt(max(pointwise - captured, 0.0))
    total = math.sqrt(pointwise)
    warning = None
    if total > 0 and gap > truncation_tol * total:
        warning = f"content above j={j_max:g} carries {gap / total:.3g} of the norm"
        logger.warning("Truncated re-projection", j_max=j_max, relative_gap=gap / total)
    return LeakageResult(outside, total, gap, warning)
