"""
Norms and functionals on spinor fields: L^q over the manifold or over R^3,
weighted mixed Strichartz functionals, radial H^s, H^{a,b}, and the
admissibility rules for (p, q).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np
from glogger import get_component_logger
from scipy.integrate import trapezoid

from .angular import SphereQuadrature, synthesize
from .exceptions import AdmissibilityError, DimensionMismatchError, DomainError
from .fields import Measure, RadialGrid, RadialSpinor, Representation, SpinorField, Trajectory
from .manifold import FLAT, WarpFunction, checked_phi, sigma_weight
from .models.error import ErrorDetails
from .radial_ops import lambda_squared, sobolev_apply

logger = get_component_logger("norms")

ADMISSIBILITY_TOL = 1e-12


class NormFamily(str, Enum):
    MASSLESS = "massless"
    MASSIVE = "massive"


@dataclass(frozen=True)
class Admissibility:
    """Outcome of ``validate_admissible``; truthy iff admissible."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_admissible(p: float, q: float, family: NormFamily | str) -> Admissibility:
    """
    Massless pairs lie on 2/p + 2/q = 1 with p > 2; massive pairs on
    2/p + 3/q = 3/2 with p >= 2 and 2 <= q <= 6. p may be infinite.
    """
    family = NormFamily(family)
    p, q = float(p), float(q)
    if not (q >= 1 and p >= 1) or math.isnan(p) or math.isnan(q):
        return Admissibility(False, f"exponents must be >= 1, got p={p:g}, q={q:g}")
    if family == NormFamily.MASSLESS:
        if abs(2 / p + 2 / q - 1) > ADMISSIBILITY_TOL:
            return Admissibility(False, f"2/{p:g}+2/{q:g} ≠ 1")
        if not p > 2:
            return Admissibility(False, f"p={p:g} must exceed 2 for massless pairs")
        return Admissibility(True)
    if abs(2 / p + 3 / q - 1.5) > ADMISSIBILITY_TOL:
        return Admissibility(False, f"2/{p:g}+3/{q:g} ≠ 3/2")
    if p < 2:
        return Admissibility(False, f"p={p:g} is below 2")
    if not 2 <= q <= 6:
        return Admissibility(False, f"q={q:g} is outside [2, 6]")
    return Admissibility(True)


@dataclass(frozen=True)
class MixedNormSpec:
    """(p, q) on the admissibility line of ``family``; weight (phi/r)^e, e = 1 - 2/q by default."""

    p: float
    q: float
    family: NormFamily = NormFamily.MASSLESS
    weight_exponent: float | None = None
    T: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", NormFamily(self.family))
        verdict = validate_admissible(self.p, self.q, self.family)
        if not verdict:
            raise AdmissibilityError(
                reason=verdict.reason,
                details=ErrorDetails(
                    value={"p": self.p, "q": self.q, "family": self.family.value}
                ),
            )
        if self.weight_exponent is None:
            object.__setattr__(self, "weight_exponent", 1.0 - 2.0 / self.q)

    @property
    def sobolev_s(self) -> float:
        """Regularity paired with the estimate: 2/p (massless) or 1/p (massive)."""
        return (2.0 if self.family == NormFamily.MASSLESS else 1.0) / self.p

    @property
    def label(self) -> str:
        return f"({self.p:g},{self.q:g})"


def _j_max(field_: SpinorField) -> float:
    return max(index.j for index in field_.indices())


def _default_quadrature(field_: SpinorField) -> SphereQuadrature:
    return SphereQuadrature.for_j_max(_j_max(field_), extra=5)


def g_profiles(
    field_: SpinorField, measure: Measure, warp: WarpFunction, grid: RadialGrid
) -> SpinorField:
    """
    The field as pointwise profiles g. A w-representation field is read as
    w = phi g for the manifold measure and as w = r g for the Euclidean one.
    """
    if field_.representation != Representation.W:
        return field_
    factor = checked_phi(warp, grid.r) if measure == Measure.PHI2 else grid.r
    target = Representation.G_PHI2 if measure == Measure.PHI2 else Representation.G_R2
    return field_.map(lambda _, s: RadialSpinor(s.plus / factor, s.minus / factor, target))


def pointwise_modulus(samples: np.ndarray) -> np.ndarray:
    """|u(x)| in C^4 for samples of shape (4, N, nodes)."""
    return np.sqrt(np.sum(np.abs(samples) ** 2, axis=0))


def samples_lq_norm(
    modulus: np.ndarray, q: float, radial_weights: np.ndarray, quadrature: SphereQuadrature
) -> float:
    """Composite quadrature of |u|^q against radial_weights x sphere weights."""
    if q < 1:
        raise DomainError(f"L^q needs q >= 1, got {q}")
    if math.isinf(q):
        return float(np.max(modulus)) if modulus.size else 0.0
    spherical = quadrature.integrate(modulus**q)
    return float(np.sum(radial_weights * spherical) ** (1.0 / q))


def lq_norm(
    field_: SpinorField,
    q: float,
    measure: Measure,
    grid: RadialGrid,
    warp: WarpFunction = FLAT,
    quadrature: SphereQuadrature | None = None,
    radial_factor: np.ndarray | None = None,
) -> float:
    """
    ||f||_{L^q} on the manifold (Measure.PHI2) or on R^3 (Measure.R2).

    ``radial_factor`` multiplies the field pointwise before the norm is taken.
    """
    if q < 1:
        raise DomainError(f"L^q needs q >= 1, got {q}")
    if measure == Measure.DR:
        raise DomainError("L^q is defined against phi^2 dr or r^2 dr")
    if not len(field_):
        return 0.0
    quadrature = quadrature or _default_quadrature(field_)
    profiles = g_profiles(field_, measure, warp, grid)
    modulus = pointwise_modulus(synthesize(profiles, quadrature))
    if radial_factor is not None:
        modulus = modulus * np.abs(np.asarray(radial_factor))[:, None]
    phi = checked_phi(warp, grid.r) if measure == Measure.PHI2 else None
    return samples_lq_norm(modulus, q, grid.weights(measure, phi), quadrature)


def strichartz_functional(
    trajectory: Trajectory,
    spec: MixedNormSpec,
    warp: WarpFunction,
    grid: RadialGrid,
    quadrature: SphereQuadrature | None = None,
    weighted: bool = True,
) -> float:
    """
    ||(phi/r)^e u||_{L^p_t L^q(M)} over the sampled interval: trapezoid in time
    for finite p, max over samples for p infinite.
    """
    if len(trajectory) == 0:
        raise DimensionMismatchError("empty trajectory")
    phi = checked_phi(warp, grid.r)
    factor = (phi / grid.r) ** spec.weight_exponent if weighted else None
    quadrature = quadrature or _default_quadrature(trajectory.initial)
    values = np.array(
        [
            lq_norm(state, spec.q, Measure.PHI2, grid, warp, quadrature, factor)
            for state in trajectory.states
        ]
    )
    if math.isinf(spec.p):
        return float(np.max(values))
    if len(values) == 1:
        return float(values[0])
    times = np.asarray(trajectory.times)
    integral = trapezoid(values**spec.p, times)
    return float(abs(integral) ** (1.0 / spec.p))


def _g_component(f: RadialSpinor | np.ndarray, warp: WarpFunction, grid: RadialGrid):
    if isinstance(f, RadialSpinor):
        if f.representation == Representation.W:
            phi = checked_phi(warp, grid.r)
            return [f.plus / phi, f.minus / phi]
        if f.representation == Representation.G_R2 and warp != FLAT:
            raise DimensionMismatchError(
                expected=Representation.G_PHI2.value, actual=f.representation.value
            )
        return [f.plus, f.minus]
    return [np.asarray(f, dtype=complex)]


def hs_norm(f: RadialSpinor | np.ndarray, s: float, warp: WarpFunction, grid: RadialGrid) -> float:
    """||Lambda_r^s f||_{L^2(phi^2 dr)}, componentwise for spinors."""
    weights = grid.weights(Measure.PHI2, checked_phi(warp, grid.r))
    total = 0.0
    for component in _g_component(f, warp, grid):
        transformed = sobolev_apply(warp, grid, s, component)
        total += float(np.sum(weights * np.abs(transformed) ** 2))
    return math.sqrt(total)


def japanese_bracket(x: float) -> float:
    """<x> = (1 + x^2)^(1/2)."""
    return math.sqrt(1.0 + float(x) ** 2)


def hab_norm(
    field_: SpinorField, a: float, b: float, warp: WarpFunction, grid: RadialGrid
) -> float:
    """[sum over modes and components of <k>^{2b} ||f||^2 + ||f||^2_{H^a}]^{1/2}."""
    weights = grid.weights(Measure.PHI2, checked_phi(warp, grid.r))
    total = 0.0
    for index, spinor in field_.items():
        angular = japanese_bracket(index.k) ** (2 * b)
        for component in _g_component(spinor, warp, grid):
            l2 = float(np.sum(weights * np.abs(component) ** 2))
            total += angular * l2 + hs_norm(component, a, warp, grid) ** 2
    return math.sqrt(total)


def sigma_isometry_gap(
    field_: SpinorField,
    q: float,
    warp: WarpFunction,
    grid: RadialGrid,
    quadrature: SphereQuadrature | None = None,
) -> float:
    """Relative gap between ||sigma^{2/q} f||_{L^q(M)} and ||f||_{L^q(R^3)}, f a g-profile field."""
    if field_.representation == Representation.W:
        raise DimensionMismatchError(expected="a g-profile field", actual=Representation.W.value)
    sigma, _ = sigma_weight(warp, grid.r)
    euclidean = lq_norm(field_, q, Measure.R2, grid, warp, quadrature)
    curved = lq_norm(field_, q, Measure.PHI2, grid, warp, quadrature, sigma ** (2.0 / q))
    return abs(curved - euclidean) / euclidean if euclidean else abs(curved)


def h1_continuity_ratio(f: np.ndarray, warp: WarpFunction, grid: RadialGrid) -> float:
    """
    ||sigma f||_{H^1(M)} / ||f||_{H^1(R^3)} for a radial profile f on r^2 dr.

    Both sides share w = r f, so the ratio squared is 1 + <w, (phi''/phi) w> / ||f||^2_{H^1}.
    """
    w = grid.r * np.asarray(f, dtype=complex)
    curved = float(np.real(np.vdot(w, lambda_squared(warp, grid) @ w)))
    flat = float(np.real(np.vdot(w, lambda_squared(FLAT, grid) @ w)))
    if flat <= 0:
        raise DomainError("h1_continuity_ratio needs a nonzero profile")
    return math.sqrt(max(curved, 0.0) / flat)


def leibniz_bound(warp: WarpFunction, grid: RadialGrid) -> float:
    """1 + sup |sigma'/sigma| on the grid."""
    _, log_derivative = sigma_weight(warp, grid.r)
    return 1.0 + float(np.max(np.abs(log_derivative)))


def l2_aggregate(values: Iterable[float]) -> float:
    return math.sqrt(sum(v * v for v in values))
