"""
Warp functions phi(r) of the metric dr^2 + phi(r)^2 dw^2 and the quantities
derived from them: the weight sigma = r/phi, the partial-wave potential
k (1/phi - 1/r) and the curvatures.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Sequence

import numpy as np
from glogger import get_component_logger

from .exceptions import ConfigError, DomainError, EvaluationError, InvalidIndexError
from .fields import RadialGrid
from .models.error import ErrorCode, ErrorDetails, ErrorReport
from .models.records import AssumptionReport

logger = get_component_logger("manifold")

# Below this radius the small-r limits sigma -> 1, sigma'/sigma -> 0, V -> 0 are used.
R_EPS = 1e-6

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WarpFunction:
    """
    A warp with its analytic first and second derivatives.

    Equality and hashing use ``name`` and ``parameters`` only, so warps can key caches.
    """

    name: str
    phi: ArrayFn = field(compare=False, repr=False)
    dphi: ArrayFn = field(compare=False, repr=False)
    d2phi: ArrayFn = field(compare=False, repr=False)
    parameters: tuple = ()
    satisfies_a1: bool = True
    description: str = ""

    def values(self, r: np.ndarray | float):
        r = np.asarray(r, dtype=float)
        return self.phi(r), self.dphi(r), self.d2phi(r)


FLAT = WarpFunction(
    name="flat",
    phi=lambda r: np.asarray(r, dtype=float) * 1.0,
    dphi=lambda r: np.ones_like(np.asarray(r, dtype=float)),
    d2phi=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    description="Euclidean space, phi = r",
)

HYPERBOLIC = WarpFunction(
    name="hyperbolic",
    phi=np.sinh,
    dphi=np.cosh,
    d2phi=np.sinh,
    description="hyperbolic space, phi = sinh r",
)


def _conical_phi(r):
    r = np.asarray(r, dtype=float)
    return r + r**3 / (1.0 + r**2)


def _conical_dphi(r):
    r = np.asarray(r, dtype=float)
    return 1.0 + (3.0 * r**2 + r**4) / (1.0 + r**2) ** 2


def _conical_d2phi(r):
    r = np.asarray(r, dtype=float)
    return (6.0 * r - 2.0 * r**3) / (1.0 + r**2) ** 3


CONICAL = WarpFunction(
    name="conical",
    phi=_conical_phi,
    dphi=_conical_dphi,
    d2phi=_conical_d2phi,
    description="conical growth, phi = r + r^3/(1+r^2) ~ 2r at infinity",
)

SPHERE = WarpFunction(
    name="sin",
    phi=np.sin,
    dphi=np.cos,
    d2phi=lambda r: -np.sin(r),
    satisfies_a1=False,
    description="unit 3-sphere, phi = sin r (curvature oracle only, vanishes at pi)",
)


def builtin_warps() -> List[WarpFunction]:
    return [FLAT, HYPERBOLIC, CONICAL, SPHERE]


def odd_polynomial_warp(coefficients: Sequence[float], name: str | None = None) -> WarpFunction:
    """phi(r) = c0 r + c1 r^3 + c2 r^5 + ... from the odd-power coefficients (c0, c1, ...)."""
    coeffs = tuple(float(c) for c in coefficients)
    if not coeffs:
        raise ConfigError(
            [
                ErrorReport(
                    error_code=ErrorCode.CONFIG_CONSTRAINT,
                    message="an odd polynomial warp needs at least one coefficient",
                    details=ErrorDetails(location="warp.coefficients"),
                )
            ]
        )
    powers = np.arange(len(coeffs)) * 2 + 1
    c = np.asarray(coeffs)

    def phi(r):
        r = np.asarray(r, dtype=float)
        return np.sum(c[:, None] * np.power.outer(r.ravel(), powers).T, axis=0).reshape(r.shape)

    def dphi(r):
        r = np.asarray(r, dtype=float)
        terms = (c * powers)[:, None] * np.power.outer(r.ravel(), powers - 1).T
        return np.sum(terms, axis=0).reshape(r.shape)

    def d2phi(r):
        r = np.asarray(r, dtype=float)
        scale = c * powers * (powers - 1)
        exps = np.maximum(powers - 2, 0)
        terms = scale[:, None] * np.power.outer(r.ravel(), exps).T
        return np.sum(terms, axis=0).reshape(r.shape)

    label = name or "poly(" + ",".join(repr(x) for x in coeffs) + ")"
    return WarpFunction(
        name=label,
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        parameters=coeffs,
        description="odd polynomial warp",
    )


def warp_by_name(name: str) -> WarpFunction:
    for warp in builtin_warps():
        if warp.name == name:
            return warp
    known = ", ".join(w.name for w in builtin_warps())
    raise ConfigError(
        [
            ErrorReport(
                error_code=ErrorCode.CONFIG_CONSTRAINT,
                message=f"unknown warp '{name}'",
                details=ErrorDetails(location="warp.name", value=name, suggestions=[known]),
            )
        ]
    )


def checked_phi(w: WarpFunction, r: np.ndarray) -> np.ndarray:
    """phi(r), raising DomainError where it vanishes away from the origin."""
    phi = np.asarray(w.phi(r), dtype=float)
    if np.any(phi[r > R_EPS] == 0.0):
        bad = float(r[(phi == 0.0) & (r > R_EPS)].ravel()[0])
        raise DomainError(r=bad, details=ErrorDetails(location="phi", value=bad))
    return phi


def sigma_weight(w: WarpFunction, r):
    """sigma = r/phi and its log-derivative 1/r - phi'/phi; scalar in, scalar out."""
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise DomainError("sigma_weight needs r > 0")
    phi = checked_phi(w, r)
    dphi = np.asarray(w.dphi(r), dtype=float)
    small = r < R_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(small, 1.0, r / phi)
        logderiv = np.where(small, 0.0, 1.0 / r - dphi / phi)
    if scalar:
        return float(sigma[0]), float(logderiv[0])
    return sigma, logderiv


def potential(w: WarpFunction, k: int, r):
    """k (1/phi - 1/r), the partial-wave perturbation of the flat operator."""
    if k == 0:
        raise InvalidIndexError("k_j must be nonzero")
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise DomainError("potential needs r > 0")
    phi = checked_phi(w, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(r < R_EPS, 0.0, k * (1.0 / phi - 1.0 / r))
    return float(values[0]) if scalar else values


def curvatures(w: WarpFunction, r):
    """(sec_tan, sec_rad, R_h) with sec_tan = (1 - phi'^2)/phi^2, sec_rad = -phi''/phi."""
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    phi = checked_phi(w, r)
    dphi = np.asarray(w.dphi(r), dtype=float)
    d2phi = np.asarray(w.d2phi(r), dtype=float)
    sec_tan = (1.0 - dphi**2) / phi**2
    sec_rad = -d2phi / phi
    scalar_curvature = 2.0 * (2.0 * sec_rad + sec_tan)
    if scalar:
        return float(sec_tan[0]), float(sec_rad[0]), float(scalar_curvature[0])
    return sec_tan, sec_rad, scalar_curvature


def _extrapolate_to_zero(r: np.ndarray, values: np.ndarray) -> float:
    """Quadratic Lagrange extrapolation of the first three samples to r = 0."""
    r0, r1, r2 = r[:3]
    v0, v1, v2 = values[:3]
    l0 = (r1 * r2) / ((r0 - r1) * (r0 - r2))
    l1 = (r0 * r2) / ((r1 - r0) * (r1 - r2))
    l2 = (r0 * r1) / ((r2 - r0) * (r2 - r1))
    return float(l0 * v0 + l1 * v1 + l2 * v2)


def check_assumptions(w: WarpFunction, grid: RadialGrid, tol: float = 1e-6) -> AssumptionReport:
    """
    Evaluate the structural assumptions on the grid.

    The log-derivative bound is only required on r >= 1, since phi ~ r forces
    phi'/phi ~ 1/r near the origin. ``inf phi/r`` is reported but not required.
    """
    r = grid.r
    if r.size < 3:
        raise DomainError("check_assumptions needs at least three grid nodes")

    with np.errstate(all="ignore"):
        phi, dphi, d2phi = (np.asarray(v, dtype=float) for v in w.values(r))
    for values in (phi, dphi, d2phi):
        bad = ~np.isfinite(values)
        if np.any(bad):
            raise EvaluationError(
                warp=w.name,
                r=float(r[bad][0]),
                details=ErrorDetails(location="phi", value=float(r[bad][0])),
            )

    diagnostics: List[str] = []
    positive = bool(np.all(phi > 0))
    if not positive:
        first = float(r[phi <= 0][0])
        diagnostics.append(f"positivity: phi <= 0 at r={first!r}")

    # extrapolation error is O(dr^3) for phi and O(dr^2) for phi'
    origin_tol = max(tol, grid.dr**2)
    phi_origin = _extrapolate_to_zero(r, phi)
    dphi_origin = _extrapolate_to_zero(r, dphi)
    origin_ok = abs(phi_origin) <= origin_tol and abs(dphi_origin - 1.0) <= origin_tol
    if abs(phi_origin) > origin_tol:
        diagnostics.append(f"origin: phi(0) ~ {phi_origin!r} != 0")
    if abs(dphi_origin - 1.0) > origin_tol:
        diagnostics.append(f"origin: phi'(0) ~ {dphi_origin!r} != 1")

    tail = r >= 1.0
    if np.any(tail):
        inf_tail = float(np.min(phi[tail]))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_derivative = np.abs(dphi[tail] / phi[tail])
        sup_log = float(np.max(log_derivative)) if positive else math.inf
    else:
        inf_tail, sup_log = math.nan, math.nan
        diagnostics.append("tail: grid does not reach r >= 1")
    tail_ok = bool(np.any(tail)) and inf_tail > tol and math.isfinite(sup_log)
    if np.any(tail) and not inf_tail > tol:
        diagnostics.append(f"tail: inf phi on r >= 1 is {inf_tail!r}")

    with np.errstate(divide="ignore", invalid="ignore"):
        sec_tan = (1.0 - dphi**2) / phi**2
        sec_rad = -d2phi / phi
        scalar_curvature = 2.0 * (2.0 * sec_rad + sec_tan)
    usable = phi > 0
    curvature_bound = math.inf
    if np.any(usable):
        curvature_bound = float(np.max(np.abs(scalar_curvature[usable])))
    curvature_ok = math.isfinite(curvature_bound)
    if not curvature_ok:
        diagnostics.append("curvature: scalar curvature is unbounded on the grid")

    with np.errstate(divide="ignore", invalid="ignore"):
        inf_phi_over_r = float(np.min(phi / r))

    passed = positive and origin_ok and tail_ok and curvature_ok
    report = AssumptionReport(
        warp=w.name,
        passed=passed,
        sup_log_derivative=sup_log,
        inf_phi_tail=inf_tail,
        curvature_bound=curvature_bound,
        inf_phi_over_r=inf_phi_over_r,
        phi_at_origin=phi_origin,
        dphi_at_origin=dphi_origin,
        diagnostics=diagnostics,
    )
    logger.debug("Assumptions checked", warp=w.name, passed=passed, grid=grid.tag)
    return report


class PotentialBound(NamedTuple):
    sup_value: float
    sup_derivative: float
    argmax_r: float


def potential_sup_bound(w: WarpFunction, grid: RadialGrid) -> PotentialBound:
    """sup |1/phi - 1/r| and sup |d/dr (1/phi - 1/r)| on the grid (the W^{1,inf} size of V/k)."""
    r = grid.r
    values = np.abs(potential(w, 1, r))
    phi = checked_phi(w, r)
    dphi = np.asarray(w.dphi(r), dtype=float)
    derivative = np.where(r < R_EPS, 0.0, np.abs(-dphi / phi**2 + 1.0 / r**2))
    i = int(np.argmax(values))
    return PotentialBound(float(values[i]), float(np.max(derivative)), float(r[i]))


class GainReport(NamedTuple):
    min_phi_over_r: float
    gain_everywhere: bool
    max_sec_tan: float


def sectional_gain(w: WarpFunction, grid: RadialGrid) -> GainReport:
    """Whether phi/r >= 1 on the grid, which holds when the tangential curvature is <= 0."""
    r = grid.r
    phi = checked_phi(w, r)
    sec_tan, _, _ = curvatures(w, r)
    ratio = phi / r
    return GainReport(
        float(np.min(ratio)), bool(np.all(ratio >= 1.0 - 1e-12)), float(np.max(sec_tan))
    )


def warp_table(grid: RadialGrid) -> List[Dict[str, object]]:
    """One row per built-in warp, used by ``dirac-warp list-warps``."""
    rows = []
    for warp in builtin_warps():
        report = check_assumptions(warp, grid)
        rows.append(
            {
                "name": warp.name,
                "description": warp.description,
                "a1": warp.satisfies_a1,
                "passed": report.passed,
                "sup_log_derivative": report.sup_log_derivative,
                "curvature_bound": report.curvature_bound,
            }
        )
    return rows
