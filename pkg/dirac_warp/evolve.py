"""
Time evolution of partial-wave data under i d/dt psi = H psi.

Linear blocks are propagated independently (Crank-Nicolson through a sparse LU
or the exact exponential through a dense eigendecomposition). The nonlinear
flow uses Strang splitting around the self-interaction, and ``picard_solve``
iterates the Duhamel map on the time-step grid.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from glogger import get_component_logger
from scipy.sparse.linalg import splu

from .angular import PartialWaveIndex, SphereQuadrature, indices_up_to, project, synthesize
from .decorators.cache import dynamic_cached
from .exceptions import (
    BlowUpError,
    BudgetExhaustedError,
    DimensionMismatchError,
    EvaluationError,
    InvalidIndexError,
    NoContractionError,
)
from .fields import RadialGrid, RadialSpinor, Representation, SpinorField, Trajectory
from .manifold import WarpFunction, checked_phi
from .models.config import EvolutionConfig, Scheme
from .nonlinear import NonlinearSpec, halfspin_density, nonlinear_multiplier, pointwise_density
from .norms import MixedNormSpec, strichartz_functional
from .radial_ops import RadialOperator, build_curved, energy

logger = get_component_logger("evolve")

OperatorFor = Callable[[PartialWaveIndex], RadialOperator]

# consecutive non-contracting Picard iterations tolerated before giving up
NO_CONTRACTION_PATIENCE = 3


class NonlinearPath(str, Enum):
    AUTO = "auto"
    FAST = "fast"
    GENERAL = "general"


@dataclass(frozen=True, eq=False)
class Propagator:
    """One time step psi -> U(dt) psi for a fixed operator."""

    operator: RadialOperator
    dt: float
    scheme: Scheme
    apply: Callable[[np.ndarray], np.ndarray]

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        return self.apply(psi)


# each entry pins a dense 2N x 2N eigenbasis
@dynamic_cached(maxsize=8)
def eigensystem(H: RadialOperator):
    dense = H.dense()
    if not np.any(dense.imag):
        dense = dense.real
    eigenvalues, eigenvectors = np.linalg.eigh(dense)
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return eigenvalues, eigenvectors


def _exponential(H: RadialOperator, dt: float) -> Callable[[np.ndarray], np.ndarray]:
    eigenvalues, eigenvectors = eigensystem(H)
    phases = np.exp(-1j * dt * eigenvalues)
    # V^H psi as (psi^* V)^*, without a conjugated copy of V
    return lambda psi: eigenvectors @ (phases * (np.conj(psi) @ eigenvectors).conj())


@dynamic_cached(maxsize=128)
def propagator(H: RadialOperator, dt: float, scheme: Scheme | str = Scheme.CRANK_NICOLSON):
    """Cached step callable; negative ``dt`` steps backwards in time."""
    scheme = Scheme(scheme)
    if scheme == Scheme.SPECTRAL:
        return Propagator(H, dt, scheme, _exponential(H, dt))
    identity = sp.identity(H.size, dtype=complex, format="csc")
    half = 0.5j * dt * H.matrix
    try:
        factor = splu((identity + half).tocsc())
    except RuntimeError as exc:
        raise EvaluationError(f"Crank-Nicolson system is singular: {exc}") from exc
    explicit = (identity - half).tocsr()
    return Propagator(H, dt, scheme, lambda psi: factor.solve(explicit @ psi))


def release_caches() -> None:
    """Drop cached eigenbases and step factorizations; operators are keyed by identity."""
    eigensystem.clear()
    propagator.clear()


def _as_vector(psi: np.ndarray | RadialSpinor) -> np.ndarray:
    if isinstance(psi, RadialSpinor):
        if psi.representation != Representation.W:
            raise DimensionMismatchError(
                expected=Representation.W.value, actual=psi.representation.value
            )
        return psi.stacked()
    return np.asarray(psi, dtype=complex)


def step(H: RadialOperator, psi, dt: float, scheme: Scheme | str = Scheme.CRANK_NICOLSON):
    vector = _as_vector(psi)
    if vector.shape != (H.size,):
        raise DimensionMismatchError(expected=H.size, actual=vector.shape)
    result = propagator(H, dt, scheme)(vector)
    return RadialSpinor.from_stacked(result) if isinstance(psi, RadialSpinor) else result


def _step_count(cfg: EvolutionConfig) -> int:
    steps = int(round(cfg.T / cfg.dt))
    if steps < 1:
        raise DimensionMismatchError(f"horizon T={cfg.T} is shorter than one step dt={cfg.dt}")
    return steps


def _sampled(step_index: int, steps: int, stride: int) -> bool:
    return step_index % stride == 0 or step_index == steps


def _check_finite(vector: np.ndarray, time: float) -> None:
    if not np.all(np.isfinite(vector)):
        raise BlowUpError(time)


def evolve_linear(H: RadialOperator, psi0, cfg: EvolutionConfig) -> Trajectory:
    """States (RadialSpinor, w-representation) and energies every ``sample_stride`` steps."""
    vector = _as_vector(psi0)
    if vector.shape != (H.size,):
        raise DimensionMismatchError(expected=H.size, actual=vector.shape)
    steps = _step_count(cfg)
    advance = propagator(H, cfg.dt, cfg.scheme)
    trajectory = Trajectory()
    trajectory.append(0.0, RadialSpinor.from_stacked(vector), energy(H, vector))
    initial_norm = np.linalg.norm(vector)
    for n in range(1, steps + 1):
        vector = advance(vector)
        if _sampled(n, steps, cfg.sample_stride):
            _check_finite(vector, n * cfg.dt)
            trajectory.append(n * cfg.dt, RadialSpinor.from_stacked(vector), energy(H, vector))
    drift = abs(np.linalg.norm(vector) - initial_norm) / initial_norm if initial_norm else 0.0
    logger.debug("Linear evolution done", k=H.k, steps=steps, relative_norm_drift=drift)
    return trajectory


def curved_operators(m: float, warp: WarpFunction, grid: RadialGrid) -> OperatorFor:
    return lambda index: build_curved(index, m, warp, grid)


def evolve_field_linear(field_: SpinorField, operator_for: OperatorFor, cfg: EvolutionConfig):
    """Evolve every block of a w-representation field; blocks never exchange mass."""
    if not len(field_):
        raise DimensionMismatchError("cannot evolve an empty field")
    per_mode = {index: evolve_linear(operator_for(index), s, cfg) for index, s in field_.items()}
    first = next(iter(per_mode.values()))
    trajectory = Trajectory()
    for n, time in enumerate(first.times):
        state = SpinorField({index: t.states[n] for index, t in per_mode.items()})
        trajectory.append(time, state, sum(t.energies[n] for t in per_mode.values()))
    return trajectory


def _uniform_spacing(times: Sequence[float]) -> float:
    spacing = np.diff(np.asarray(times, dtype=float))
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        raise DimensionMismatchError("Duhamel quadrature needs uniformly spaced samples")
    return float(spacing[0])


def duhamel_residuals(H0: RadialOperator, V: RadialOperator, trajectory: Trajectory) -> List[float]:
    """
    ||u(t_k) - e^{-i t_k H0} u_0 + i int_0^{t_k} e^{-i(t_k - s) H0} V u(s) ds|| at every sample,
    the integral by the recursive trapezoid rule on the sample spacing.
    """
    if H0.size != V.size or H0.grid != V.grid:
        raise DimensionMismatchError(expected=H0.grid.tag, actual=V.grid.tag)
    states = [_as_vector(s) for s in trajectory.states]
    if len(states) < 2:
        return [0.0] * len(states)
    delta = _uniform_spacing(trajectory.times)
    shift = _exponential(H0, delta)
    weight = math.sqrt(H0.grid.dr)
    free = states[0]
    integral = np.zeros_like(free)
    previous_forcing = V.apply(states[0])
    residuals = [0.0]
    for state in states[1:]:
        forcing = V.apply(state)
        integral = shift(integral + 0.5 * delta * previous_forcing) + 0.5 * delta * forcing
        free = shift(free)
        residuals.append(float(weight * np.linalg.norm(state - free + 1j * integral)))
        previous_forcing = forcing
    return residuals


def duhamel_residual(H0: RadialOperator, V: RadialOperator, trajectory: Trajectory) -> float:
    return max(duhamel_residuals(H0, V, trajectory))


class _ModeLayout:
    """Fixed ordering of modes so that a field is an array of shape (modes, 2N)."""

    def __init__(self, indices: Sequence[PartialWaveIndex], phi: np.ndarray):
        self.indices = list(indices)
        self.phi = phi

    def to_array(self, field_: SpinorField) -> np.ndarray:
        size = 2 * self.phi.shape[0]
        rows = [
            field_[i].stacked() if i in field_ else np.zeros(size, complex) for i in self.indices
        ]
        return np.array(rows, dtype=complex)

    def to_field(self, array: np.ndarray) -> SpinorField:
        return SpinorField(
            {index: RadialSpinor.from_stacked(row) for index, row in zip(self.indices, array)}
        )

    def samples(self, array: np.ndarray, quadrature: SphereQuadrature) -> np.ndarray:
        half = self.phi.shape[0]
        profiles = SpinorField(
            {
                index: RadialSpinor(
                    row[:half] / self.phi, row[half:] / self.phi, Representation.G_PHI2
                )
                for index, row in zip(self.indices, array)
            }
        )
        return synthesize(profiles, quadrature)

    def project(self, samples: np.ndarray, quadrature: SphereQuadrature) -> np.ndarray:
        rows = []
        for index in self.indices:
            g = project(samples, index, quadrature)
            rows.append(np.concatenate([g.plus * self.phi, g.minus * self.phi]))
        return np.array(rows)


@dataclass
class _NonlinearContext:
    layout: _ModeLayout
    nl: NonlinearSpec
    path: NonlinearPath
    quadrature: SphereQuadrature | None

    def multiplied(self, samples: np.ndarray) -> np.ndarray:
        density = pointwise_density(samples, self.nl.kind)
        return nonlinear_multiplier(density, self.nl.exponent) * samples

    def halfspin_multiplier(self, array: np.ndarray) -> np.ndarray:
        half = self.layout.phi.shape[0]
        row = array[0]
        phi = self.layout.phi
        density = halfspin_density(row[:half] / phi, row[half:] / phi, self.nl.kind)
        return np.tile(nonlinear_multiplier(density, self.nl.exponent), 2)

    def flow(self, array: np.ndarray, dt: float, time: float) -> np.ndarray:
        """One nonlinear substep of length dt."""
        if self.path == NonlinearPath.FAST:
            multiplier = self.halfspin_multiplier(array)
            _check_finite(multiplier, time)
            return array * np.exp(-1j * dt * multiplier)
        u = self.layout.samples(array, self.quadrature)
        midpoint = u - 0.5j * dt * self.multiplied(u)
        updated = u - 1j * dt * self.multiplied(midpoint)
        _check_finite(updated, time)
        return self.layout.project(updated, self.quadrature)

    def term(self, array: np.ndarray, time: float) -> np.ndarray:
        """N(u) in the w-representation."""
        if self.path == NonlinearPath.FAST:
            result = array * self.halfspin_multiplier(array)
        else:
            u = self.layout.samples(array, self.quadrature)
            result = self.layout.project(self.multiplied(u), self.quadrature)
        _check_finite(result, time)
        return result


def _resolve_path(field_: SpinorField, path: NonlinearPath | str) -> NonlinearPath:
    path = NonlinearPath(path)
    single_halfspin = len(field_) == 1 and field_.indices()[0].j == 0.5
    if path == NonlinearPath.AUTO:
        return NonlinearPath.FAST if single_halfspin else NonlinearPath.GENERAL
    if path == NonlinearPath.FAST and not single_halfspin:
        raise InvalidIndexError("the phase-rotation path needs a single j = 1/2 mode")
    return path


def _nonlinear_setup(
    field_: SpinorField,
    warp: WarpFunction,
    grid: RadialGrid,
    nl: NonlinearSpec,
    path: NonlinearPath | str,
    j_max: float | None,
    quadrature: SphereQuadrature | None,
) -> _NonlinearContext:
    if not len(field_):
        raise DimensionMismatchError("cannot evolve an empty field")
    if field_.representation != Representation.W:
        raise DimensionMismatchError(
            expected=Representation.W.value, actual=field_.representation.value
        )
    path = _resolve_path(field_, path)
    phi = checked_phi(warp, grid.r)
    if path == NonlinearPath.FAST:
        return _NonlinearContext(_ModeLayout(field_.indices(), phi), nl, path, None)
    j_max = j_max if j_max is not None else max(i.j for i in field_.indices())
    indices = indices_up_to(j_max)
    missing = [i for i in field_.indices() if i not in set(indices)]
    if missing:
        raise InvalidIndexError(f"mode {missing[0].label} lies above j_max={j_max:g}")
    quadrature = quadrature or SphereQuadrature(int(round(4 * j_max)) + 4)
    return _NonlinearContext(_ModeLayout(indices, phi), nl, path, quadrature)


def _block_propagators(layout: _ModeLayout, operator_for: OperatorFor, dt: float, scheme):
    return [propagator(operator_for(index), dt, scheme) for index in layout.indices]


def _advance(array: np.ndarray, propagators: Sequence[Propagator]) -> np.ndarray:
    return np.array([advance(row) for advance, row in zip(propagators, array)])


def evolve_nonlinear(
    field_: SpinorField,
    m: float,
    warp: WarpFunction,
    grid: RadialGrid,
    cfg: EvolutionConfig,
    nl: NonlinearSpec,
    path: NonlinearPath | str = NonlinearPath.AUTO,
    j_max: float | None = None,
    quadrature: SphereQuadrature | None = None,
    operator_for: OperatorFor | None = None,
) -> Trajectory:
    """
    Strang splitting: half linear step, nonlinear substep, half linear step.

    The fast path (a single j = 1/2 mode) applies the exact phase rotation
    exp(-i dt |rho|^{r/2}); the general path synthesizes the field, takes an
    explicit midpoint substep pointwise and re-projects on every index up to
    ``j_max``, so states carry all of those modes.
    """
    context = _nonlinear_setup(field_, warp, grid, nl, path, j_max, quadrature)
    operator_for = operator_for or curved_operators(m, warp, grid)
    steps = _step_count(cfg)
    halves = _block_propagators(context.layout, operator_for, 0.5 * cfg.dt, cfg.scheme)

    array = context.layout.to_array(field_)
    trajectory = Trajectory()
    trajectory.append(0.0, context.layout.to_field(array))
    for n in range(1, steps + 1):
        time = n * cfg.dt
        array = _advance(array, halves)
        array = context.flow(array, cfg.dt, time)
        array = _advance(array, halves)
        _check_finite(array, time)
        if _sampled(n, steps, cfg.sample_stride):
            trajectory.append(time, context.layout.to_field(array))
    logger.debug(
        "Nonlinear evolution done",
        path=context.path.value,
        modes=len(context.layout.indices),
        steps=steps,
        exponent=nl.exponent,
        density=nl.kind.value,
    )
    return trajectory


class PicardResult(NamedTuple):
    trajectory: Trajectory
    ratios: List[float]
    distances: List[float]
    iterations: int


def _x_norm(
    difference: np.ndarray,
    times: Sequence[float],
    layout: _ModeLayout,
    dr: float,
    strichartz: MixedNormSpec | None,
    warp: WarpFunction,
    grid: RadialGrid,
) -> float:
    """max over time of the L^2 norm, plus the Strichartz functional when requested."""
    l2 = math.sqrt(dr) * float(np.max(np.linalg.norm(difference.reshape(len(times), -1), axis=1)))
    if strichartz is None:
        return l2
    trajectory = Trajectory(list(times), [layout.to_field(state) for state in difference])
    return l2 + strichartz_functional(trajectory, strichartz, warp, grid)


def picard_solve(
    u0: SpinorField,
    m: float,
    warp: WarpFunction,
    grid: RadialGrid,
    nl: NonlinearSpec,
    T: float,
    tol: float,
    dt: float,
    scheme: Scheme | str = Scheme.CRANK_NICOLSON,
    max_iter: int = 30,
    strichartz: MixedNormSpec | None = None,
    path: NonlinearPath | str = NonlinearPath.AUTO,
    j_max: float | None = None,
    quadrature: SphereQuadrature | None = None,
    operator_for: OperatorFor | None = None,
) -> PicardResult:
    """
    Iterate u -> S(t) u0 - i int_0^t S(t - s) N(u(s)) ds from the linear solution
    on the grid t_k = k dt, until successive iterates are closer than ``tol``.
    """
    context = _nonlinear_setup(u0, warp, grid, nl, path, j_max, quadrature)
    operator_for = operator_for or curved_operators(m, warp, grid)
    steps = int(round(T / dt))
    if steps < 1:
        raise DimensionMismatchError(f"horizon T={T} is shorter than one step dt={dt}")
    shifts = _block_propagators(context.layout, operator_for, dt, scheme)
    times = [n * dt for n in range(steps + 1)]

    free = np.empty((steps + 1,) + context.layout.to_array(u0).shape, dtype=complex)
    free[0] = context.layout.to_array(u0)
    for n in range(1, steps + 1):
        free[n] = _advance(free[n - 1], shifts)

    def duhamel_map(iterate: np.ndarray) -> np.ndarray:
        forcing = [context.term(state, time) for state, time in zip(iterate, times)]
        result = np.empty_like(iterate)
        result[0] = free[0]
        integral = np.zeros_like(free[0])
        for n in range(1, steps + 1):
            integral = _advance(integral + 0.5 * dt * forcing[n - 1], shifts)
            integral = integral + 0.5 * dt * forcing[n]
            result[n] = free[n] - 1j * integral
        return result

    iterate = free
    ratios: List[float] = []
    distances: List[float] = []
    stalled = 0
    for iteration in range(1, max_iter + 1):
        updated = duhamel_map(iterate)
        distance = _x_norm(
            updated - iterate, times, context.layout, grid.dr, strichartz, warp, grid
        )
        distances.append(distance)
        iterate = updated
        if len(distances) > 1:
            ratio = distance / distances[-2] if distances[-2] > 0 else 0.0
            ratios.append(ratio)
            stalled = stalled + 1 if ratio >= 1.0 else 0
            if stalled >= NO_CONTRACTION_PATIENCE:
                logger.warning("Picard iteration does not contract", horizon=T, ratios=ratios[-3:])
                raise NoContractionError(T, ratios)
        if distance < tol:
            trajectory = Trajectory(times, [context.layout.to_field(state) for state in iterate])
            logger.debug("Picard converged", horizon=T, iterations=iteration, distance=distance)
            return PicardResult(trajectory, ratios, distances, iteration)
    raise BudgetExhaustedError(
        reason=f"Picard iteration did not reach tol={tol:g} in {max_iter} iterations"
    )


def trajectory_to_rows(
    trajectory: Trajectory, grid: RadialGrid, phi: np.ndarray | None = None
) -> List[Dict[str, object]]:
    """One row per (sample, mode) with the L^2 mass, plus a ``total`` row per sample."""
    rows: List[Dict[str, object]] = []
    for time, state in zip(trajectory.times, trajectory.states):
        if isinstance(state, RadialSpinor):
            modes = {"block": state}
        else:
            modes = {index.label: spinor for index, spinor in state.items()}
        total = 0.0
        for label, spinor in modes.items():
            mass = spinor.norm_squared(grid, phi)
            total += mass
            rows.append({"t": time, "mode": label, "l2_mass": mass})
        rows.append({"t": time, "mode": "total", "l2_mass": total})
    return rows
