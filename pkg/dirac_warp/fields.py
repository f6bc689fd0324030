"""
Radial grids and the containers that carry spinor data on them.

A ``RadialSpinor`` holds the two radial profiles of one partial-wave block. A
``SpinorField`` maps partial-wave indices to radial spinors. Profiles are tagged
with the representation they are stored in:

- ``g-on-phi2dr``: the physical profile g, square integrable against phi^2 dr
- ``g-on-r2dr``: the sigma-weighted profile, square integrable against r^2 dr
- ``w-on-dr``: the measure-flattened profile w (w = phi*g or w = r*g) on plain dr
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, Iterator, Mapping

import numpy as np

from .exceptions import DimensionMismatchError, EvaluationError


class Representation(str, Enum):
    G_PHI2 = "g-on-phi2dr"
    G_R2 = "g-on-r2dr"
    W = "w-on-dr"


class Measure(str, Enum):
    """Radial measures used by the quadratures."""

    DR = "dr"
    R2 = "r2dr"
    PHI2 = "phi2dr"


@dataclass(frozen=True)
class RadialGrid:
    """Staggered uniform grid r_i = (i + 1/2) dr, i = 0..N-1, on (0, N*dr]."""

    N: int
    dr: float

    def __post_init__(self):
        if self.N < 1:
            raise DimensionMismatchError(f"RadialGrid needs N >= 1, got {self.N}")
        if not self.dr > 0:
            raise DimensionMismatchError(f"RadialGrid needs dr > 0, got {self.dr}")

    @cached_property
    def r(self) -> np.ndarray:
        nodes = (np.arange(self.N) + 0.5) * self.dr
        nodes.setflags(write=False)
        return nodes

    @property
    def r_max(self) -> float:
        return self.N * self.dr

    @property
    def tag(self) -> str:
        return f"N{self.N}-dr{self.dr!r}"

    def weights(self, measure: Measure, phi: np.ndarray | None = None) -> np.ndarray:
        """Midpoint-rule weights for the requested measure."""
        if measure == Measure.DR:
            return np.full(self.N, self.dr)
        if measure == Measure.R2:
            return self.r**2 * self.dr
        if phi is None:
            raise DimensionMismatchError("phi values are required for the phi^2 dr measure")
        return np.asarray(phi) ** 2 * self.dr

    def refined(self, factor: int = 2) -> "RadialGrid":
        """Same R_max, spacing divided by ``factor``."""
        return RadialGrid(self.N * factor, self.dr / factor)

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(func(self.r), dtype=complex)


@dataclass
class RadialSpinor:
    """Radial profiles of one block: ``plus`` on the first basis element, ``minus`` the second."""

    plus: np.ndarray
    minus: np.ndarray
    representation: Representation = Representation.W

    def __post_init__(self):
        self.plus = np.asarray(self.plus, dtype=complex)
        self.minus = np.asarray(self.minus, dtype=complex)
        if self.plus.shape != self.minus.shape or self.plus.ndim != 1:
            raise DimensionMismatchError(
                expected="two 1-d profiles of equal length",
                actual=f"{self.plus.shape} and {self.minus.shape}",
            )
        if not (np.all(np.isfinite(self.plus)) and np.all(np.isfinite(self.minus))):
            raise EvaluationError("RadialSpinor has non-finite entries")

    @property
    def size(self) -> int:
        return self.plus.shape[0]

    def stacked(self) -> np.ndarray:
        """[plus; minus] as one vector of length 2N (block ordering of the radial operators)."""
        return np.concatenate([self.plus, self.minus])

    @classmethod
    def from_stacked(
        cls, vector: np.ndarray, representation: Representation = Representation.W
    ) -> "RadialSpinor":
        vector = np.asarray(vector)
        if vector.ndim != 1 or vector.shape[0] % 2:
            raise DimensionMismatchError(expected="vector of even length", actual=vector.shape)
        half = vector.shape[0] // 2
        return cls(vector[:half].copy(), vector[half:].copy(), representation)

    @classmethod
    def zeros(cls, n: int, representation: Representation = Representation.W) -> "RadialSpinor":
        return cls(np.zeros(n, complex), np.zeros(n, complex), representation)

    def scaled(self, factor: complex) -> "RadialSpinor":
        return RadialSpinor(self.plus * factor, self.minus * factor, self.representation)

    def __add__(self, other: "RadialSpinor") -> "RadialSpinor":
        self._check_compatible(other)
        return RadialSpinor(self.plus + other.plus, self.minus + other.minus, self.representation)

    def __sub__(self, other: "RadialSpinor") -> "RadialSpinor":
        self._check_compatible(other)
        return RadialSpinor(self.plus - other.plus, self.minus - other.minus, self.representation)

    def _check_compatible(self, other: "RadialSpinor") -> None:
        if other.representation != self.representation or other.size != self.size:
            raise DimensionMismatchError(
                expected=f"{self.representation.value}[{self.size}]",
                actual=f"{other.representation.value}[{other.size}]",
            )

    def norm_squared(self, grid: RadialGrid, phi: np.ndarray | None = None) -> float:
        """Squared L^2 norm in the measure matching the representation tag."""
        if self.representation == Representation.W:
            weights = grid.weights(Measure.DR)
        elif self.representation == Representation.G_R2:
            weights = grid.weights(Measure.R2)
        else:
            weights = grid.weights(Measure.PHI2, phi)
        return float(np.sum(weights * (np.abs(self.plus) ** 2 + np.abs(self.minus) ** 2)))

    def norm(self, grid: RadialGrid, phi: np.ndarray | None = None) -> float:
        return float(np.sqrt(self.norm_squared(grid, phi)))


@dataclass
class SpinorField:
    """A finite map from partial-wave indices to radial spinors (all in one representation)."""

    modes: Dict[Hashable, RadialSpinor] = field(default_factory=dict)

    def __post_init__(self):
        reps = {spinor.representation for spinor in self.modes.values()}
        sizes = {spinor.size for spinor in self.modes.values()}
        if len(reps) > 1 or len(sizes) > 1:
            raise DimensionMismatchError(
                expected="one representation and one grid size", actual=f"{reps}, {sizes}"
            )

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __getitem__(self, index: Hashable) -> RadialSpinor:
        return self.modes[index]

    def __contains__(self, index: Hashable) -> bool:
        return index in self.modes

    def items(self):
        return self.modes.items()

    def indices(self) -> list:
        return list(self.modes)

    @property
    def representation(self) -> Representation | None:
        for spinor in self.modes.values():
            return spinor.representation
        return None

    def map(self, func: Callable[[Hashable, RadialSpinor], RadialSpinor]) -> "SpinorField":
        return SpinorField({index: func(index, spinor) for index, spinor in self.modes.items()})

    def restricted(self, keep: Iterable[Hashable]) -> "SpinorField":
        keep = set(keep)
        return SpinorField({i: s for i, s in self.modes.items() if i in keep})

    def norm_squared(self, grid: RadialGrid, phi: np.ndarray | None = None) -> float:
        return float(sum(s.norm_squared(grid, phi) for s in self.modes.values()))

    def norm(self, grid: RadialGrid, phi: np.ndarray | None = None) -> float:
        return float(np.sqrt(self.norm_squared(grid, phi)))

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        result: Dict[Hashable, RadialSpinor] = {}
        for index in [*self.modes, *(i for i in other.modes if i not in self.modes)]:
            if index in self.modes and index in other.modes:
                result[index] = self.modes[index] - other.modes[index]
            elif index in self.modes:
                result[index] = self.modes[index]
            else:
                result[index] = other.modes[index].scaled(-1.0)
        return SpinorField(result)

    @classmethod
    def from_mapping(cls, modes: Mapping[Hashable, RadialSpinor]) -> "SpinorField":
        return cls(dict(modes))


@dataclass
class Trajectory:
    """Sampled states of one evolution, with the energy at each sample when known."""

    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise DimensionMismatchError(expected=len(self.times), actual=len(self.states))
        steps = np.diff(np.asarray(self.times, dtype=float))
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DimensionMismatchError("trajectory times must be strictly monotone")

    def append(self, time: float, state, energy: float | None = None) -> None:
        if self.times and (time - self.times[-1]) * (self.times[-1] - self.times[0]) < 0:
            raise DimensionMismatchError("trajectory times must be strictly monotone")
        if self.times and time == self.times[-1]:
            raise DimensionMismatchError(f"duplicate trajectory time {time}")
        self.times.append(float(time))
        self.states.append(state)
        if energy is not None:
            self.energies.append(float(energy))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def initial(self):
        return self.states[0]

    @property
    def final(self):
        return self.states[-1]

    @property
    def horizon(self) -> float:
        return abs(self.times[-1] - self.times[0]) if self.times else 0.0
