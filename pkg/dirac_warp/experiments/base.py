"""Shared plumbing for the experiment runners."""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..angular import PartialWaveIndex
from ..fields import RadialGrid, RadialSpinor, Representation, SpinorField
from ..manifold import WarpFunction
from ..models.config import EvolutionConfig, ExperimentKind, ExperimentSpec, RunConfig
from ..models.records import ExperimentResult
from ..utils import gaussian_bump

# primary tolerance per experiment kind, overridden by ``ExperimentSpec.tolerance``
DEFAULT_TOLERANCES: Dict[ExperimentKind, float] = {
    ExperimentKind.ALGEBRA: 1e-12,
    ExperimentKind.STRICHARTZ: 0.1,
    ExperimentKind.POTENTIAL_BOUND: 1e-12,
    ExperimentKind.SIGMA_CONTINUITY: 1e-10,
    ExperimentKind.ISOMETRY: 1e-8,
    ExperimentKind.CONJUGATION: 1.8,
    ExperimentKind.SPECTRAL: 1e-6,
    ExperimentKind.UNITARITY: 1e-10,
    ExperimentKind.DUHAMEL: 5e-6,
    ExperimentKind.INVARIANCE: 1e-8,
    ExperimentKind.CONTRACTION: 0.5,
}


@dataclass(frozen=True)
class ExperimentContext:
    """An experiment spec with every run-level default resolved."""

    spec: ExperimentSpec
    warp: WarpFunction
    grid: RadialGrid
    evolution: EvolutionConfig
    seed: int
    issued: List[ExperimentResult] = field(default_factory=list, compare=False, repr=False)

    @classmethod
    def resolve(cls, spec: ExperimentSpec, run: RunConfig) -> "ExperimentContext":
        return cls(
            spec=spec,
            warp=run.warp_for(spec).to_warp(),
            grid=run.grid_for(spec).to_grid(),
            evolution=run.evolution_for(spec),
            seed=run.seed_for(spec),
        )

    @property
    def tolerance(self) -> float:
        if self.spec.tolerance is not None:
            return self.spec.tolerance
        return DEFAULT_TOLERANCES[self.spec.kind]

    def result(self, columns: List[str]) -> ExperimentResult:
        """A fresh result; the first one issued is what a failed run reports."""
        result = ExperimentResult(
            name=self.spec.label,
            kind=self.spec.kind.value,
            columns=columns,
            tolerances={"primary": self.tolerance},
        )
        self.issued.append(result)
        return result

    def refined(self) -> "ExperimentContext":
        """Same domain with dr and dt halved (stride doubled so sample times are unchanged)."""
        evolution = self.evolution.model_copy(
            update={"dt": self.evolution.dt / 2, "sample_stride": self.evolution.sample_stride * 2}
        )
        return ExperimentContext(self.spec, self.warp, self.grid.refined(2), evolution, self.seed)


def bump_spinor(
    grid: RadialGrid,
    r0: float,
    width: float,
    phases=(0.0, 0.0),
    amplitudes=(1.0, 1.0),
) -> RadialSpinor:
    """w-representation spinor with Gaussian-bump profiles on both components."""
    return RadialSpinor(
        gaussian_bump(grid.r, r0, width, phases[0], amplitudes[0]),
        gaussian_bump(grid.r, r0, width, phases[1], amplitudes[1]),
        Representation.W,
    )


def random_bump_field(
    rng: np.random.Generator,
    grid: RadialGrid,
    indices: List[PartialWaveIndex],
    count: int | None = None,
    representation: Representation = Representation.W,
) -> SpinorField:
    """
    Gaussian bumps with r0 in [1, 3], width in [0.3, 0.8] and random phases on
    ``count`` distinct modes drawn from ``indices`` (one or two when unset).
    """
    if count is None:
        count = int(rng.integers(1, 3))
    count = min(count, len(indices))
    chosen = rng.choice(len(indices), size=count, replace=False)
    modes = {}
    for position in sorted(int(i) for i in chosen):
        r0 = float(rng.uniform(1.0, 3.0))
        width = float(rng.uniform(0.3, 0.8))
        phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
        weights = rng.uniform(0.2, 1.0, size=2)
        spinor = bump_spinor(grid, r0, width, tuple(phases), tuple(weights))
        if representation != Representation.W:
            spinor = RadialSpinor(spinor.plus / grid.r, spinor.minus / grid.r, representation)
        modes[indices[position]] = spinor
    return SpinorField(modes)

