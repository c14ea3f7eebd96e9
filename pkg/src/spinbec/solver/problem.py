"""Grid-independent description of a ground-state problem."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..energy import GPEnergy, PotentialSpec, build_initial, build_potential
from ..manifold import ConstrainedProblem
from ..spectral_grid import Grid
from ..spin_model import InteractionParams, spin_algebra


@dataclass(frozen=True)
class GroundStateProblem:
    """Spin, interactions, potential and finest grid; discretized per level on demand."""

    F: int
    grid: Grid
    params: InteractionParams
    potential: PotentialSpec
    regime: str = "auto"
    seed: int = 42

    def __post_init__(self):
        self.params.validate(self.F)

    @property
    def M(self) -> float:
        return self.params.M

    def on_grid(self, grid: Grid) -> ConstrainedProblem:
        V = build_potential(grid, self.potential)
        return ConstrainedProblem(GPEnergy(grid, V, self.params, spin_algebra(self.F)), self.M)

    def initial_state(self, grid: Grid) -> np.ndarray:
        return build_initial(self.F, self.M, self.regime, grid, self.seed, self.params)

    def with_magnetization(self, M: float) -> "GroundStateProblem":
        return replace(self, params=replace(self.params, M=M))

    def with_grid(self, grid: Grid) -> "GroundStateProblem":
        return replace(self, grid=grid)
