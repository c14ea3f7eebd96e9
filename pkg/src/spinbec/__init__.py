"""Ground states of spin-F Bose-Einstein condensates (F = 1, 2, 3) by Riemannian optimization.

The discrete Gross-Pitaevskii energy on a periodic Fourier grid is minimized over
the set of states with unit mass and prescribed magnetization, using a
Barzilai-Borwein gradient warm start, an adaptive regularized Newton method and
cascadic mesh refinement.
"""

from .energy import GPEnergy, PotentialSpec, build_initial, build_potential
from .errors import (ConfigurationError, DimensionError, ManifoldDegeneracyError,
                     NumericalError, RetractionDomainError, RootFindingError, SpinBECError,
                     StagnationError, StepTooLargeError)
from .manifold import ConstrainedProblem, StateSpace
from .spectral_grid import Grid, laplacian_apply, prolongate
from .spin_model import InteractionParams, SpinAlgebra, spin_algebra
from .solver import GroundStateProblem, SolverConfig, cascadic_solve

__version__ = "0.1.0"

__all__ = [
    "cascadic_solve", "ConfigurationError", "ConstrainedProblem", "DimensionError", "GPEnergy",
    "Grid", "GroundStateProblem", "InteractionParams", "laplacian_apply", "ManifoldDegeneracyError",
    "NumericalError", "PotentialSpec", "prolongate", "RetractionDomainError", "RootFindingError",
    "SolverConfig", "SpinAlgebra", "spin_algebra", "SpinBECError", "StagnationError", "StateSpace",
    "StepTooLargeError", "build_initial", "build_potential",
]
