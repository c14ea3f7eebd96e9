"""Optimization engines: RGBB warm start, truncated CG, ARNT and the cascadic driver."""

from .arnt import arnt
from .cg import CGResult, modified_cg
from .config import IterationRecord, LevelSummary, PhaseResult, RunReport, SolverConfig
from .multigrid import cascadic_solve, level_grids, transfer
from .problem import GroundStateProblem
from .rgbb import rgbb

__all__ = [
    "arnt", "cascadic_solve", "CGResult", "GroundStateProblem", "IterationRecord",
    "LevelSummary", "level_grids", "modified_cg", "PhaseResult", "rgbb", "RunReport",
    "SolverConfig", "transfer",
]
