"""Cascadic multigrid: solve coarse, interpolate, re-solve on the next finer grid."""

from __future__ import annotations

import logging
import time

import numpy as np

from ..errors import ConfigurationError, SpinBECError, StagnationError
from ..manifold import StateSpace
from ..spectral_grid import Grid, prolongate
from .arnt import arnt
from .config import LevelSummary, ProgressCallback, RunReport, SolverConfig
from .problem import GroundStateProblem
from .rgbb import rgbb

log = logging.getLogger(__name__)


def level_grids(fine: Grid, levels: int, coarsest_n: int = 16) -> list:
    """Nested grids ending at ``fine``, coarse first; fewer if ``coarsest_n`` would be violated."""
    grids = [fine]
    while len(grids) < levels:
        g = grids[0]
        if any(k % 4 or k // 2 < coarsest_n for k in g.n):
            break
        grids.insert(0, g.coarsen())
    if any(k < coarsest_n for k in grids[0].n):
        raise ConfigurationError(f"grid {fine.n} is coarser than the minimum n={coarsest_n}")
    return grids


def transfer(coarse: Grid, fine: Grid, X: np.ndarray, space: StateSpace) -> np.ndarray:
    """Interpolate a quadrature-scaled state to ``fine`` and retract it onto the constraints."""
    phi = X / np.sqrt(coarse.cell_volume)
    Xf = prolongate(coarse, fine, phi) * np.sqrt(fine.cell_volume)
    return space.retract(Xf, "projective")


def cascadic_solve(problem: GroundStateProblem, config: SolverConfig = None,
                   callback: ProgressCallback = None, X0=None) -> RunReport:
    """Run RGBB then ARNT on each level, from the coarsest to ``problem.grid``.

    ``X0`` (optional) is an initial state on the coarsest grid; by default the
    regime-dependent Gaussian initial state is used.
    """
    config = (config or SolverConfig()).validate()
    start = time.perf_counter()
    grids = level_grids(problem.grid, config.levels, config.coarsest_n)
    records, summaries = [], []
    X = problem.initial_state(grids[0]) if X0 is None else X0
    result = None
    for j, grid in enumerate(grids):
        cp = problem.on_grid(grid)
        if j > 0:
            X = transfer(grids[j - 1], grid, X, cp.space)
        finest = j == len(grids) - 1
        try:
            warm = rgbb(cp, X, config.rgbb_tol, config.rgbb_max_iters, config,
                        level=j, callback=callback)
        except StagnationError as err:
            log.warning("level %d: %s; continuing from the best iterate", j, err)
            warm = err.best
        records.extend(warm.records)
        tol = config.grad_tol if finest else config.grad_tol_coarse
        try:
            result = arnt(cp, warm.X, tol, config.max_outer_iters, config,
                          level=j, callback=callback)
        except SpinBECError as err:
            err.args = (f"level {j} (n={grid.n}): {err}",) + err.args[1:]
            raise
        records.extend(result.records)
        summaries.append(LevelSummary(j, grid.n, warm.iterations, result.iterations,
                                      result.mean_inner, result.energy, result.grad_norm,
                                      result.converged))
        log.info("level %d n=%s: E=%.10f |grad|=%.2e (rgbb %d, arnt %d)", j, grid.n,
                 result.energy, result.grad_norm, warm.iterations, result.iterations)
        X = result.X
    return RunReport(records, summaries, result.X, grids[-1], result.energy, result.grad_norm,
                     result.converged, config.retraction, time.perf_counter() - start,
                     result.status)
