"""Riemannian gradient descent with Barzilai-Borwein steps and nonmonotone Armijo search."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import StagnationError, StepTooLargeError
from ..manifold import ConstrainedProblem, inner
from .config import IterationRecord, PhaseResult, ProgressCallback, SolverConfig

log = logging.getLogger(__name__)

FIRST_STEP = 1e-2
STEP_BOUNDS = (1e-20, 1e20)


def rgbb(problem: ConstrainedProblem, X0, tol: float, max_iters: int,
         config: SolverConfig = None, retraction: str = None, level: int = 0,
         callback: ProgressCallback = None) -> PhaseResult:
    """Minimize ``problem`` from the feasible state ``X0`` until ``||grad|| <= tol``.

    Raises
    ------
    StagnationError
        When no step passes the nonmonotone test within ``config.max_backtracks``
        halvings; ``err.best`` holds the last accepted :class:`PhaseResult`.
    """
    config = config or SolverConfig()
    kind = retraction or config.retraction
    space = problem.space
    rho, delta, varrho = config.armijo_rho, config.armijo_delta, config.nonmonotone

    ev = problem.evaluate(X0)
    C, Q = ev.energy, 1.0
    records = []
    prev = None
    k = 0
    converged = ev.grad_norm <= tol

    def result(status):
        return PhaseResult(ev.X, ev.energy, ev.grad_norm, k, converged, records, status)

    while not converged and k < max_iters:
        gn = ev.grad_norm
        if prev is None:
            step = FIRST_STEP / max(1.0, gn)
        else:
            sX, sG = ev.X - prev.X, ev.rgrad - prev.rgrad
            vv = inner(sG, sG)
            step = abs(inner(sX, sG)) / vv if vv > 0 else FIRST_STEP / max(1.0, gn)
            step = float(np.clip(step, *STEP_BOUNDS))
        slope = -gn * gn
        t = step
        for _ in range(config.max_backtracks):
            try:
                Z = space.retract(ev.X - t * ev.rgrad, kind)
            except StepTooLargeError:
                t *= delta
                continue
            eZ = problem.value(Z)
            if eZ <= C + rho * t * slope:
                break
            t *= delta
        else:
            raise StagnationError(
                f"RGBB line search failed after {config.max_backtracks} reductions "
                f"at iteration {k} (gradient norm {gn:.3e})", best=result("stagnated"))
        prev = ev
        ev = problem.evaluate(Z)
        Qn = varrho * Q + 1.0
        C = (varrho * Q * C + ev.energy) / Qn
        Q = Qn
        k += 1
        converged = ev.grad_norm <= tol
        rec = IterationRecord(k, level, "rgbb", ev.energy, ev.grad_norm, step=t)
        records.append(rec)
        if callback is not None:
            callback(rec)
    return result("converged" if converged else "maxiter")
