"""Truncated conjugate gradients on a tangent space with negative-curvature detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import NumericalError
from ..manifold import inner

CURVATURE_TOL = 1e-10


@dataclass
class CGResult:
    s: np.ndarray
    d: Optional[np.ndarray]
    status: str  # "converged", "maxiter" or "negative-curvature"
    iterations: int
    residual: float


def modified_cg(grad, hess: Callable, max_iter: int, rel_tol: float = 0.1,
                project: Optional[Callable] = None, reproject_every: int = 5) -> CGResult:
    """Approximately solve ``hess(xi) = -grad`` starting from ``xi = 0``.

    Stops when ``||r|| <= ||r0|| * min(rel_tol, rel_tol * ||r0||)``, after
    ``max_iter`` iterations, or on a direction ``p`` with
    ``<p, hess p> <= 1e-10 ||p||**2``. In the last case ``d = p`` is returned
    (and ``s = -grad`` if this happens on the first iteration); otherwise
    ``d`` is ``None``. ``project`` maps back to the tangent space and is
    applied to the iterates every ``reproject_every`` steps.
    """
    s = np.zeros_like(grad)
    r = grad.copy()
    rr = inner(r, r)
    r0 = np.sqrt(rr)
    p = -r
    stop = r0 * min(rel_tol, rel_tol * r0)
    if r0 == 0.0:
        return CGResult(s, None, "converged", 0, 0.0)
    for j in range(max_iter):
        Hp = hess(p)
        pHp = inner(p, Hp)
        pp = inner(p, p)
        if not np.isfinite(pHp):
            raise NumericalError("non-finite curvature in CG")
        if pHp <= CURVATURE_TOL * pp:
            if j == 0:
                s = -grad.copy()
            return CGResult(s, p, "negative-curvature", j + 1, float(np.sqrt(rr)))
        alpha = rr / pHp
        s += alpha * p
        r += alpha * Hp
        rr_new = inner(r, r)
        if np.sqrt(rr_new) <= stop:
            return CGResult(s, None, "converged", j + 1, float(np.sqrt(rr_new)))
        p = -r + (rr_new / rr) * p
        rr = rr_new
        if project is not None and (j + 1) % reproject_every == 0:
            s, r, p = project(s), project(r), project(p)
            rr = inner(r, r)
    return CGResult(s, None, "maxiter", max_iter, float(np.sqrt(rr)))
