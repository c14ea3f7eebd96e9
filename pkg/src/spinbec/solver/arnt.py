"""Adaptive regularized Newton method on the constraint manifold."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import NumericalError, StepTooLargeError
from ..manifold import ConstrainedProblem, inner
from .cg import modified_cg
from .config import IterationRecord, PhaseResult, ProgressCallback, SolverConfig

log = logging.getLogger(__name__)

# Slack added to both actual and predicted decrease in the ratio test, relative to
# the first-order size ||D|| ||egrad|| of the step, so that steps whose effect is
# at round-off level are not rejected forever.
RATIO_SLACK = 1e2 * np.finfo(float).eps


def model_value(egrad, hess_e, sigma, D) -> float:
    """``<g, D> + <H D, D>/2 + sigma ||D||**2 / 2`` for a displacement ``D``."""
    return inner(egrad, D) + 0.5 * inner(hess_e(D), D) + 0.5 * sigma * inner(D, D)


def arnt(problem: ConstrainedProblem, X0, tol: float, max_iters: int,
         config: SolverConfig = None, retraction: str = None, level: int = 0,
         callback: ProgressCallback = None) -> PhaseResult:
    """Regularized Newton iterations from the feasible state ``X0``.

    The regularization weight is ``sigma_k = sigma_hat_k * ||grad E(X_k)||``
    and ``sigma_hat`` follows the ratio test. Accepted energies never increase
    by more than the round-off slack.
    """
    config = config or SolverConfig()
    kind = retraction or config.retraction
    space = problem.space
    sig_hat = config.sigma0

    ev = problem.evaluate(X0)
    records = []
    k = 0
    converged = ev.grad_norm <= tol

    while not converged and k < max_iters:
        X, gn = ev.X, ev.grad_norm
        sigma = sig_hat * gn
        H = problem.energy.hessian_operator(X)

        def hess_r(xi):
            return space.riemannian_hessvec(X, ev.alpha, ev.beta, H(xi), xi)

        def hess_m(xi):
            return hess_r(xi) + sigma * xi

        def project(z):
            return space.tangent_project(X, z)

        cg = modified_cg(ev.rgrad, hess_m, config.cg_cap(gn), config.cg_rel_tol,
                         project=project, reproject_every=config.cg_reproject_every)
        xi = project(cg.s)
        sigma_est = None
        if cg.d is not None:
            d = project(cg.d)
            dd = inner(d, d)
            dHd = inner(d, hess_m(d))
            if dHd < 0 and dd > 0:
                xi = xi + (inner(d, ev.rgrad) / dHd) * d
                sigma_est = abs(dHd / dd - sigma)
        slope = inner(ev.rgrad, xi)
        if not slope < 0:
            xi, slope = -ev.rgrad, -gn * gn

        t = config.alpha0
        m = None
        for _ in range(config.max_backtracks):
            try:
                Z = space.retract(X + t * xi, kind)
            except StepTooLargeError:
                t *= config.armijo_delta
                continue
            m = model_value(ev.egrad, H, sigma, Z - X)
            if not np.isfinite(m):
                raise NumericalError(f"model value is not finite at ARNT iteration {k}")
            if m <= config.armijo_rho * t * slope:
                break
            t *= config.armijo_delta
        else:
            m = None

        accepted = False
        if m is not None:
            dE = problem.energy.energy_difference(X, Z)
            slack = RATIO_SLACK * np.linalg.norm(Z - X) * np.linalg.norm(ev.egrad)
            ratio = (dE - slack) / (m - slack)
            accepted = ratio >= config.eta1 and dE <= slack
        else:
            ratio = -np.inf
        if accepted:
            ev = problem.evaluate(Z)
            if ratio >= config.eta2:
                sig_hat *= config.gamma0
            else:
                sig_hat *= config.gamma1
        else:
            sig_hat *= config.gamma2
        if sigma_est is not None and ev.grad_norm > 0:
            sig_hat = max(sig_hat, (sigma_est + config.curvature_margin) / ev.grad_norm)
        k += 1
        converged = ev.grad_norm <= tol
        rec = IterationRecord(k, level, "arnt", ev.energy, ev.grad_norm, sigma=sigma,
                              step=t, accepted=accepted, inner_iters=cg.iterations)
        records.append(rec)
        if callback is not None:
            callback(rec)
    return PhaseResult(ev.X, ev.energy, ev.grad_norm, k, converged, records,
                       "converged" if converged else "maxiter")
