"""Solver parameters and run bookkeeping."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError
from ..retraction import RETRACTIONS


@dataclass
class SolverConfig:
    """Tolerances, line-search and regularization parameters, and the multigrid schedule."""

    grad_tol: float = 1e-6
    grad_tol_coarse: float = 1e-5
    max_outer_iters: int = 10000
    rgbb_tol: float = 1e-2
    rgbb_max_iters: int = 2000
    # trust-region style update of the regularization weight
    eta1: float = 0.01
    eta2: float = 0.9
    gamma0: float = 0.2
    gamma1: float = 1.0
    gamma2: float = 10.0
    sigma0: float = 1.0
    curvature_margin: float = 1e-4
    # Armijo searches
    armijo_rho: float = 1e-4
    armijo_delta: float = 0.5
    alpha0: float = 1.0
    nonmonotone: float = 0.85
    max_backtracks: int = 40
    # inner CG
    cg_min_iters: int = 20
    cg_max_iters: int = 200
    cg_rel_tol: float = 0.1
    cg_reproject_every: int = 5
    retraction: str = "projective"
    levels: int = 3
    coarsest_n: int = 16

    def validate(self) -> "SolverConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigurationError(msg)

        need(self.grad_tol > 0 and self.grad_tol_coarse > 0 and self.rgbb_tol > 0,
             "gradient tolerances must be positive")
        need(0 < self.eta1 <= self.eta2 < 1, "need 0 < eta1 <= eta2 < 1")
        need(0 < self.gamma0 < 1 <= self.gamma1 <= self.gamma2,
             "need 0 < gamma0 < 1 <= gamma1 <= gamma2")
        need(self.sigma0 > 0 and self.curvature_margin >= 0, "sigma0 must be positive")
        for name in ("armijo_rho", "armijo_delta", "nonmonotone"):
            need(0 < getattr(self, name) < 1, f"{name} must lie in (0, 1)")
        need(0 < self.alpha0 <= 1, "alpha0 must lie in (0, 1]")
        need(self.max_backtracks >= 1, "max_backtracks must be >= 1")
        need(1 <= self.cg_min_iters <= self.cg_max_iters, "need 1 <= cg_min_iters <= cg_max_iters")
        need(self.cg_rel_tol > 0 and self.cg_reproject_every >= 1, "invalid CG settings")
        need(self.max_outer_iters >= 0 and self.rgbb_max_iters >= 0, "iteration caps must be >= 0")
        need(self.retraction in RETRACTIONS + ("projective-spin1",),
             f"unknown retraction {self.retraction!r}; expected one of {RETRACTIONS}")
        need(self.levels >= 1, "levels must be >= 1")
        need(self.coarsest_n >= 16 and self.coarsest_n % 2 == 0, "coarsest_n must be even and >= 16")
        return self

    def replace(self, **changes) -> "SolverConfig":
        known = {f.name for f in fields(self)}
        bad = set(changes) - known
        if bad:
            raise ConfigurationError(f"unknown solver option(s): {', '.join(sorted(bad))}")
        return SolverConfig(**{**asdict(self), **changes}).validate()

    def cg_cap(self, grad_norm: float) -> int:
        """Inner CG cap: 20 for ``||grad|| >= 1e-1`` rising log-linearly to 200 at ``1e-6``."""
        lo, hi = self.cg_min_iters, self.cg_max_iters
        decades = np.log10(1.0 / max(grad_norm, 1e-300)) - 1.0
        return int(np.clip(np.ceil(lo + (hi - lo) / 5.0 * decades), lo, hi))


@dataclass
class IterationRecord:
    iter: int
    level: int
    phase: str
    energy: float
    grad_norm: float
    sigma: float = float("nan")
    step: float = float("nan")
    accepted: bool = True
    inner_iters: int = 0


@dataclass
class PhaseResult:
    """Outcome of one RGBB or ARNT run on one grid."""

    X: np.ndarray
    energy: float
    grad_norm: float
    iterations: int
    converged: bool
    records: list = field(default_factory=list)
    status: str = ""

    @property
    def mean_inner(self) -> float:
        inner = [r.inner_iters for r in self.records if r.phase == "arnt"]
        return float(np.mean(inner)) if inner else 0.0


@dataclass
class LevelSummary:
    level: int
    n: tuple
    rgbb_iters: int
    arnt_iters: int
    mean_inner: float
    energy: float
    grad_norm: float
    converged: bool


@dataclass
class RunReport:
    records: list
    levels: list
    X: np.ndarray
    grid: object
    energy: float
    grad_norm: float
    converged: bool
    retraction: str
    wall_time: float = 0.0
    status: str = ""

    @property
    def iterations(self) -> int:
        return sum(l.rgbb_iters + l.arnt_iters for l in self.levels)


ProgressCallback = Optional[Callable[[IterationRecord], None]]
