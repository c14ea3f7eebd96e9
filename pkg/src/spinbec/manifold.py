"""Constraint set ``{u : <u,u> = 1, <u, Gamma u> = M}`` and its Riemannian geometry.

``Gamma`` multiplies spin block ``l`` by ``l``. All operations act block-wise
through ``w.reshape(2F+1, -1)``, so they accept either the complex state array
``X`` of shape ``(2F+1, *grid.shape)`` or its real embedding ``u`` returned by
:meth:`StateSpace.embed`. Inner products are always ``Re <a, b>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import retraction as _retr
from .energy import GPEnergy
from .errors import ConfigurationError, DimensionError, ManifoldDegeneracyError
from .spectral_grid import Grid
from .spin_model import levels

GRAM_TOL = 1e-14


def inner(a, b) -> float:
    """Real Euclidean inner product ``Re <a, b>``."""
    return float(np.vdot(a, b).real)


class StateSpace:
    """The feasible set for spin ``F`` and magnetization ``M`` on ``grid``."""

    def __init__(self, grid: Grid, F: int, M: float):
        if not abs(M) < F:
            raise ConfigurationError(f"magnetization must satisfy |M| < F, got M={M}, F={F}")
        self.grid = grid
        self.F = int(F)
        self.M = float(M)
        self.levels = levels(F)
        self.ncomp = 2 * self.F + 1
        self.shape = (self.ncomp,) + grid.shape

    # -- layout ----------------------------------------------------------

    def embed(self, X) -> np.ndarray:
        """Real vector ``u``: for each component, real parts then imaginary parts."""
        X = np.asarray(X)
        if X.shape != self.shape:
            raise DimensionError(f"state shape {X.shape} != expected {self.shape}")
        X = X.reshape(self.ncomp, -1)
        return np.stack([X.real, X.imag], axis=1).reshape(-1)

    def unembed(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(self.ncomp, 2, -1)
        return (u[:, 0] + 1j * u[:, 1]).reshape(self.shape)

    def _blocks(self, w):
        w = np.asarray(w)
        if w.size % self.ncomp:
            raise DimensionError(f"array of size {w.size} does not split into {self.ncomp} blocks")
        return w.reshape(self.ncomp, -1)

    def block_weights(self, w) -> np.ndarray:
        """Squared block norms ``||w_l||**2`` in the order ``l = F..-F``."""
        b = self._blocks(w)
        return np.sum(b.real**2 + b.imag**2, axis=1) if np.iscomplexobj(b) else np.sum(b * b, axis=1)

    def scale_blocks(self, w, fac):
        return (np.asarray(fac).reshape(-1, 1) * self._blocks(w)).reshape(np.shape(w))

    def gamma(self, w):
        return self.scale_blocks(w, self.levels)

    # -- constraints -------------------------------------------------------

    def constraint_residuals(self, w) -> tuple:
        """``(<w,w> - 1, <w, Gamma w> - M)``."""
        a = self.block_weights(w)
        return float(a.sum() - 1.0), float(np.dot(self.levels, a) - self.M)

    def is_feasible(self, w, tol=1e-10) -> bool:
        return max(abs(r) for r in self.constraint_residuals(w)) <= tol

    def _normal_coeffs(self, u, z):
        """Coefficients ``(a, b)`` of the normal part ``a u + b Gamma u`` of ``z``."""
        a = self.block_weights(u)
        lv = self.levels
        g00, g01, g11 = a.sum(), np.dot(lv, a), np.dot(lv * lv, a)
        det = g00 * g11 - g01 * g01
        if not det > GRAM_TOL * max(g00 * g11, 1e-300):
            raise ManifoldDegeneracyError(
                "constraint gradients are parallel; the state lies in a single spin component")
        gu = self.gamma(u)
        r0, r1 = inner(u, z), inner(gu, z)
        ca = (g11 * r0 - g01 * r1) / det
        cb = (g00 * r1 - g01 * r0) / det
        return ca, cb, gu

    def tangent_project(self, u, z):
        """Orthogonal projection of ``z`` onto the tangent space at ``u``."""
        ca, cb, gu = self._normal_coeffs(u, z)
        return z - ca * u - cb * gu

    def riemannian_gradient(self, u, g):
        """Return ``(P_u g, alpha, beta)`` with ``g = P_u g + alpha u + beta Gamma u``."""
        ca, cb, gu = self._normal_coeffs(u, g)
        return g - ca * u - cb * gu, ca, cb

    def riemannian_hessvec(self, u, alpha, beta, hxi, xi):
        """Riemannian Hessian on a tangent ``xi`` given ``hxi`` = Euclidean Hessian times ``xi``."""
        return self.tangent_project(u, hxi - alpha * xi - beta * self.gamma(xi))

    # -- retractions -------------------------------------------------------

    def retract(self, w, kind: str = "projective"):
        """Map a point of the open set ``Omega`` onto the constraint set."""
        if kind == "projective-spin1" and self.F != 1:
            raise ConfigurationError("the spin-1 projective retraction needs F=1")
        fac = _retr.factors(self.block_weights(w), self.levels, self.M, kind)
        return self.scale_blocks(w, fac)

    def retract_step(self, u, xi, t=1.0, kind: str = "projective"):
        return self.retract(u + t * xi, kind)

    def retract_projective(self, w):
        return self.retract(w, "projective")

    def retract_projective_spin1(self, w):
        return self.retract(w, "projective-spin1")

    def retract_orthogonal(self, w):
        return self.retract(w, "orthogonal")

    def retract_closedform(self, w):
        return self.retract(w, "closedform")

    # -- sampling (for tests and diagnostics) --------------------------------

    def random_point(self, rng: Optional[np.random.Generator] = None, complex_state=True):
        rng = np.random.default_rng(rng)
        X = rng.standard_normal(self.shape)
        if complex_state:
            X = X + 1j * rng.standard_normal(self.shape)
        return self.retract(X, "projective")

    def random_tangent(self, u, rng: Optional[np.random.Generator] = None):
        rng = np.random.default_rng(rng)
        z = rng.standard_normal(np.shape(u))
        if np.iscomplexobj(u):
            z = z + 1j * rng.standard_normal(np.shape(u))
        return self.tangent_project(u, z)


@dataclass
class Evaluation:
    """Energy and first-order data at a feasible state."""

    X: np.ndarray
    energy: float
    egrad: np.ndarray
    rgrad: np.ndarray
    alpha: float
    beta: float

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.rgrad))


class ConstrainedProblem:
    """Energy restricted to a :class:`StateSpace`, evaluated on complex states."""

    def __init__(self, energy: GPEnergy, M: float):
        self.energy = energy
        self.space = StateSpace(energy.grid, energy.F, M)

    @property
    def grid(self):
        return self.energy.grid

    def value(self, X) -> float:
        return self.energy.energy(X)

    def value_and_gradient(self, X):
        """``(E, riemannian gradient, alpha, beta)`` at a feasible ``X``."""
        e, g = self.energy.energy_and_gradient(X)
        rg, alpha, beta = self.space.riemannian_gradient(X, g)
        return e, rg, alpha, beta

    def evaluate(self, X) -> Evaluation:
        e, g = self.energy.energy_and_gradient(X)
        rg, alpha, beta = self.space.riemannian_gradient(X, g)
        return Evaluation(X, e, g, rg, alpha, beta)

    def hessian(self, X, alpha, beta):
        """Riemannian Hessian at ``X`` as a callable on tangent vectors."""
        H = self.energy.hessian_operator(X)
        space = self.space

        def apply(xi):
            return space.riemannian_hessvec(X, alpha, beta, H(xi), xi)

        return apply
