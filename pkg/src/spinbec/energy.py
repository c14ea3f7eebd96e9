"""Discrete Gross-Pitaevskii energy, gradient and Hessian-vector product.

A state ``X`` is a complex array of shape ``(2F+1, *grid.shape)`` holding
``sqrt(cellVolume) * phi_l(x_j)``, component ``l = F`` first. With this scaling
``sum |X|**2`` is the discrete mass and the real inner product
``Re <X, Y> = sum Re(X * conj(Y))`` is the Euclidean one used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DimensionError, NumericalError
from .spectral_grid import Grid
from .spin_model import InteractionParams, SpinAlgebra, spin_algebra


def _apply(mat, X):
    """Apply a (2F+1)x(2F+1) matrix across the component axis of ``X``."""
    return np.tensordot(mat, X, axes=(1, 0))


def _rdot(X, Y):
    return float(np.vdot(Y, X).real)


@dataclass
class Densities:
    """Pointwise quadratic quantities of a state (all carry one factor of cellVolume)."""

    rho: np.ndarray
    Fx: np.ndarray
    Fy: np.ndarray
    Fz: np.ndarray
    A00: Optional[np.ndarray] = None
    A2: Optional[tuple] = None

    @property
    def F(self):
        return (self.Fx, self.Fy, self.Fz)


def compute_densities(X: np.ndarray, algebra: SpinAlgebra) -> Densities:
    if X.shape[0] != algebra.ncomp:
        raise DimensionError(f"state has {X.shape[0]} components, expected {algebra.ncomp}")
    Xc = X.conj()
    rho = np.einsum("a...,a...->...", Xc, X).real
    Fs = [np.einsum("a...,a...->...", Xc, _apply(f, X)).real for f in algebra.spin_matrices]
    A00 = A2 = None
    if algebra.pairA is not None:
        A00 = np.einsum("a...,a...->...", X, _apply(algebra.pairA, X))
    if algebra.pairA2 is not None:
        A2 = tuple(np.einsum("a...,a...->...", X, _apply(Al, X)) for Al in algebra.pairA2)
    return Densities(rho, *Fs, A00=A00, A2=A2)


@dataclass(frozen=True)
class PotentialSpec:
    """``V(x) = sum_a [ harmonic_a * x_a**2 / 2 + amplitude_a * sin(pi x_a / period_a)**2 ]``.

    A period of 0 (or amplitude 0) disables the lattice term on that axis.
    """

    harmonic: tuple = ()
    amplitude: tuple = ()
    period: tuple = ()

    @classmethod
    def lattice(cls, d, harmonic=1.0, amplitude=0.0, period=0.0):
        return cls((harmonic,) * d, (amplitude,) * d, (period,) * d)

    @classmethod
    def zero(cls, d):
        return cls((0.0,) * d, (0.0,) * d, (0.0,) * d)


def build_potential(grid: Grid, spec: PotentialSpec) -> np.ndarray:
    d = grid.d
    if not (len(spec.harmonic) == len(spec.amplitude) == len(spec.period) == d):
        raise ConfigurationError(f"potential spec must give {d} entries per term")
    V = np.zeros(grid.shape)
    for ax, x in enumerate(grid.mesh()):
        w, kappa, s = spec.harmonic[ax], spec.amplitude[ax], spec.period[ax]
        if w:
            V += 0.5 * w * x**2
        if kappa and s:
            V += kappa * np.sin(np.pi * x / s) ** 2
    return V


class GPEnergy:
    """Discrete energy ``E_h`` for one grid, potential and parameter set."""

    def __init__(self, grid: Grid, V: np.ndarray, params: InteractionParams,
                 algebra: Optional[SpinAlgebra] = None, F: Optional[int] = None):
        if algebra is None:
            if F is None:
                raise ConfigurationError("need either a SpinAlgebra or F")
            algebra = spin_algebra(F)
        self.grid = grid
        self.algebra = algebra
        self.params = params.validate(algebra.F)
        self.V = np.asarray(V, dtype=float)
        if self.V.shape != grid.shape:
            raise DimensionError(f"potential shape {self.V.shape} != grid shape {grid.shape}")
        self.shape = (algebra.ncomp,) + grid.shape
        self.cell = grid.cell_volume
        self.b = algebra.zeeman(params.p, params.q).reshape((-1,) + (1,) * grid.d)
        F = algebra.F
        self.beta0 = params.beta0
        self.beta1 = params.beta1
        self.beta2 = params.beta2 if F >= 2 else 0.0
        self.beta3 = params.beta3 if F >= 3 else 0.0

    @property
    def F(self):
        return self.algebra.F

    def check(self, X):
        if X.shape != self.shape:
            raise DimensionError(f"state shape {X.shape} != expected {self.shape}")

    def kinetic_operator(self, X):
        """``L X`` (the discrete negative Laplacian)."""
        axes = tuple(range(1, X.ndim))
        coef = sfft.fftn(X, axes=axes)
        coef *= self.grid.ksq
        return sfft.ifftn(coef, axes=axes, overwrite_x=True)

    def linear_part(self, Z):
        """``L Z + 2 V Z + 2 Z B``."""
        return self.kinetic_operator(Z) + 2.0 * (self.V + self.b) * Z

    def _interaction_energy(self, dens):
        c = self.cell
        e = 0.5 * self.beta0 / c * float(np.sum(dens.rho**2))
        e += 0.5 * self.beta1 / c * float(sum(np.sum(Fa**2) for Fa in dens.F))
        if self.beta2 and dens.A00 is not None:
            e += 0.5 * self.beta2 / c * float(np.sum(np.abs(dens.A00) ** 2))
        if self.beta3 and dens.A2 is not None:
            e += 0.5 * self.beta3 / c * float(sum(np.sum(np.abs(a) ** 2) for a in dens.A2))
        return e

    def energy(self, X) -> float:
        self.check(X)
        axes = tuple(range(1, X.ndim))
        coef = sfft.fftn(X, axes=axes)
        kin = 0.5 * float(np.sum(self.grid.ksq * (coef.real**2 + coef.imag**2))) / self.grid.npoints
        absX2 = X.real**2 + X.imag**2
        pot = float(np.sum((self.V + self.b) * absX2))
        dens = compute_densities(X, self.algebra)
        e = kin + pot + self._interaction_energy(dens)
        if not np.isfinite(e):
            raise NumericalError("energy evaluated to a non-finite value")
        return e

    def energy_difference(self, X, Z) -> float:
        """``E_h(Z) - E_h(X)`` evaluated from ``D = Z - X`` without cancellation.

        Each quadratic density is differenced as ``q(Z) - q(X) = 2 Re q(X, D) + q(D)``,
        so the round-off error scales with ``||D||`` rather than with ``E_h``.
        """
        self.check(X)
        self.check(Z)
        alg = self.algebra
        c = self.cell
        D = Z - X
        S = X + Z
        axes = tuple(range(1, X.ndim))
        cD = sfft.fftn(D, axes=axes)
        cS = sfft.fftn(S, axes=axes)
        # 0.5 (<Z,LZ> - <X,LX>) = 0.5 Re <D, L S>
        de = 0.5 * float(np.sum(self.grid.ksq * (np.conj(cD) * cS).real)) / self.grid.npoints
        de += float(np.sum((self.V + self.b) * (np.conj(D) * S).real))

        def dens_pair(mat):
            MD = D if mat is None else _apply(mat, D)
            MS = S if mat is None else _apply(mat, S)
            diff = 0.5 * np.einsum("a...,a...->...", S.conj(), MD).real \
                + 0.5 * np.einsum("a...,a...->...", D.conj(), MS).real
            summ = np.einsum("a...,a...->...", X.conj(), X if mat is None else _apply(mat, X)).real \
                + np.einsum("a...,a...->...", Z.conj(), Z if mat is None else _apply(mat, Z)).real
            return diff, summ

        if self.beta0:
            dq, sq = dens_pair(None)
            de += 0.5 * self.beta0 / c * float(np.sum(dq * sq))
        if self.beta1:
            for f in alg.spin_matrices:
                dq, sq = dens_pair(f)
                de += 0.5 * self.beta1 / c * float(np.sum(dq * sq))

        def pair_term(A):
            # Z^T A Z - X^T A X = D^T A S (A symmetric)
            dq = np.einsum("a...,a...->...", D, _apply(A, S))
            sq = np.einsum("a...,a...->...", X, _apply(A, X)) + np.einsum("a...,a...->...", Z, _apply(A, Z))
            return float(np.sum((dq * np.conj(sq)).real))

        if self.beta2:
            de += 0.5 * self.beta2 / c * pair_term(alg.pairA)
        if self.beta3:
            de += 0.5 * self.beta3 / c * sum(pair_term(A) for A in alg.pairA2)
        if not np.isfinite(de):
            raise NumericalError("energy difference evaluated to a non-finite value")
        return de

    def energy_and_gradient(self, X):
        """Return ``(E_h(X), grad E_h(X))`` sharing intermediate work."""
        self.check(X)
        alg = self.algebra
        c = self.cell
        LX = self.kinetic_operator(X)
        VX = (self.V + self.b) * X
        dens = compute_densities(X, alg)
        e = 0.5 * _rdot(LX, X) + _rdot(VX, X) + self._interaction_energy(dens)
        if not np.isfinite(e):
            raise NumericalError("energy evaluated to a non-finite value")
        G = LX
        G += 2.0 * VX
        if self.beta0:
            G += (2.0 * self.beta0 / c) * dens.rho * X
        if self.beta1:
            for f, Fa in zip(alg.spin_matrices, dens.F):
                G += (2.0 * self.beta1 / c) * Fa * _apply(f, X)
        if self.beta2:
            G += (2.0 * self.beta2 / c) * dens.A00 * _apply(alg.pairA, X.conj())
        if self.beta3:
            Xc = X.conj()
            for Al, a in zip(alg.pairA2, dens.A2):
                G += (2.0 * self.beta3 / c) * a * _apply(Al, Xc)
        return e, G

    def gradient(self, X):
        return self.energy_and_gradient(X)[1]

    def hessian_operator(self, X) -> "HessianOperator":
        self.check(X)
        return HessianOperator(self, X)

    def hessian_vector(self, X, Z):
        return self.hessian_operator(X)(Z)

    def densities(self, X) -> Densities:
        return compute_densities(X, self.algebra)


class HessianOperator:
    """``Z -> grad^2 E_h(X)[Z]`` with the X-dependent pieces computed once.

    The map is real-linear (not complex-linear) in ``Z``.
    """

    def __init__(self, energy: GPEnergy, X):
        self.energy = energy
        self.X = X
        alg = energy.algebra
        self.dens = compute_densities(X, alg)
        self.fX = [_apply(f, X) for f in alg.spin_matrices] if energy.beta1 else []
        Xc = X.conj()
        self.AX = _apply(alg.pairA, X) if energy.beta2 else None
        self.AXc = _apply(alg.pairA, Xc) if energy.beta2 else None
        if energy.beta3:
            self.A2X = [_apply(Al, X) for Al in alg.pairA2]
            self.A2Xc = [_apply(Al, Xc) for Al in alg.pairA2]
        self.Xc = Xc

    def __call__(self, Z):
        en = self.energy
        en.check(Z)
        alg = en.algebra
        c = en.cell
        X, Xc, dens = self.X, self.Xc, self.dens
        H = en.linear_part(Z)
        if en.beta0:
            s = 2.0 * en.beta0 / c
            cross = np.einsum("a...,a...->...", Z, Xc).real
            H += s * (dens.rho * Z + 2.0 * cross * X)
        if en.beta1:
            s = 2.0 * en.beta1 / c
            for f, Fa, fX in zip(alg.spin_matrices, dens.F, self.fX):
                fZ = _apply(f, Z)
                cross = np.einsum("a...,a...->...", Xc, fZ).real
                H += s * (Fa * fZ + 2.0 * cross * fX)
        if en.beta2:
            s = 2.0 * en.beta2 / c
            cross = np.einsum("a...,a...->...", Z, self.AX)
            H += s * (dens.A00 * _apply(alg.pairA, Z.conj()) + 2.0 * cross * self.AXc)
        if en.beta3:
            s = 2.0 * en.beta3 / c
            Zc = Z.conj()
            for Al, a, AlX, AlXc in zip(alg.pairA2, dens.A2, self.A2X, self.A2Xc):
                cross = np.einsum("a...,a...->...", Z, AlX)
                H += s * (a * _apply(Al, Zc) + 2.0 * cross * AlXc)
        return H


def energy(grid, X, V, params, algebra=None) -> float:
    return GPEnergy(grid, V, params, algebra, F=(X.shape[0] - 1) // 2).energy(X)


def euclidean_gradient(grid, X, V, params, algebra=None):
    return GPEnergy(grid, V, params, algebra, F=(X.shape[0] - 1) // 2).gradient(X)


def hessian_vector(grid, X, Z, V, params, algebra=None):
    return GPEnergy(grid, V, params, algebra, F=(X.shape[0] - 1) // 2).hessian_vector(X, Z)


# ----------------------------------------------------------------------------
# initial data

REGIMES = ("auto", "ferromagnetic", "antiferromagnetic", "nematic", "cyclic", "random")


def infer_regime(F: int, params: InteractionParams) -> str:
    """Interaction regime that selects the initial spinor."""
    if F == 1:
        return "ferromagnetic" if params.beta1 <= 0 else "antiferromagnetic"
    if F == 2:
        b1, b2 = params.beta1, params.beta2
        if b1 < 0 and b2 > 20 * b1:
            return "ferromagnetic"
        if b2 < 0 and b2 < 20 * b1:
            return "nematic"
        if b1 > 0 and b2 > 0:
            return "cyclic"
        return "ferromagnetic"
    return "random"


def initial_spinor(F: int, M: float, regime: str, seed: int = 42) -> np.ndarray:
    """Spinor ``U`` multiplying the Gaussian profile, ordered ``l = F..-F``.

    For ``M < 0`` the vector for ``|M|`` is reversed.
    """
    if not abs(M) < F:
        raise ConfigurationError(f"magnetization must satisfy |M| < F, got M={M}, F={F}")
    if M < 0 and regime != "random":
        return initial_spinor(F, -M, regime, seed)[::-1].copy()
    sq = np.sqrt
    if F == 1:
        if regime == "ferromagnetic":
            return np.array([sq(1 + 3 * M) / 2, sq((1 - M) / 2), sq(1 - M) / 2])
        if regime in ("antiferromagnetic", "nematic", "polar"):
            return np.array([sq((1 + M) / 2), 0.0, sq((1 - M) / 2)])
    elif F == 2:
        if regime == "ferromagnetic":
            m1, m2 = sq(2 + M), sq(2 - M)
            return np.array([m1**4 / 16, m1**3 * m2 / 8, sq(6) * m1**2 * m2**2 / 16,
                             m1 * m2**3 / 8, m2**4 / 16])
        if regime in ("nematic", "antiferromagnetic"):
            return np.array([sq(2 + M) / 2, 0.0, 0.0, 0.0, sq(2 - M) / 2])
        if regime == "cyclic":
            return np.array([sq((M + 1) / 3), 0.0, 0.0, sq((2 - M) / 3), 0.0])
    if regime == "random":
        return np.random.default_rng(seed).uniform(0.0, 1.0, 2 * F + 1)
    raise ConfigurationError(f"regime {regime!r} not defined for F={F}")


def gaussian_profile(grid: Grid) -> np.ndarray:
    r2 = sum(x**2 for x in grid.mesh())
    return np.pi ** (-grid.d / 4) * np.exp(-r2 / 2)


def build_initial(F: int, M: float, regime: str, grid: Grid, seed: int = 42,
                  params: Optional[InteractionParams] = None) -> np.ndarray:
    """Feasible initial state ``X`` (quadrature scaled), made exact by a projective retraction."""
    from .manifold import StateSpace

    if regime == "auto":
        if params is None:
            raise ConfigurationError("regime 'auto' needs interaction parameters")
        regime = infer_regime(F, params)
    U = initial_spinor(F, M, regime, seed)
    phi0 = gaussian_profile(grid)
    X = np.sqrt(grid.cell_volume) * U.reshape((-1,) + (1,) * grid.d) * phi0
    X = X.astype(complex)
    space = StateSpace(grid, F, M)
    return space.unembed(space.retract(space.embed(X), kind="projective"))
