"""Periodic tensor grids, the Fourier pseudospectral Laplacian, and prolongation.

Fields live on the last ``d`` axes of an array; any leading axes (e.g. spin
components) are carried along. Fourier coefficients use the standard DFT
layout: array index ``k`` holds mode ``p = k`` for ``k < n/2`` and
``p = k - n`` otherwise, so ``p`` runs over ``-n/2 .. n/2-1`` as usual.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DimensionError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the box ``prod_a [a_a, b_a)``.

    Parameters
    ----------
    bounds : tuple of (a, b) pairs, one per axis.
    n : tuple of even point counts, one per axis.
    """

    bounds: tuple
    n: tuple

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        n = tuple(int(k) for k in self.n)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "n", n)
        if not 1 <= len(n) <= 3 or len(bounds) != len(n):
            raise ConfigurationError("grid must have 1-3 axes with one (a, b) pair per axis")
        for (a, b), k in zip(bounds, n):
            if not b > a:
                raise ConfigurationError(f"grid bounds must satisfy b > a, got ({a}, {b})")
            if k < 4 or k % 2:
                raise ConfigurationError(f"grid point counts must be even and >= 4, got {k}")

    @classmethod
    def uniform(cls, d, a, b, n):
        return cls(bounds=((a, b),) * d, n=(n,) * d)

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple:
        return self.n

    @property
    def npoints(self) -> int:
        return int(np.prod(self.n))

    @property
    def h(self) -> tuple:
        return tuple((b - a) / k for (a, b), k in zip(self.bounds, self.n))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def axes(self) -> list:
        """Node coordinates ``x_j = a + j*h`` for each axis."""
        return [a + np.arange(k) * h for (a, _), k, h in zip(self.bounds, self.n, self.h)]

    def mesh(self) -> list:
        return np.meshgrid(*self.axes, indexing="ij")

    def multipliers(self, axis: int) -> np.ndarray:
        """Fourier multipliers ``2*pi*p/(b - a)`` in DFT layout for one axis."""
        a, b = self.bounds[axis]
        k = self.n[axis]
        return 2 * np.pi * sfft.fftfreq(k, d=(b - a) / k)

    @cached_property
    def ksq(self) -> np.ndarray:
        """Sum of squared multipliers over axes, broadcast to the grid shape."""
        total = np.zeros(self.shape)
        for ax in range(self.d):
            lam = self.multipliers(ax)
            shape = [1] * self.d
            shape[ax] = -1
            total = total + (lam**2).reshape(shape)
        total.setflags(write=False)
        return total

    def refine(self) -> "Grid":
        return Grid(self.bounds, tuple(2 * k for k in self.n))

    def coarsen(self) -> "Grid":
        return Grid(self.bounds, tuple(k // 2 for k in self.n))


def _grid_axes(grid, field):
    field = np.asarray(field)
    if field.ndim < grid.d or field.shape[field.ndim - grid.d:] != grid.shape:
        raise DimensionError(f"field shape {field.shape} does not end with grid shape {grid.shape}")
    return tuple(range(field.ndim - grid.d, field.ndim))


def laplacian_apply(grid: Grid, field: np.ndarray) -> np.ndarray:
    """Apply the pseudospectral Laplacian (i.e. ``-L``) to ``field``.

    Cost is one forward and one inverse FFT over the grid axes.
    """
    axes = _grid_axes(grid, field)
    coef = sfft.fftn(field, axes=axes)
    coef *= -grid.ksq
    return sfft.ifftn(coef, axes=axes, overwrite_x=True)


def prolongate(coarse: Grid, fine: Grid, field: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of point values from ``coarse`` to ``fine``.

    Zero-pads Fourier coefficients; the coarse Nyquist mode ``p = -n/2`` is kept
    at ``p = -n/2`` on the fine grid, so values at shared nodes are unchanged.
    Works on physical values (not quadrature-scaled ones).
    """
    if coarse.bounds != fine.bounds or any(f != 2 * c for c, f in zip(coarse.n, fine.n)):
        raise ConfigurationError("prolongation needs nested grids with twice the points per axis")
    axes = _grid_axes(coarse, field)
    lead = np.shape(field)[: np.ndim(field) - coarse.d]
    coef = sfft.fftn(field, axes=axes)
    padded = np.zeros(lead + fine.shape, dtype=complex)
    index = []
    for c, f in zip(coarse.n, fine.n):
        p = np.arange(c)
        p = np.where(p < c // 2, p, p - c)
        index.append(np.mod(p, f))
    sel = (Ellipsis,) + tuple(np.ix_(*index))
    padded[sel] = coef
    scale = fine.npoints / coarse.npoints
    out = sfft.ifftn(padded, axes=tuple(range(len(lead), len(lead) + fine.d)), overwrite_x=True)
    out *= scale
    if not np.iscomplexobj(field):
        out = out.real
    return out
