"""Spin and pairing matrices for spin-F condensates (F = 1, 2, 3).

Components are always ordered ``l = F, F-1, ..., -F``; index 0 is ``l = F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import ConfigurationError

SUPPORTED_SPINS = (1, 2, 3)

# Super-diagonal of f_x for each spin, as tabulated for the standard basis.
_FX_SUPERDIAG = {
    1: (1 / np.sqrt(2), 1 / np.sqrt(2)),
    2: (1.0, np.sqrt(1.5), np.sqrt(1.5), 1.0),
    3: (np.sqrt(1.5), np.sqrt(2.5), np.sqrt(3.0), np.sqrt(3.0), np.sqrt(2.5), np.sqrt(1.5)),
}

# Anti-diagonal vectors of the spin-3 quintet matrices A_{+-1}, A_{+-2}.
_A3_PM1 = np.array([5 / (2 * np.sqrt(3)), -np.sqrt(5) / 2, 1 / np.sqrt(6),
                    1 / np.sqrt(6), -np.sqrt(5) / 2, 5 / (2 * np.sqrt(3))]) / np.sqrt(7)
_A3_PM2 = np.array([np.sqrt(5 / 6), -np.sqrt(5 / 3), np.sqrt(2.0),
                    -np.sqrt(5 / 3), np.sqrt(5 / 6)]) / np.sqrt(7)


def _check_spin(F):
    if F not in SUPPORTED_SPINS:
        raise ConfigurationError(f"unsupported spin F={F!r}; expected one of {SUPPORTED_SPINS}")


def levels(F: int) -> np.ndarray:
    """Magnetic quantum numbers ``(F, F-1, ..., -F)`` as floats."""
    return np.arange(F, -F - 1, -1, dtype=float)


@dataclass(frozen=True)
class SpinAlgebra:
    """Spin matrices and pairing matrices for one value of ``F``.

    ``pairA`` is ``None`` for F=1; ``pairA2`` holds ``A_{2l}`` for ``l = -2..2``
    and is ``None`` unless F=3.
    """

    F: int
    fx: np.ndarray
    fy: np.ndarray
    fz: np.ndarray
    pairA: Optional[np.ndarray] = None
    pairA2: Optional[tuple] = None

    @property
    def ncomp(self) -> int:
        return 2 * self.F + 1

    @property
    def spin_matrices(self):
        return (self.fx, self.fy, self.fz)

    @property
    def levels(self) -> np.ndarray:
        return levels(self.F)

    def zeeman(self, p: float, q: float) -> np.ndarray:
        """Per-component Zeeman shift ``b_l = -p*l + q*l**2``."""
        lv = self.levels
        return -p * lv + q * lv**2

    def quintet(self, l: int) -> np.ndarray:
        """Return ``A_{2l}`` for ``l`` in ``-2..2`` (F=3 only)."""
        if self.pairA2 is None:
            raise ConfigurationError(f"no quintet pairing matrices for F={self.F}")
        return self.pairA2[l + 2]


def build_spin_matrices(F: int) -> tuple:
    """Return ``(fx, fy, fz)`` as complex ``(2F+1, 2F+1)`` arrays."""
    _check_spin(F)
    c = np.asarray(_FX_SUPERDIAG[F])
    n = 2 * F + 1
    fx = np.zeros((n, n), dtype=complex)
    fy = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    fx[idx, idx + 1] = c
    fx[idx + 1, idx] = c
    fy[idx, idx + 1] = -1j * c
    fy[idx + 1, idx] = 1j * c
    fz = np.diag(levels(F)).astype(complex)
    return fx, fy, fz


def _antidiag_matrix(n, offset, values):
    """Symmetric matrix with ``values`` on the anti-diagonal ``j + k = n - 1 - offset`` (0-based)."""
    A = np.zeros((n, n))
    s = n - 1 - offset
    rows = list(range(max(0, s - (n - 1)), min(n - 1, s) + 1))
    if len(rows) != len(values):
        raise ValueError("anti-diagonal length mismatch")
    for j, v in zip(rows, values):
        A[j, s - j] = v
    return A


def build_pairing_matrices(F: int):
    """Return ``(pairA, pairA2)`` for the singlet and quintet amplitudes.

    ``pairA`` realizes ``A00 = Phi^T pairA Phi``; ``pairA2`` is a tuple of the
    five symmetric matrices ``A_{2l}``, ``l = -2..2``. For F=1 both are ``None``,
    for F=2 ``pairA2`` is ``None``.
    """
    _check_spin(F)
    if F == 1:
        return None, None
    n = 2 * F + 1
    signs = np.array([(-1.0) ** j for j in range(n)])
    A = np.fliplr(np.diag(signs)) / np.sqrt(n)
    if F == 2:
        return A, None

    A0 = np.zeros((n, n))
    A0[0, 6] = A0[6, 0] = 5 / (2 * np.sqrt(3))
    A0[2, 4] = A0[4, 2] = -np.sqrt(3) / 2
    A0[3, 3] = np.sqrt(2 / 3)
    A0 /= np.sqrt(7)
    # Rows j (0-based) of A_l satisfy j + k = 6 - l.
    quintet = {
        0: A0,
        1: _antidiag_matrix(n, 1, _A3_PM1),
        -1: _antidiag_matrix(n, -1, _A3_PM1),
        2: _antidiag_matrix(n, 2, _A3_PM2),
        -2: _antidiag_matrix(n, -2, _A3_PM2),
    }
    return A, tuple(quintet[l] for l in range(-2, 3))


@lru_cache(maxsize=None)
def spin_algebra(F: int) -> SpinAlgebra:
    """Build (and cache) the immutable :class:`SpinAlgebra` for ``F``."""
    fx, fy, fz = build_spin_matrices(F)
    A, A2 = build_pairing_matrices(F)
    for m in (fx, fy, fz, A) + (A2 or ()):
        if m is not None:
            m.setflags(write=False)
    return SpinAlgebra(F=F, fx=fx, fy=fy, fz=fz, pairA=A, pairA2=A2)


@dataclass(frozen=True)
class InteractionParams:
    """Interaction strengths, Zeeman shifts and target magnetization.

    ``beta2`` is ignored for F=1 and ``beta3`` for F<=2.
    """

    beta0: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    beta3: float = 0.0
    p: float = 0.0
    q: float = 0.0
    M: float = 0.0

    def validate(self, F: int) -> "InteractionParams":
        _check_spin(F)
        vals = (self.beta0, self.beta1, self.beta2, self.beta3, self.p, self.q, self.M)
        if not all(np.isfinite(v) for v in vals):
            raise ConfigurationError("interaction parameters must be finite")
        if not abs(self.M) < F:
            raise ConfigurationError(f"magnetization must satisfy |M| < F, got M={self.M}, F={F}")
        return self

    def betas(self, F: int) -> tuple:
        return (self.beta0, self.beta1, self.beta2, self.beta3)[: F + 1]
