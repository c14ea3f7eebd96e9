"""Retractions onto ``{u : u.u = 1, u.Gamma u = M}`` and their scalar root solvers.

Every retraction here rescales each spin-component block ``w_l`` of ``w`` by a
positive factor that depends only on the squared block norms
``a_l = ||w_l||**2``. The ``*_factors`` functions compute those factors from
``a`` (ordered ``l = F..-F``) and are what the vector-level wrappers use.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import RetractionDomainError, RootFindingError, StepTooLargeError

log = logging.getLogger(__name__)

ZERO_BLOCK_RTOL = 1e-28
ROOT_FTOL = 1e-14
ROOT_MAXITER = 100
RETRACTIONS = ("projective", "orthogonal", "closedform")

_EPS = np.finfo(float).eps
_MAX_DOUBLINGS = 1100


def safeguarded_newton(fun, lo, hi, x0=None, ftol=ROOT_FTOL, maxiter=ROOT_MAXITER):
    """Root of an increasing function on the open bracket ``(lo, hi)``.

    ``fun(x)`` returns ``(value, derivative, residual)``; iteration stops when
    ``|residual| <= ftol`` or the bracket collapses to a few ulps. Newton steps
    that leave the current bracket are replaced by bisection.

    Returns
    -------
    x : float
    iterations : int
    """
    if not lo < hi:
        raise RootFindingError(f"empty bracket ({lo}, {hi})")
    x = x0 if x0 is not None and lo < x0 < hi else 0.5 * (lo + hi)
    for it in range(maxiter):
        f, fp, res = fun(x)
        if not np.isfinite(f):
            raise RootFindingError(f"non-finite function value at x={x}")
        if abs(res) <= ftol or f == 0.0:
            return x, it
        if f < 0:
            lo = x
        else:
            hi = x
        xn = x - f / fp if fp > 0 and np.isfinite(fp) else np.nan
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if hi - lo <= 4 * _EPS * max(abs(lo), abs(hi), 1e-300) or xn == x:
            return x, it
        x = xn
    raise RootFindingError(f"no convergence after {maxiter} iterations (residual {res:.3e})")


def _normalized_support(a, lv, M):
    a = np.asarray(a, dtype=float)
    total = float(a.sum())
    if not total > 0 or not np.isfinite(total):
        raise RetractionDomainError("retraction of a zero or non-finite vector")
    an = a / total
    nz = an > ZERO_BLOCK_RTOL
    if not (np.any(nz & (lv < M)) and np.any(nz & (lv > M))):
        raise RetractionDomainError(
            f"point outside Omega: needs mass both below and above M={M}")
    return total, an, nz


def projective_ratio(a, lv, M):
    """Root ``r`` of ``h1(t) = sum (l-M) a_l / (1-(l-M)t)**2`` and the normalizer ``s``.

    Only nonzero blocks enter the sums. Returned ``s`` refers to ``a / sum(a)``.
    """
    total, an, nz = _normalized_support(a, lv, M)
    c = (lv - M)[nz]
    w = an[nz]
    f1, f2 = lv[nz].min(), lv[nz].max()
    lo, hi = 1.0 / (f1 - M), 1.0 / (f2 - M)

    def fun(t):
        q = 1.0 / (1.0 - c * t)
        q2 = q * q
        s = float(np.sum(w * q2))
        h = float(np.sum(c * w * q2))
        dh = float(np.sum(2.0 * c * c * w * q2 * q))
        return h, dh, h / s

    r, _ = safeguarded_newton(fun, lo, hi, x0=0.0)
    s = float(np.sum(w / (1.0 - c * r) ** 2))
    return r, s, total


def projective_factors(a, lv, M):
    """Block scale factors ``1/(1 - mu - l*lambda)`` of the metric projection."""
    lv = np.asarray(lv, dtype=float)
    r, s, total = projective_ratio(a, lv, M)
    nz = np.asarray(a) / total > ZERO_BLOCK_RTOL
    fac = np.zeros_like(lv)
    fac[nz] = 1.0 / (np.sqrt(s * total) * (1.0 - (lv[nz] - M) * r))
    return fac


def projective_multipliers(a, lv, M):
    """Lagrange multipliers ``(mu, lambda)`` of the projection, for diagnostics."""
    r, s, total = projective_ratio(a, lv, M)
    root = np.sqrt(s * total)
    lam = r * root
    mu = 1.0 - (1.0 + M * r) * root
    return mu, lam


def _spin1_case4(n1, n0, nm, M):
    """Closed-form multipliers for F=1, M>0, all three blocks nonzero."""
    sq = np.sqrt
    xi = 2 * sq(M) * n0 / (sq(1 + M) * nm)
    zeta = sq(1 - M) * n1 / (sq(1 + M) * nm)
    p0 = (-xi**2 - 2 * zeta**2 + 2) / 2
    q0 = -xi * (zeta**2 + 1)
    D = xi**2 - zeta**2 + 1
    d0 = D**2
    d1 = 2 * D**3 + 108 * xi**2 * zeta**2
    disc = d1**2 - 4 * d0**3
    if disc >= 0:
        Q = np.cbrt((d1 + sq(disc)) / 2)
        S = 0.5 * sq(-2 / 3 * p0 + (Q + d0 / Q) / 3)
    else:
        arg = np.clip(d1 / (2 * sq(d0**3)), -1.0, 1.0)
        S = 0.5 * sq(-2 / 3 * p0 + 2 / 3 * sq(d0) * np.cos(np.arccos(arg) / 3))
    beta = xi / 2 + S - 0.5 * sq(-4 * S**2 - 2 * p0 - q0 / S)
    alpha = sq(1 - M**2) * beta / sq(2 * M + (1 + M) * beta**2)
    mu = 1 - n0 / alpha
    lam = n0 / alpha - sq(2) * n1 / sq(1 + M - alpha**2)
    return mu, lam


def projective_factors_spin1(a, M, check=True):
    """Projective retraction factors for F=1 and ``M >= 0`` without a root solve.

    Falls back to :func:`projective_factors` (and logs) when the closed form
    is not finite or does not land on the constraint set to 1e-12.
    """
    lv = np.array([1.0, 0.0, -1.0])
    a = np.asarray(a, dtype=float)
    if M < 0:
        return projective_factors_spin1(a[::-1], -M, check)[::-1]
    total, an, nz = _normalized_support(a, lv, M)
    n1, n0, nm = np.sqrt(np.where(nz, a, 0.0))
    with np.errstate(all="ignore"):
        if M == 0:
            t = np.sqrt(n0**2 + (n1 + nm) ** 2 / 2)
            fac = np.array([(n1 + nm) / (2 * t * n1), 1 / t, (n1 + nm) / (2 * t * nm)])
            fac[~nz] = 0.0
        elif not nz[1]:
            fac = np.array([np.sqrt((1 + M) / 2) / n1, 0.0, np.sqrt((1 - M) / 2) / nm])
        elif not nz[2]:
            fac = np.array([np.sqrt(M) / n1, np.sqrt(1 - M) / n0, 0.0])
        else:
            mu, lam = _spin1_case4(n1, n0, nm, M)
            fac = 1.0 / (1.0 - mu - lv * lam)
    if check:
        mass = float(np.sum(fac**2 * a))
        mag = float(np.sum(lv * fac**2 * a))
        ok = np.all(np.isfinite(fac)) and np.all(fac >= 0)
        if not (ok and abs(mass - 1) <= 1e-12 and abs(mag - M) <= 1e-12):
            log.debug("spin-1 closed-form projection rejected; using root solver")
            return projective_factors(a, lv, M)
    return fac


def orthogonal_log_ratio(a, lv, M):
    """``s = log r`` where ``r`` is the unique positive root of ``h2``.

    Solved as the zero of ``g(s) = sum c a e^{cs} / sum a e^{cs}``, ``c = l - M``,
    which has the same sign as ``h2(e^s)`` and is strictly increasing.
    """
    total, an, nz = _normalized_support(a, lv, M)
    c = (lv - M)[nz]
    w = an[nz]

    def fun(s):
        z = c * s
        e = w * np.exp(z - z.max())
        e /= e.sum()
        mean = float(np.sum(c * e))
        var = float(np.sum((c - mean) ** 2 * e))
        return mean, var, mean

    lo, hi = -1.0, 1.0
    for _ in range(_MAX_DOUBLINGS):
        if fun(hi)[0] >= 0:
            break
        lo, hi = hi, 2 * hi
    for _ in range(_MAX_DOUBLINGS):
        if fun(lo)[0] <= 0:
            break
        lo, hi = 2 * lo, lo
    if fun(hi)[0] < 0 or fun(lo)[0] > 0:
        raise RootFindingError("could not bracket the orthogonal retraction root")
    if fun(lo)[0] == 0:
        return lo
    s, _ = safeguarded_newton(fun, lo, hi, x0=0.0 if lo < 0.0 < hi else None)
    return s


def orthogonal_factors(a, lv, M):
    """Scale factors ``sqrt(r**l / sum_k a_k r**k)`` of the orthogonal retraction."""
    lv = np.asarray(lv, dtype=float)
    a = np.asarray(a, dtype=float)
    s = orthogonal_log_ratio(a, lv, M)
    z = (lv - M) * s
    nz = a / a.sum() > ZERO_BLOCK_RTOL
    zmax = z[nz].max()
    den = float(np.sum(a[nz] * np.exp(z[nz] - zmax)))
    fac = np.where(nz, np.sqrt(np.exp(z - zmax) / den), 0.0)
    return fac


def closedform_factors(a, lv, M):
    """Scale factors of the closed-form retraction; raises when ``w`` is not in S."""
    lv = np.asarray(lv, dtype=float)
    a = np.asarray(a, dtype=float)
    F = lv.max()
    g0 = float(a.sum())
    g1 = float(np.dot(lv, a))
    g2 = float(np.dot(lv * lv, a))
    den = g0 * g2 - g1 * g1
    num = g2 - (M + lv) * g1 + M * lv * g0
    edge = [g2 - (M + l) * g1 + M * l * g0 for l in (F, -F)]
    if not (den > 0 and min(edge) > 0 and np.all(num > 0)):
        raise StepTooLargeError("closed-form retraction undefined at this point; shrink the step")
    return np.sqrt(num / den)


def factors(a, lv, M, kind="projective"):
    if kind == "projective":
        return projective_factors(a, lv, M)
    if kind == "projective-spin1":
        return projective_factors_spin1(a, M)
    if kind == "orthogonal":
        return orthogonal_factors(a, lv, M)
    if kind == "closedform":
        return closedform_factors(a, lv, M)
    raise ValueError(f"unknown retraction {kind!r}; expected one of {RETRACTIONS}")
