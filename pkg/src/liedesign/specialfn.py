"""Orthogonal polynomials and log-factorial helpers.

All polynomials are evaluated by three-term recurrence and accept scalar or
array arguments. The associated Legendre function carries the Condon-Shortley
phase ``(-1)^m``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_X_SLACK = 1e-12


def _as_arg(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0 + _X_SLACK):
        raise DomainError("argument must lie in [-1, 1]")
    return arr


def _out(val, x):
    return float(val) if np.ndim(x) == 0 else val


def log_factorial(n) -> float:
    return math.lgamma(n + 1.0)


def log_binom(n, k) -> float:
    return math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)


def binom(n, k) -> float:
    """Binomial coefficient through log-gamma; valid for real arguments."""
    if k < 0 or k > n:
        return 0.0
    return math.exp(log_binom(n, k))


def jacobi(k: int, a: float, b: float, x):
    """Jacobi polynomial ``P_k^{(a,b)}(x)``."""
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a nonnegative integer, got {k}")
    if a <= -1 or b <= -1:
        raise DomainError(f"Jacobi parameters must exceed -1, got a={a}, b={b}")
    xs = _as_arg(x)
    p0 = np.ones_like(xs)
    if k == 0:
        return _out(p0, x)
    p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * xs
    for n in range(2, int(k) + 1):
        s = 2 * n + a + b
        c1 = 2.0 * n * (n + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (a * a - b * b)
        c3 = (s - 2.0) * (s - 1.0) * s
        c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s
        p0, p1 = p1, ((c2 + c3 * xs) * p1 - c4 * p0) / c1
    return _out(p1, x)


def gegenbauer(n: int, lam: float, x):
    """Gegenbauer polynomial ``C_n^{lam}(x)``."""
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a nonnegative integer, got {n}")
    if lam <= -0.5:
        raise DomainError(f"Gegenbauer parameter must exceed -1/2, got {lam}")
    xs = _as_arg(x)
    c0 = np.ones_like(xs)
    if n == 0:
        return _out(c0, x)
    c1 = 2.0 * lam * xs
    for m in range(2, int(n) + 1):
        c0, c1 = c1, (2.0 * (m + lam - 1.0) * xs * c1 - (m + 2.0 * lam - 2.0) * c0) / m
    return _out(c1, x)


def assoc_legendre(l: int, m: int, x, sqrt_1mx2=None):
    """Associated Legendre function ``P_l^m(x)`` with Condon-Shortley phase.

    Only ``0 <= m <= l``; negative orders are handled by the spherical
    harmonic symmetry in :mod:`liedesign.harmonics`. Callers that know
    ``sqrt(1 - x^2)`` accurately (``sin theta`` near the poles) may pass it.
    """
    if l < 0 or m < 0 or m > l:
        raise DomainError(f"need 0 <= m <= l, got l={l}, m={m}")
    xs = _as_arg(x)
    somx2 = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None)) if sqrt_1mx2 is None else np.asarray(sqrt_1mx2, dtype=float)
    pmm = np.ones_like(xs)
    fact = 1.0
    for _ in range(m):
        pmm = -pmm * fact * somx2
        fact += 2.0
    if l == m:
        return _out(pmm, x)
    pmmp1 = xs * (2 * m + 1) * pmm
    if l == m + 1:
        return _out(pmmp1, x)
    for ll in range(m + 2, l + 1):
        pmm, pmmp1 = pmmp1, (xs * (2 * ll - 1) * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
    return _out(pmmp1, x)
