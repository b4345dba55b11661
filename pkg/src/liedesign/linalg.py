"""Complex Hermitian matrix kernel.

Eigendecomposition is done with cyclic Jacobi rotations in round-robin
(tournament) order, so that each step applies ``n // 2`` disjoint rotations at
once as vectorized row/column updates. Everything the design criteria need
(pseudo-inverse, rank, trace powers) is derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ShapeError, SingularityError, DomainError

DEFAULT_TOL = 1e-9
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues (ascending) and unitary eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex square array, raising if it is not Hermitian."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        return a
    scale = 1.0 + np.abs(a).max()
    if np.abs(a - a.conj().T).max() > tol * scale:
        raise ShapeError("matrix is not Hermitian")
    return a


def _round_robin(n: int):
    """Yield index pairs for one cyclic sweep; each round is a perfect matching."""
    players = list(range(n))
    if n % 2:
        players.append(-1)
    m = len(players)
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        yield np.array(ps, dtype=int), np.array(qs, dtype=int)
        players = [players[0]] + [players[-1]] + players[1:-1]


def herm_eig(m, tol: float = HERMITIAN_TOL, max_sweeps: int = 60) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of ``a[p, q]`` with a diagonal
    unitary and then applies the classical real Jacobi rotation, so the
    combined 2x2 transform is ``diag(1, e^{-i phi}) @ [[c, s], [-s, c]]``.
    """
    a = check_hermitian(m, tol=1e-10 if tol < 1e-10 else tol).copy()
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if n <= 1:
        return HermitianEig(a.diagonal().real.copy(), v)

    fro = np.linalg.norm(a)
    if fro == 0.0:
        return HermitianEig(np.zeros(n), v)
    target = 1e-15 * fro
    rounds = list(_round_robin(n))
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        if np.linalg.norm(a[offmask]) <= target:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 1e-300
            if not active.any():
                continue
            p, q, apq, mag = p[active], q[active], apq[active], mag[active]
            app = a[p, p].real
            aqq = a[q, q].real
            phase = apq / mag
            theta = (aqq - app) / (2.0 * mag)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # U restricted to (p, q): [[upp, upq], [uqp, uqq]]
            upp = c.astype(complex)
            upq = s.astype(complex)
            uqp = -s * phase.conj()
            uqq = c * phase.conj()

            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * upp + cq * uqp
            a[:, q] = cp * upq + cq * uqq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = upp.conj()[:, None] * rp + uqp.conj()[:, None] * rq
            a[q, :] = upq.conj()[:, None] * rp + uqq.conj()[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * upp + vq * uqp
            v[:, q] = vp * upq + vq * uqq

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEig(w[order], v[:, order])


def eigvalsh(m) -> np.ndarray:
    return herm_eig(m).eigenvalues


def _cutoff(w: np.ndarray, tol: float) -> float:
    return tol * max(float(np.abs(w).max(initial=0.0)), 0.0)


def pinv(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian PSD matrix.

    Eigenvalues below ``tol * max eigenvalue`` are treated as zero.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    eig = herm_eig(m)
    w, vecs = eig.eigenvalues, eig.eigenvectors
    cut = _cutoff(w, tol)
    if w.size and w[0] < -cut:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} < 0")
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (vecs * inv) @ vecs.conj().T


def rank(m, tol: float = DEFAULT_TOL) -> int:
    w = herm_eig(m).eigenvalues
    if w.size == 0:
        return 0
    kmax = np.abs(w).max()
    if kmax <= tol:
        return 0
    return int(np.count_nonzero(w > tol * kmax))


def _check_spectrum(w, p: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if p >= 1:
        raise DomainError(f"p must be < 1, got {p}")
    if w.size == 0:
        raise DomainError("empty spectrum")
    if w.min() <= 0.0:
        raise SingularityError("matrix is not positive definite")
    return w


def _log_mean_power(r, p):
    # log mean(r^p) for r >= 1, accurate when p is tiny
    return float(np.log1p(np.mean(np.expm1(p * np.log(r)))))


def trace_power_from_eigenvalues(w, p: float) -> float:
    """Kiefer criterion on an eigenvalue list; see :func:`trace_power`."""
    w = _check_spectrum(w, p)
    if p == -np.inf:
        return float(w.min())
    if p == 0:
        return float(np.exp(np.mean(np.log(w))))
    # log space with lambda_min factored out; overflow to inf is legitimate for p near 0+
    lo = w.min()
    with np.errstate(over="ignore"):
        return float(lo * np.exp((np.log(len(w)) + _log_mean_power(w / lo, p)) / p))


def power_mean_from_eigenvalues(w, p: float) -> float:
    """Normalized mean ``((1/s) tr C^p)^(1/p)``; nondecreasing in p."""
    w = _check_spectrum(w, p)
    if p == -np.inf or p == 0:
        return trace_power_from_eigenvalues(w, p)
    lo = w.min()
    return float(lo * np.exp(_log_mean_power(w / lo, p) / p))


def trace_power(c, p: float) -> float:
    """``(tr C^p)^(1/p)``; ``det(C)^(1/s)`` at ``p = 0``; ``lambda_min`` at ``-inf``."""
    return trace_power_from_eigenvalues(herm_eig(c).eigenvalues, p)
