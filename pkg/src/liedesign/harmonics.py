"""Orthonormal Laplace-Beltrami eigenfunction bases for the manifold catalog.

Every basis is normalized in L^2 of the *probability* Haar (or normalized
volume) measure, so that the Haar measure has information matrix ``I_D``.

Point coordinates, one row per point:

============  =====  =====================================================
manifold      cols   coordinates
============  =====  =====================================================
``circle``    1      x in (0, 1]
``torus``     dim    x in (0, 1]^dim
``s2``        3      unit vector; theta = arccos(z), phi = atan2(y, x)
``s3``        4      unit vector (x, y, u, v) <-> [[x+iy, u+iv], [-u+iv, x-iy]]
``so3``       3      Euler angles (alpha, beta, gamma), z-y-z
``s2xso3``    6      s2 unit vector followed by so3 Euler angles
============  =====  =====================================================

On ``s3`` the hyperspherical angles are ``x = cos chi``,
``v = sin chi cos theta``, ``y = sin chi sin theta cos phi``,
``u = sin chi sin theta sin phi``. Any other orthogonal choice spans the same
eigenspaces and leaves every design criterion unchanged.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ManifoldMismatchError
from .specialfn import assoc_legendre, gegenbauer, jacobi, log_binom, log_factorial

MANIFOLDS = ("circle", "torus", "s2", "s3", "so3", "s2xso3")
TWO_PI = 2.0 * math.pi


def point_dim(manifold: str, torus_dim: int = 1) -> int:
    return {"circle": 1, "torus": torus_dim, "s2": 3, "s3": 4, "so3": 3, "s2xso3": 6}[manifold]


@dataclass(frozen=True)
class ModelSpec:
    """Manifold plus truncation; induces the ordered orthonormal basis.

    ``truncation`` is the maximal level: an int for ``circle``/``s2``/``s3``/
    ``so3``, a tuple of per-axis maximal frequencies for ``torus`` and a pair
    ``(L_s2, L_so3)`` for ``s2xso3``.
    """

    manifold: str
    truncation: int | tuple

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise DomainError(f"unknown manifold {self.manifold!r}")
        tr = self.truncation
        if self.manifold == "torus":
            if isinstance(tr, int):
                raise DomainError("torus truncation must be a tuple of per-axis frequencies")
            tr = tuple(int(t) for t in tr)
            if not tr or min(tr) < 0:
                raise DomainError("torus frequencies must be nonnegative")
        elif self.manifold == "s2xso3":
            tr = tuple(int(t) for t in tr)
            if len(tr) != 2 or min(tr) < 0:
                raise DomainError("s2xso3 truncation must be a pair of nonnegative ints")
        else:
            if isinstance(tr, (tuple, list)):
                raise DomainError(f"{self.manifold} truncation must be an int")
            tr = int(tr)
            if tr < 0:
                raise DomainError("truncation must be nonnegative")
        object.__setattr__(self, "truncation", tr)

    # -- tables -------------------------------------------------------------

    @cached_property
    def _torus_indices(self) -> np.ndarray:
        if self.manifold == "circle":
            n = self.truncation
            ks = [0] + [s * k for k in range(1, n + 1) for s in (-1, 1)]
            return np.array(ks, dtype=int)[:, None]
        ranges = [range(-t, t + 1) for t in self.truncation]
        ks = sorted(itertools.product(*ranges), key=lambda k: (sum(x * x for x in k), k))
        return np.array(ks, dtype=int)

    @cached_property
    def _index_table(self) -> list:
        """One tuple per basis function: (level key, function labels)."""
        m = self.manifold
        rows = []
        if m in ("circle", "torus"):
            for k in self._torus_indices:
                key = int(abs(k[0])) if m == "circle" else int(np.dot(k, k))
                rows.append((key, tuple(int(x) for x in k)))
        elif m == "s2":
            for l in range(self.truncation + 1):
                rows += [(l, (l, mm)) for mm in range(-l, l + 1)]
        elif m == "s3":
            for n in range(self.truncation + 1):
                for l in range(n + 1):
                    rows += [(n, (n, l, mm)) for mm in range(-l, l + 1)]
        elif m == "so3":
            for l in range(self.truncation + 1):
                rows += [(l, (l, a, b)) for a in range(-l, l + 1) for b in range(-l, l + 1)]
        else:
            s2 = ModelSpec("s2", self.truncation[0])._index_table
            so3 = ModelSpec("so3", self.truncation[1])._index_table
            rows = [((a[0], b[0]), a[1] + b[1]) for a in s2 for b in so3]
        return rows

    @cached_property
    def levels(self) -> list:
        """Level keys in canonical order (ints, or pairs for ``s2xso3``)."""
        keys = {r[0] for r in self._index_table}
        return sorted(keys)

    @cached_property
    def level_of(self) -> np.ndarray:
        """Level index (position in :attr:`levels`) of each basis function."""
        pos = {k: i for i, k in enumerate(self.levels)}
        return np.array([pos[r[0]] for r in self._index_table], dtype=int)

    @property
    def labels(self) -> list:
        return [r[1] for r in self._index_table]

    @property
    def dimension(self) -> int:
        return len(self._index_table)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def _check_level(self, level: int):
        if not 0 <= level < self.n_levels:
            raise IndexError(f"level {level} outside 0..{self.n_levels - 1}")

    def multiplicity(self, level: int) -> int:
        self._check_level(level)
        return int(np.count_nonzero(self.level_of == level))

    def eigenvalue(self, level: int) -> float:
        self._check_level(level)
        return level_eigenvalue(self.manifold, self.levels[level])

    def level_indices(self, levels) -> np.ndarray:
        """Basis positions belonging to the given level indices, in basis order."""
        for lv in levels:
            self._check_level(lv)
        return np.flatnonzero(np.isin(self.level_of, list(levels)))


def level_eigenvalue(manifold: str, key) -> float:
    """Laplace-Beltrami eigenvalue for a level key (not bounded by any truncation).

    Circle/torus keys are ``|k|^2`` (circle: ``|k|``); the proportionality
    constant on ``so3`` is 1. For ``s2xso3`` the product of the factor
    eigenvalues is reported, as in the product-basis description.
    """
    if manifold == "circle":
        return TWO_PI**2 * key * key
    if manifold == "torus":
        return TWO_PI**2 * key
    if manifold == "s2":
        return float(key * (key + 1))
    if manifold in ("s3", "so3"):
        return float(key * (key + 2))
    if manifold == "s2xso3":
        a, b = key
        return float(a * (a + 1) * b * (b + 1))
    raise DomainError(f"unknown manifold {manifold!r}")


def eigenvalue(model: ModelSpec, level: int) -> float:
    return model.eigenvalue(level)


def multiplicity(model: ModelSpec, level: int) -> int:
    return model.multiplicity(level)


# -- point conversions ------------------------------------------------------


def _wrap(angle):
    # np.mod(-1e-17, 2 pi) rounds to 2 pi itself
    a = np.mod(angle, TWO_PI)
    return np.where(a >= TWO_PI, 0.0, a)


def sphere_angles(xyz) -> tuple[np.ndarray, np.ndarray]:
    """(theta, phi) of unit 3-vectors; phi in [0, 2 pi)."""
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    theta = np.arctan2(np.hypot(xyz[:, 0], xyz[:, 1]), xyz[:, 2])
    phi = _wrap(np.arctan2(xyz[:, 1], xyz[:, 0]))
    return theta, phi


def sphere_point(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def euler_to_matrix(alpha, beta, gamma) -> np.ndarray:
    """``Rz(alpha) Ry(beta) Rz(gamma)``; broadcasts, returns shape (..., 3, 3)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    r = np.empty(np.broadcast(ca, cb, cg).shape + (3, 3))
    r[..., 0, 0] = ca * cb * cg - sa * sg
    r[..., 0, 1] = -ca * cb * sg - sa * cg
    r[..., 0, 2] = ca * sb
    r[..., 1, 0] = sa * cb * cg + ca * sg
    r[..., 1, 1] = -sa * cb * sg + ca * cg
    r[..., 1, 2] = sa * sb
    r[..., 2, 0] = -sb * cg
    r[..., 2, 1] = sb * sg
    r[..., 2, 2] = cb
    return r


def matrix_to_euler(r) -> np.ndarray:
    """Canonical z-y-z Euler triple(s) of rotation matrices, shape (n, 3).

    At gimbal lock (sin beta = 0) gamma is set to 0.
    """
    r = np.asarray(r, dtype=float).reshape(-1, 3, 3)
    sb = np.hypot(r[:, 0, 2], r[:, 1, 2])
    beta = np.arctan2(sb, r[:, 2, 2])
    alpha = np.arctan2(r[:, 1, 2], r[:, 0, 2])
    gamma = np.arctan2(r[:, 2, 1], -r[:, 2, 0])
    lock = sb < 1e-12
    up = lock & (r[:, 2, 2] > 0)
    down = lock & (r[:, 2, 2] <= 0)
    alpha = np.where(up, np.arctan2(r[:, 1, 0], r[:, 0, 0]), alpha)
    alpha = np.where(down, np.arctan2(-r[:, 0, 1], -r[:, 0, 0]), alpha)
    beta = np.where(up, 0.0, np.where(down, math.pi, beta))
    gamma = np.where(lock, 0.0, gamma)
    return np.stack([_wrap(alpha), beta, _wrap(gamma)], axis=1)


def canonical_euler(angles) -> np.ndarray:
    """Wrap Euler triples to alpha, gamma in [0, 2 pi), beta in [0, pi]."""
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    return matrix_to_euler(euler_to_matrix(a[:, 0], a[:, 1], a[:, 2]))


# -- special-function building blocks ----------------------------------------


def _sph_harm_table(lmax: int, xyz: np.ndarray) -> dict:
    """Orthonormal (area measure) Y_l^m for 0 <= l <= lmax, keyed by (l, m)."""
    theta, phi = sphere_angles(xyz)
    ct, st = np.cos(theta), np.sin(theta)
    out = {}
    for l in range(lmax + 1):
        for m in range(l + 1):
            lognorm = 0.5 * (math.log((2 * l + 1) / (4 * math.pi)) + log_factorial(l - m) - log_factorial(l + m))
            y = math.exp(lognorm) * assoc_legendre(l, m, ct, st) * np.exp(1j * m * phi)
            out[(l, m)] = y
            if m:
                out[(l, -m)] = (-1) ** m * np.conj(y)
    return out


def spherical_harmonic(l: int, m: int, theta, phi):
    """Y_l^m(theta, phi), orthonormal on S^2 with area measure, Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    xyz = sphere_point(theta, phi).reshape(-1, 3)
    val = _sph_harm_table(l, xyz)[(l, m)]
    return complex(val[0]) if np.ndim(theta) == 0 and np.ndim(phi) == 0 else val.reshape(np.broadcast(theta, phi).shape)


def wigner_d(l: int, m: int, mp: int, beta):
    """Wigner small-d function via the Jacobi-polynomial closed form.

    ``k = l - max(|m|, |m'|)``, ``a = |m - m'|``, ``b = |m + m'|`` and the sign
    is ``(-1)^(m' - m)`` when ``m' > m``.
    """
    if l < 0 or abs(m) > l or abs(mp) > l:
        raise DomainError(f"need |m|, |m'| <= l, got l={l}, m={m}, m'={mp}")
    k = l - max(abs(m), abs(mp))
    a = abs(m - mp)
    b = abs(m + mp)
    nu = 0 if mp <= m else mp - m
    coef = (-1) ** nu * math.exp(0.5 * log_binom(2 * l - k, k + a) - 0.5 * log_binom(k + b, b))
    bt = np.asarray(beta, dtype=float)
    val = coef * np.sin(bt / 2) ** a * np.cos(bt / 2) ** b * jacobi(k, a, b, np.clip(np.cos(bt), -1.0, 1.0))
    return float(val) if np.ndim(beta) == 0 else val


def wigner_D(l: int, m: int, mp: int, alpha, beta, gamma):
    """``D^l_{m,m'}(alpha, beta, gamma) = e^{-i m alpha} d^l_{m,m'}(beta) e^{-i m' gamma}``."""
    val = np.exp(-1j * m * np.asarray(alpha)) * wigner_d(l, m, mp, beta) * np.exp(-1j * mp * np.asarray(gamma))
    return complex(val) if np.ndim(val) == 0 else val


def _hyper_lognorm(n: int, l: int) -> float:
    # log of the constant making sin^l(chi) C_{n-l}^{l+1}(cos chi) Y_l^m unit-norm
    # under the probability measure on S^3 (total surface 2 pi^2)
    log_int = (
        math.log(math.pi)
        - (2 * l + 1) * math.log(2.0)
        + log_factorial(n + l + 1)
        - log_factorial(n - l)
        - math.log(n + 1)
        - 2 * log_factorial(l)
    )
    return 0.5 * (math.log(2 * math.pi**2) - log_int)


def _s3_split(q: np.ndarray):
    """cos chi and the unit 3-vector (y, u, v)/sin chi used by the S^2 factor."""
    x1 = np.clip(q[:, 0], -1.0, 1.0)
    rest = np.stack([q[:, 1], q[:, 2], q[:, 3]], axis=1)
    nrm = np.linalg.norm(rest, axis=1)
    safe = np.where(nrm > 0, nrm, 1.0)
    unit = rest / safe[:, None]
    unit[nrm == 0] = (0.0, 0.0, 1.0)
    return x1, np.sqrt(np.clip(1.0 - x1 * x1, 0.0, None)), unit


def hyperspherical(n: int, l: int, m: int, chi, theta, phi):
    """Hyperspherical harmonic on S^3, unit norm under the probability measure."""
    if not 0 <= l <= n or abs(m) > l:
        raise DomainError(f"need 0 <= l <= n and |m| <= l, got n={n}, l={l}, m={m}")
    chi = np.asarray(chi, dtype=float)
    radial = math.exp(_hyper_lognorm(n, l)) * np.sin(chi) ** l * gegenbauer(n - l, l + 1, np.clip(np.cos(chi), -1, 1))
    val = radial * spherical_harmonic(l, m, theta, phi)
    return complex(val) if np.ndim(val) == 0 else val


def s3_angles(q) -> np.ndarray:
    """(chi, theta, phi) of unit 4-vectors under the module's convention."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    x1, _, unit = _s3_split(q)
    theta, phi = sphere_angles(unit)
    return np.stack([np.arccos(x1), theta, phi], axis=1)


# -- basis evaluation --------------------------------------------------------


def _check_points(model: ModelSpec, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    want = len(model.truncation) if model.manifold == "torus" else point_dim(model.manifold)
    if pts.shape[1] != want:
        raise ManifoldMismatchError(
            f"{model.manifold} points need {want} coordinates, got {pts.shape[1]}"
        )
    return pts


def _basis_torus(model, pts):
    ks = model._torus_indices
    return np.exp(2j * math.pi * pts @ ks.T)


def _basis_s2(lmax, xyz):
    tab = _sph_harm_table(lmax, xyz)
    cols = [tab[(l, m)] for l in range(lmax + 1) for m in range(-l, l + 1)]
    return math.sqrt(4 * math.pi) * np.stack(cols, axis=1)


def _basis_s3(nmax, q):
    x1, sinchi, unit = _s3_split(q)
    tab = _sph_harm_table(nmax, unit)
    cols = []
    for n in range(nmax + 1):
        for l in range(n + 1):
            radial = math.exp(_hyper_lognorm(n, l)) * sinchi**l * gegenbauer(n - l, l + 1, x1)
            cols += [radial * tab[(l, m)] for m in range(-l, l + 1)]
    return np.stack(cols, axis=1)


def _basis_so3(lmax, euler):
    alpha, beta, gamma = euler[:, 0], euler[:, 1], euler[:, 2]
    cols = []
    for l in range(lmax + 1):
        scale = math.sqrt(2 * l + 1)
        for m in range(-l, l + 1):
            ea = np.exp(-1j * m * alpha)
            for mp in range(-l, l + 1):
                cols.append(scale * ea * wigner_d(l, m, mp, beta) * np.exp(-1j * mp * gamma))
    return np.stack(cols, axis=1)


def basis_matrix(model: ModelSpec, points) -> np.ndarray:
    """Rows ``phi(g_i)^T`` for each point: complex array of shape (n, D)."""
    pts = _check_points(model, points)
    m = model.manifold
    if m in ("circle", "torus"):
        return _basis_torus(model, pts)
    if m == "s2":
        return _basis_s2(model.truncation, pts)
    if m == "s3":
        return _basis_s3(model.truncation, pts)
    if m == "so3":
        return _basis_so3(model.truncation, pts)
    a = _basis_s2(model.truncation[0], pts[:, :3])
    b = _basis_so3(model.truncation[1], pts[:, 3:])
    return (a[:, :, None] * b[:, None, :]).reshape(len(pts), -1)


def basis_vector(model: ModelSpec, g) -> np.ndarray:
    """phi(g) in canonical order."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 1:
        raise ManifoldMismatchError("basis_vector takes a single point")
    return basis_matrix(model, g[None, :])[0]
