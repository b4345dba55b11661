"""Design construction, transformation and file I/O.

A :class:`Design` is a finite probability measure: an ``(n, k)`` array of
points in the coordinates of :mod:`liedesign.harmonics` plus positive
weights summing to one.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    ConstructionError,
    DesignDataError,
    DesignParseError,
    DomainError,
    ManifoldMismatchError,
    PreconditionError,
)
from .harmonics import (
    MANIFOLDS,
    TWO_PI,
    canonical_euler,
    euler_to_matrix,
    matrix_to_euler,
    point_dim,
    sphere_point,
)
from .specialfn import binom

BETA_CONVENTIONS = ("endpoints", "midpoint", "leftOpen")
# Selected by scripts/calibrate_grids.py: the only convention reproducing the
# published product-manifold efficiencies.
DEFAULT_GRID_CONVENTION = "endpoints"
WEIGHT_TOL = 1e-12
UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Design:
    manifold: str
    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise DomainError(f"unknown manifold {self.manifold!r}")
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise DomainError("a design needs at least one point")
        if self.manifold != "torus" and pts.shape[1] != point_dim(self.manifold):
            raise ManifoldMismatchError(
                f"{self.manifold} points need {point_dim(self.manifold)} coordinates, got {pts.shape[1]}"
            )
        w = self.weights
        w = np.full(len(pts), 1.0 / len(pts)) if w is None else np.asarray(w, dtype=float).ravel()
        if w.shape != (len(pts),):
            raise DomainError("need one weight per point")
        if np.any(w <= 0):
            raise DomainError("weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL * max(1, len(w)):
            raise DomainError(f"weights sum to {w.sum()!r}, not 1")
        _check_on_manifold(self.manifold, pts)
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.points)

    @property
    def is_equal_weight(self) -> bool:
        return bool(np.allclose(self.weights, 1.0 / len(self), rtol=1e-12, atol=0))

    def __repr__(self):
        return f"Design({self.manifold!r}, n={len(self)})"


def _check_on_manifold(manifold, pts):
    if manifold in ("s2", "s3"):
        err = np.abs(np.linalg.norm(pts, axis=1) - 1.0).max()
        if err > 1e-10:
            raise DomainError(f"{manifold} points must be unit vectors (error {err:.2e})")
    elif manifold == "s2xso3":
        _check_on_manifold("s2", pts[:, :3])


def embed(design: Design) -> np.ndarray:
    """Coordinates in which Euclidean distance is a metric on the manifold."""
    m, pts = design.manifold, design.points
    if m in ("circle", "torus"):
        ang = TWO_PI * pts
        return np.hstack([np.cos(ang), np.sin(ang)]) / TWO_PI
    if m in ("s2", "s3"):
        return pts
    if m == "so3":
        return euler_to_matrix(pts[:, 0], pts[:, 1], pts[:, 2]).reshape(len(pts), 9)
    rot = euler_to_matrix(pts[:, 3], pts[:, 4], pts[:, 5]).reshape(len(pts), 9)
    return np.hstack([pts[:, :3], rot])


def merge_duplicates(design: Design, tol: float = 1e-9) -> Design:
    """Merge points closer than ``tol`` (in :func:`embed` coordinates), adding weights."""
    emb = embed(design)
    tree = cKDTree(emb)
    rep = -np.ones(len(emb), dtype=int)
    keep = []
    for i in range(len(emb)):
        if rep[i] >= 0:
            continue
        rep[i] = len(keep)
        for j in tree.query_ball_point(emb[i], tol):
            if rep[j] < 0:
                rep[j] = rep[i]
        keep.append(i)
    if len(keep) == len(emb):
        return design
    w = np.bincount(rep, weights=design.weights)
    return Design(design.manifold, design.points[keep], w / w.sum())


# -- closed-form constructions ------------------------------------------------


def circle_design(n_points: int) -> Design:
    """Equal weights at s / n_points, s = 1..n_points."""
    if n_points < 1:
        raise DomainError("need at least one point")
    x = np.arange(1, n_points + 1) / n_points
    return Design("circle", x[:, None])


def torus_grid(counts) -> Design:
    counts = tuple(int(c) for c in counts)
    if not counts or min(counts) < 1:
        raise DomainError("all per-axis counts must be >= 1")
    axes = [np.arange(1, c + 1) / c for c in counts]
    pts = np.array(list(itertools.product(*axes)), dtype=float)
    return Design("torus", pts)


def mimura_tight_2design() -> Design:
    """Tight 5-point spherical 2-design on S^3 (columns of [c1; s1; c2; s2])."""
    k = np.arange(1, 6)
    z1 = np.exp(2j * np.pi * k / 5) / math.sqrt(2)
    z2 = np.exp(4j * np.pi * k / 5) / math.sqrt(2)
    pts = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=1)
    return Design("s3", pts)


def binary_tetrahedral_design() -> Design:
    """The 24 unit quaternions of the binary tetrahedral group (24-cell vertices).

    An antipodal spherical 5-design on S^3; its image in SO(3) is the
    12-element tetrahedral rotation group.
    """
    pts = [s * e for e in np.eye(4) for s in (1.0, -1.0)]
    pts += [np.array(signs) / 2 for signs in itertools.product((1.0, -1.0), repeat=4)]
    return Design("s3", np.array(pts))


def icosahedron_design() -> Design:
    """The 12 icosahedron vertices: an equal-weight spherical 5-design on S^2."""
    g = (1 + math.sqrt(5)) / 2
    pts = []
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        pts += [(0, a, b * g), (a, b * g, 0), (b * g, 0, a)]
    pts = np.array(pts, dtype=float)
    return Design("s2", pts / np.linalg.norm(pts, axis=1)[:, None])


def tdesign_lower_bound_s3(t: int) -> int:
    """Delsarte-type lower bound on the size of a spherical t-design on S^3."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    e = t // 2
    if t % 2:
        return 2 * math.comb(e + 3, 3)
    return math.comb(e + 3, 3) + math.comb(e + 2, 3)


# -- interval designs and the S^3 composition ---------------------------------


def interval_moment(weight_exponent: int, r: int) -> float:
    """Normalized r-th moment of w_i(x) = (1 - x^2)^((2 - i) / 2) on [-1, 1]."""
    if weight_exponent not in (1, 2):
        raise DomainError("weight exponent must be 1 or 2")
    if r % 2:
        return 0.0
    a = (2 - weight_exponent) / 2
    k = r // 2
    return math.exp(
        math.lgamma(k + 0.5) + math.lgamma(a + 1.5) - math.lgamma(0.5) - math.lgamma(k + a + 1.5)
    )


@dataclass(frozen=True)
class IntervalDesign:
    nodes: np.ndarray
    weight_exponent: int
    strength: int

    def moment_residual(self) -> float:
        x = np.asarray(self.nodes)
        return max(
            (abs(np.mean(x**r) - interval_moment(self.weight_exponent, r)) for r in range(1, self.strength + 1)),
            default=0.0,
        )


def _newton_moments(x, targets, iters=200, tol=1e-13):
    t = len(targets)
    powers = np.arange(1, t + 1)

    def resid(z):
        return np.mean(z[None, :] ** powers[:, None], axis=1) - targets

    r = resid(x)
    for _ in range(iters):
        if np.abs(r).max() < tol:
            break
        jac = powers[:, None] * x[None, :] ** (powers[:, None] - 1) / len(x)
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            xn = x + lam * step
            if np.abs(xn).max() <= 1.0:
                rn = resid(xn)
                if np.linalg.norm(rn) < np.linalg.norm(r):
                    x, r = xn, rn
                    break
            lam *= 0.5
        else:
            break
    return x, np.abs(r).max()


def interval_t_design(weight_exponent: int, t: int, n: int, seed: int = 0, restarts: int = 50) -> IntervalDesign:
    """Equal-weight interval t-design of n distinct nodes for weight w_i.

    Damped Gauss-Newton on the moment equations from Chebyshev nodes, then
    random restarts.
    """
    if weight_exponent not in (1, 2):
        raise DomainError("weight exponent must be 1 or 2")
    if t < 0 or n < 1:
        raise DomainError("need t >= 0 and n >= 1")
    targets = np.array([interval_moment(weight_exponent, r) for r in range(1, t + 1)])
    rng = np.random.default_rng(seed)
    x0 = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))
    best = np.inf
    for attempt in range(restarts + 1):
        x, res = _newton_moments(x0, targets) if t else (x0, 0.0)
        xs = np.sort(x)
        distinct = n == 1 or np.diff(xs).min() > 1e-8
        if res <= 1e-10 and distinct:
            return IntervalDesign(xs, weight_exponent, t)
        best = min(best, res)
        x0 = np.sort(rng.uniform(-1, 1, n))
    raise ConstructionError(f"interval {t}-design with {n} nodes not found", residual=best)


def bajnok_s3_design(c1: IntervalDesign, c2: IntervalDesign, circle_points: int = 3) -> Design:
    """Compose two interval designs and a regular polygon into a design on S^3."""
    if c1.weight_exponent != 1 or c2.weight_exponent != 2:
        raise PreconditionError("need c1 for w_1(x) = sqrt(1 - x^2) and c2 for w_2(x) = 1")
    if circle_points < 3:
        raise DomainError("need at least 3 circle points")
    pts = []
    ang = 2 * np.pi * np.arange(1, circle_points + 1) / circle_points
    for a in c1.nodes:
        ra = math.sqrt(max(0.0, 1 - a * a))
        for b in c2.nodes:
            rb = math.sqrt(max(0.0, 1 - b * b))
            for phi in ang:
                pts.append((a, b * ra, math.cos(phi) * ra * rb, math.sin(phi) * ra * rb))
    return Design("s3", np.array(pts))


# -- SU(2) -> SO(3) ------------------------------------------------------------


def su2_to_so3(q) -> np.ndarray:
    """Covering map p for unit quaternions (x, y, u, v); returns (n, 3, 3)."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    x, y, u, v = q.T
    r = np.empty((len(q), 3, 3))
    r[:, 0, 0] = x * x + y * y - u * u - v * v
    r[:, 0, 1] = 2 * (y * v + x * u)
    r[:, 0, 2] = -2 * (x * v - y * u)
    r[:, 1, 0] = -2 * (x * u - y * v)
    r[:, 1, 1] = x * x - y * y - u * u + v * v
    r[:, 1, 2] = 2 * (x * y + u * v)
    r[:, 2, 0] = 2 * (x * v + y * u)
    r[:, 2, 1] = -2 * (x * y - u * v)
    r[:, 2, 2] = x * x - y * y + u * u - v * v
    return r


def project_su2_to_so3(design: Design, dedup_tol: float = 1e-8) -> Design:
    if design.manifold != "s3":
        raise ManifoldMismatchError("projection needs a design on s3")
    euler = matrix_to_euler(su2_to_so3(design.points))
    return merge_duplicates(Design("so3", euler, design.weights), dedup_tol)


# -- grids ----------------------------------------------------------------------


def _polar_grid(n: int, convention: str) -> np.ndarray:
    if convention not in BETA_CONVENTIONS:
        raise DomainError(f"unknown grid convention {convention!r}; use one of {BETA_CONVENTIONS}")
    j = np.arange(n)
    if convention == "endpoints":
        return j * np.pi / (n - 1) if n > 1 else np.array([np.pi / 2])
    if convention == "midpoint":
        return (j + 0.5) * np.pi / n
    return j * np.pi / n


def euler_grid(n_alpha: int, n_beta: int, n_gamma: int, beta_convention: str = DEFAULT_GRID_CONVENTION) -> Design:
    if min(n_alpha, n_beta, n_gamma) < 1:
        raise DomainError("grid counts must be >= 1")
    alpha = TWO_PI * np.arange(n_alpha) / n_alpha
    gamma = TWO_PI * np.arange(n_gamma) / n_gamma
    beta = _polar_grid(n_beta, beta_convention)
    pts = np.array(list(itertools.product(alpha, beta, gamma)))
    return Design("so3", pts)


def sphere2_grid(n_theta: int, n_phi: int, theta_convention: str = DEFAULT_GRID_CONVENTION) -> Design:
    if min(n_theta, n_phi) < 1:
        raise DomainError("grid counts must be >= 1")
    theta = _polar_grid(n_theta, theta_convention)
    phi = TWO_PI * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return Design("s2", sphere_point(tt.ravel(), pp.ravel()))


def product_design(d1: Design, d2: Design) -> Design:
    if (d1.manifold, d2.manifold) != ("s2", "so3"):
        raise ManifoldMismatchError(f"no catalog product {d1.manifold} x {d2.manifold}")
    n1, n2 = len(d1), len(d2)
    pts = np.hstack([np.repeat(d1.points, n2, axis=0), np.tile(d2.points, (n1, 1))])
    w = np.outer(d1.weights, d2.weights).ravel()
    return Design("s2xso3", pts, w / w.sum())


def haar_sample(manifold: str, count: int, seed: int = 0, torus_dim: int = 2) -> Design:
    """Equal-weight i.i.d. Haar sample; deterministic for a given seed."""
    if count < 1:
        raise DomainError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if manifold == "circle":
        return Design("circle", 1.0 - rng.random((count, 1)))
    if manifold == "torus":
        return Design("torus", 1.0 - rng.random((count, torus_dim)))
    if manifold in ("s2", "s3"):
        g = rng.standard_normal((count, point_dim(manifold)))
        return Design(manifold, g / np.linalg.norm(g, axis=1)[:, None])
    if manifold == "so3":
        q = haar_sample("s3", count, seed).points
        return Design("so3", matrix_to_euler(su2_to_so3(q)))
    if manifold == "s2xso3":
        a = rng.standard_normal((count, 3))
        a /= np.linalg.norm(a, axis=1)[:, None]
        q = rng.standard_normal((count, 4))
        q /= np.linalg.norm(q, axis=1)[:, None]
        return Design("s2xso3", np.hstack([a, matrix_to_euler(su2_to_so3(q))]))
    raise DomainError(f"unknown manifold {manifold!r}")


# -- file I/O ----------------------------------------------------------------------


def _read_rows(path) -> list[tuple[int, list[float]]]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                rows.append((lineno, [float(p) for p in parts]))
            except ValueError:
                raise DesignParseError(f"cannot parse {line.strip()!r}", line=lineno) from None
    return rows


def load_point_file(path, dim: int | None = None, unit_tol: float = 1e-6) -> Design:
    """Equal-weight design on S^2 (dim 3) or S^3 (dim 4) from a point-per-line file.

    Rows within ``unit_tol`` of unit length are renormalized; others are
    rejected.
    """
    rows = _read_rows(path)
    if not rows:
        raise DesignDataError(f"{path}: no points")
    if dim is None:
        dim = len(rows[0][1])
    if dim not in (3, 4):
        raise DomainError("dim must be 3 or 4")
    pts = np.empty((len(rows), dim))
    for i, (lineno, vals) in enumerate(rows):
        if len(vals) != dim:
            raise DesignParseError(f"expected {dim} values, got {len(vals)}", line=lineno)
        v = np.array(vals)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > unit_tol:
            raise DesignDataError(f"{path}: line {lineno} has norm {nrm:.8f}, not unit")
        pts[i] = v if abs(nrm - 1.0) <= UNIT_TOL else v / nrm
    return Design("s2" if dim == 3 else "s3", pts)


def load_design(path, manifold: str | None = None, unit_tol: float = 1e-6) -> Design:
    """Load a JSON design or a text point file (``manifold`` picks the chart)."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            data = json.load(fh)
        try:
            d = Design(data["manifold"], np.array(data["points"], dtype=float), data.get("weights"))
        except KeyError as exc:
            raise DesignDataError(f"{path}: missing key {exc}") from None
        if manifold is not None and d.manifold != manifold:
            raise ManifoldMismatchError(f"{path} holds a {d.manifold} design, expected {manifold}")
        return d
    if manifold in (None, "s2", "s3"):
        d = load_point_file(path, None if manifold is None else point_dim(manifold), unit_tol)
        return d
    rows = _read_rows(path)
    if not rows:
        raise DesignDataError(f"{path}: no points")
    width = {len(v) for _, v in rows}
    if len(width) != 1:
        raise DesignParseError("rows have differing lengths", line=rows[0][0])
    pts = np.array([v for _, v in rows])
    if manifold == "so3":
        pts = canonical_euler(pts)
    return Design(manifold, pts)


def format_points(points) -> str:
    return "".join(" ".join(format(float(x), ".17g") for x in row) + "\n" for row in np.atleast_2d(points))


def save_point_file(design: Design, path) -> None:
    """Write one point per line with 17 significant digits (equal weights only)."""
    if not design.is_equal_weight:
        raise PreconditionError("text format holds equal-weight designs only; use JSON")
    with open(path, "w", newline="\n") as fh:
        fh.write(format_points(design.points))


def design_to_json(design: Design) -> dict:
    return {
        "manifold": design.manifold,
        "points": design.points.tolist(),
        "weights": design.weights.tolist(),
    }


def save_design(design: Design, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "text")
    if fmt == "json":
        with open(path, "w", newline="\n") as fh:
            json.dump(design_to_json(design), fh, indent=1)
            fh.write("\n")
    else:
        save_point_file(design, path)
