"""Information matrices, Kiefer criteria, efficiencies and optimality checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .designs import Design, haar_sample
from .errors import DomainError, InfeasibleDesignError, ManifoldMismatchError, PreconditionError
from .harmonics import ModelSpec, basis_matrix, level_eigenvalue
from .linalg import DEFAULT_TOL, herm_eig, trace_power_from_eigenvalues

LAMBDA_TOL = 1e-8
CG_FACTOR = 8 + 4 * math.sqrt(2)
LOOSE_FACTOR = 14.0


def _check_model(d: Design, model: ModelSpec):
    if d.manifold != model.manifold:
        raise ManifoldMismatchError(f"design on {d.manifold}, model on {model.manifold}")


def information_matrix(d: Design, model: ModelSpec) -> np.ndarray:
    """``M = sum_i w_i phi(g_i) phi(g_i)^*``."""
    _check_model(d, model)
    b = basis_matrix(model, d.points)
    m = (b.T * d.weights) @ b.conj()
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class SelectionSet:
    """Complete eigen-levels whose coefficients are of interest.

    ``levels`` are positions in ``model.levels``. ``K`` is only materialized
    by :meth:`matrix`; the criteria slice by :attr:`indices` instead.
    """

    model: ModelSpec
    levels: tuple

    def __post_init__(self):
        lv = tuple(int(x) for x in self.levels)
        if not lv:
            raise DomainError("selection needs at least one level")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise DomainError("selection levels must be strictly increasing")
        if lv[0] < 0 or lv[-1] >= self.model.n_levels:
            raise DomainError(f"selection levels must lie in 0..{self.model.n_levels - 1}")
        object.__setattr__(self, "levels", lv)

    @classmethod
    def full(cls, model: ModelSpec) -> "SelectionSet":
        return cls(model, tuple(range(model.n_levels)))

    @cached_property
    def indices(self) -> np.ndarray:
        return self.model.level_indices(self.levels)

    @property
    def s(self) -> int:
        return len(self.indices)

    def matrix(self) -> np.ndarray:
        k = np.zeros((self.model.dimension, self.s))
        k[self.indices, np.arange(self.s)] = 1.0
        return k


def _range_projector(m: np.ndarray, tol: float):
    eig = herm_eig(m)
    w, v = eig.eigenvalues, eig.eigenvectors
    top = max(abs(w[-1]), abs(w[0])) if len(w) else 0.0
    keep = w > tol * top
    inv = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    return v[:, keep], (v * inv) @ v.conj().T


def c_matrix_and_pinv(m: np.ndarray, sel: SelectionSet, tol: float = DEFAULT_TOL):
    """``(C_K, M^+)``, raising :class:`InfeasibleDesignError` unless range(K) is in range(M)."""
    vr, mplus = _range_projector(m, tol)
    idx = sel.indices
    # residual of K's columns after projecting onto range(M)
    resid = np.eye(m.shape[0])[:, idx] - vr @ vr[idx, :].conj().T
    if np.abs(resid).max(initial=0.0) > math.sqrt(tol):
        raise InfeasibleDesignError("range(K) is not contained in range(M); selected parameters not estimable")
    inner = mplus[np.ix_(idx, idx)]
    eig = herm_eig(0.5 * (inner + inner.conj().T))
    if eig.eigenvalues[0] <= 0:
        raise InfeasibleDesignError("K* M^+ K is singular")
    c = (eig.eigenvectors / eig.eigenvalues) @ eig.eigenvectors.conj().T
    return 0.5 * (c + c.conj().T), mplus


def c_matrix(m: np.ndarray, sel: SelectionSet, tol: float = DEFAULT_TOL) -> np.ndarray:
    return c_matrix_and_pinv(m, sel, tol)[0]


def c_eigenvalues(d: Design, model: ModelSpec, sel: SelectionSet | None = None) -> np.ndarray:
    sel = sel or SelectionSet.full(model)
    c = c_matrix(information_matrix(d, model), sel)
    return herm_eig(c).eigenvalues


def phi_p(d: Design, model: ModelSpec, sel: SelectionSet | None, p: float) -> float:
    """Kiefer's criterion on ``C_K``; larger is better."""
    return trace_power_from_eigenvalues(c_eigenvalues(d, model, sel), p)


def phi_Es_from_eigenvalues(w, s: int) -> float:
    w = np.sort(np.asarray(w, dtype=float))
    if not 1 <= s <= len(w):
        raise DomainError(f"s must lie in 1..{len(w)}")
    return float(w[:s].sum())


def phi_Es(d: Design, model: ModelSpec, s: int) -> float:
    """Sum of the s smallest eigenvalues of ``M``."""
    return phi_Es_from_eigenvalues(herm_eig(information_matrix(d, model)).eigenvalues, s)


# -- criterion specs and efficiencies ------------------------------------------


@dataclass(frozen=True)
class Criterion:
    kind: str  # "p" or "Es"
    param: float

    def __post_init__(self):
        if self.kind == "p":
            if not self.param < 1:
                raise DomainError(f"p must be < 1, got {self.param}")
        elif self.kind == "Es":
            if self.param < 1 or int(self.param) != self.param:
                raise DomainError(f"s must be a positive integer, got {self.param}")
        else:
            raise DomainError(f"unknown criterion kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        """``"p=-1"``, ``"p=-inf"``, ``"Es=3"``."""
        try:
            kind, val = (t.strip() for t in text.split("="))
            return cls(kind, float(val) if kind == "p" else int(val))
        except ValueError:
            raise DomainError(f"cannot parse criterion {text!r}") from None

    @property
    def param_text(self) -> str:
        if self.kind == "Es":
            return str(int(self.param))
        return "-inf" if self.param == -math.inf else format(self.param, ".12g")

    def __str__(self):
        return f"{self.kind}={self.param_text}"


class Evaluation(NamedTuple):
    value: float
    feasible: bool


class CriterionEvaluator:
    """Caches the spectra of ``M`` and ``C_K`` so that sweeps over p or s are cheap.

    ``design=None`` stands for the Haar measure (``M = I_D``).
    """

    def __init__(self, design: Design | None, model: ModelSpec, sel: SelectionSet | None = None):
        self.model = model
        self.sel = sel or SelectionSet.full(model)
        if design is None:
            self.m = np.eye(model.dimension, dtype=complex)
        else:
            self.m = information_matrix(design, model)

    @cached_property
    def m_eigenvalues(self) -> np.ndarray:
        return herm_eig(self.m).eigenvalues

    @cached_property
    def c_eigenvalues(self) -> np.ndarray | None:
        try:
            return herm_eig(c_matrix(self.m, self.sel)).eigenvalues
        except InfeasibleDesignError:
            return None

    def evaluate(self, crit: Criterion) -> Evaluation:
        if crit.kind == "Es":
            return Evaluation(phi_Es_from_eigenvalues(self.m_eigenvalues, int(crit.param)), True)
        w = self.c_eigenvalues
        if w is None:
            return Evaluation(0.0, False)
        return Evaluation(trace_power_from_eigenvalues(w, crit.param), True)


def efficiency(d: Design, ref: Design | None, model: ModelSpec, sel: SelectionSet | None, criterion) -> Evaluation:
    """``Phi(d) / Phi(ref)``; ``ref=None`` is the Haar (M = I) reference.

    An infeasible ``d`` gives ``(0.0, False)``; an infeasible reference raises.
    """
    crit = Criterion.parse(criterion) if isinstance(criterion, str) else criterion
    den = CriterionEvaluator(ref, model, sel).evaluate(crit)
    if not den.feasible or den.value <= 0:
        raise InfeasibleDesignError(f"reference design is infeasible for {crit}")
    num = CriterionEvaluator(d, model, sel).evaluate(crit)
    return Evaluation(num.value / den.value, num.feasible)


# -- optimality certificates ----------------------------------------------------


@dataclass(frozen=True)
class CertificateReport:
    max_violation: float
    test_point_count: int
    criterion: str
    lhs_max: float
    rhs: float

    def passed(self, tol: float = LAMBDA_TOL) -> bool:
        return self.max_violation <= tol


def default_test_points(d: Design, model: ModelSpec, count: int = 512, seed: int = 0) -> np.ndarray:
    """``count`` Haar samples plus the design's own points."""
    torus_dim = len(model.truncation) if model.manifold == "torus" else 2
    sample = haar_sample(model.manifold, count, seed, torus_dim=torus_dim)
    return np.vstack([sample.points, d.points])


def equivalence_certificate(
    d: Design, model: ModelSpec, sel: SelectionSet | None, p: float, test_points=None
) -> CertificateReport:
    """Check ``phi^* M^+ K C^{p+1} K^* M^+ phi <= tr C^p`` over test points.

    For ``p = -inf`` the left side is ``phi^* M^+ K C E C K^* M^+ phi`` with E
    the normalized projector on the smallest-eigenvalue space of C, and the
    right side is ``lambda_min(C)``; at ``C = I_s`` this is ``E = I_s / s``.
    """
    if not p < 1:
        raise DomainError(f"p must be < 1, got {p}")
    sel = sel or SelectionSet.full(model)
    c, mplus = c_matrix_and_pinv(information_matrix(d, model), sel)
    eig = herm_eig(c)
    w, v = eig.eigenvalues, eig.eigenvectors
    if p == -math.inf:
        near = w <= w[0] * (1 + 1e-9)
        e_vals = np.where(near, 1.0 / near.sum(), 0.0)
        middle = (v * (w * e_vals * w)) @ v.conj().T
        rhs = float(w[0])
    else:
        middle = (v * w ** (p + 1)) @ v.conj().T
        rhs = float(np.sum(w**p))
    pts = default_test_points(d, model) if test_points is None else np.atleast_2d(test_points)
    phi = basis_matrix(model, pts)
    a = phi.conj() @ mplus[:, sel.indices]  # rows: (M^+ phi)^* K restricted
    lhs = np.einsum("ij,jk,ik->i", a, middle, a.conj()).real
    return CertificateReport(float(lhs.max() - rhs), len(pts), f"p={p}", float(lhs.max()), rhs)


def es_certificate(d: Design, model: ModelSpec, sel: SelectionSet | None, test_points=None) -> CertificateReport:
    """Check ``phi^* K K^* phi <= Phi_{E_s}(d)`` with ``s = |sel|``."""
    sel = sel or SelectionSet.full(model)
    rhs = phi_Es(d, model, sel.s)
    pts = default_test_points(d, model) if test_points is None else np.atleast_2d(test_points)
    phi = basis_matrix(model, pts)[:, sel.indices]
    lhs = np.sum(np.abs(phi) ** 2, axis=1)
    return CertificateReport(float(lhs.max() - rhs), len(pts), f"Es={sel.s}", float(lhs.max()), rhs)


# -- lambda designs ----------------------------------------------------------------


@dataclass(frozen=True)
class LambdaReport:
    max_residual: float
    level_residuals: dict
    tol: float = LAMBDA_TOL

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_lambda(d: Design, model: ModelSpec, max_level=None) -> LambdaReport:
    """Max ``|mean of phi_{j,k}|`` over all non-constant basis functions up to ``max_level``.

    For integer-truncated manifolds ``max_level`` replaces the truncation;
    otherwise it is a position in ``model.levels``.
    """
    _check_model(d, model)
    if not d.is_equal_weight:
        raise PreconditionError("lambda-design check needs an equal-weight design")
    if max_level is not None and isinstance(model.truncation, int):
        model = ModelSpec(model.manifold, int(max_level))
        max_level = None
    b = basis_matrix(model, d.points)
    means = np.abs(b.mean(axis=0))
    out = {}
    for pos, key in enumerate(model.levels):
        if pos == 0 or (max_level is not None and pos > max_level):
            continue
        out[key] = float(means[model.level_of == pos].max())
    return LambdaReport(max(out.values(), default=0.0), out)


# -- strength requirements ---------------------------------------------------------


@dataclass(frozen=True)
class StrengthRequirement:
    """Level (key) whose eigenvalue bounds the required lambda-design strength."""

    mode: str
    level: object
    eigenvalue: object
    threshold: object
    loose_level: object = None
    loose_threshold: object = None
    cover_level: int | None = None


def _largest_key_below(manifold: str, threshold: float, dim: int = 1) -> int:
    """Largest level key whose eigenvalue is <= threshold (1e-12 slack)."""
    lim = threshold * (1 + 1e-12)
    if manifold in ("circle", "torus"):
        kmax = int(math.isqrt(int(lim / (2 * math.pi) ** 2) + 1)) + 1
        if manifold == "circle":
            keys = range(kmax + 1)
        else:
            squares = [k * k for k in range(kmax + 1)]
            keys = sorted({sum(c) for c in itertools.combinations_with_replacement(squares, dim)})
        return max(k for k in keys if level_eigenvalue(manifold, k) <= lim)
    k = 0
    while level_eigenvalue(manifold, k + 1) <= lim:
        k += 1
    return k


def _general(manifold, top_key, dim=1):
    lam = level_eigenvalue(manifold, top_key)
    t1, t2 = CG_FACTOR * lam, LOOSE_FACTOR * lam
    k1, k2 = _largest_key_below(manifold, t1, dim), _largest_key_below(manifold, t2, dim)
    return k1, level_eigenvalue(manifold, k1), t1, k2, t2


def required_strength(model: ModelSpec, mode: str = "general") -> StrengthRequirement:
    """Strength a lambda-design needs to be optimal for ``model``.

    ``general``: largest level with eigenvalue <= (8 + 4 sqrt 2) lambda_d, with
    the looser 14 lambda_d bound reported alongside. ``clebschGordan``: level
    doubling from the tensor-product decomposition. Products are handled per
    factor.
    """
    m, tr = model.manifold, model.truncation
    if mode == "general":
        if m == "s2xso3":
            parts = [_general("s2", tr[0]), _general("so3", tr[1])]
            return StrengthRequirement(
                mode,
                tuple(p[0] for p in parts),
                tuple(p[1] for p in parts),
                tuple(p[2] for p in parts),
                tuple(p[3] for p in parts),
                tuple(p[4] for p in parts),
            )
        if m == "torus":
            top, dim = sum(t * t for t in tr), len(tr)
        else:
            top, dim = tr, 1
        k1, lam1, t1, k2, t2 = _general(m, top, dim)
        return StrengthRequirement(mode, k1, lam1, t1, k2, t2)
    if mode == "clebschGordan":
        if m == "s2xso3":
            lv = (2 * tr[0], 2 * tr[1])
            lam = (level_eigenvalue("s2", lv[0]), level_eigenvalue("so3", lv[1]))
            return StrengthRequirement(mode, lv, lam, lam, cover_level=4 * tr[1])
        if m == "torus":
            lv = tuple(2 * t for t in tr)
            lam = level_eigenvalue("torus", sum(k * k for k in lv))
            return StrengthRequirement(mode, lv, lam, lam)
        lv = 2 * tr
        lam = level_eigenvalue(m, lv)
        return StrengthRequirement(mode, lv, lam, lam, cover_level=4 * tr if m == "so3" else None)
    raise DomainError(f"unknown mode {mode!r}; use 'general' or 'clebschGordan'")


def caratheodory_bounds(D: int, s: int) -> tuple[int, int]:
    """``s <= s* <= s(s+1)/2 + s(D - s)``."""
    if not 1 <= s <= D:
        raise DomainError(f"need 1 <= s <= D, got s={s}, D={D}")
    return s, s * (s + 1) // 2 + s * (D - s)
