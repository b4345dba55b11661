"""Efficient apportionment of approximate designs to sample size n."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .designs import Design
from .errors import DomainError, InfeasibleDesignError


@dataclass(frozen=True)
class Apportionment:
    counts: tuple
    n: int

    def efficiency_bound(self, weights) -> float:
        """``min_i n_i / (n w_i)``, the quantity efficient rounding maximizes."""
        w = np.asarray(weights, dtype=float)
        return float(np.min(np.asarray(self.counts) / (self.n * w)))


def efficient_round(weights, n: int) -> Apportionment:
    """Efficient design apportionment; ties go to the lowest index."""
    w = np.asarray(weights, dtype=float).ravel()
    m = len(w)
    if m == 0 or np.any(w <= 0):
        raise DomainError("weights must be positive")
    if abs(w.sum() - 1.0) > 1e-9:
        raise DomainError(f"weights sum to {w.sum()!r}, not 1")
    if n < m:
        raise InfeasibleDesignError(f"sample size {n} below support size {m}")
    counts = [math.ceil((n - m / 2) * wi) for wi in w]
    total = sum(counts)
    while total < n:
        j = min(range(m), key=lambda i: (counts[i] / w[i], i))
        counts[j] += 1
        total += 1
    while total > n:
        j = min(range(m), key=lambda i: (-(counts[i] - 1) / w[i], i))
        counts[j] -= 1
        total -= 1
    return Apportionment(tuple(counts), n)


def round_design(d: Design, n: int) -> tuple[Design, Apportionment]:
    """Exact design with weights n_i / n on the same support."""
    app = efficient_round(d.weights, n)
    return Design(d.manifold, d.points, np.array(app.counts) / n), app
