"""Pick the polar-angle grid convention for equally spaced Euler/sphere grids.

For every convention, prints the Phi_-inf / Phi_-1 efficiencies of the SO(3)
(6,4,6) grid and the S2 x SO(3) (4,6,6,4,6) grid against an M = I design, and
the convention whose values are closest to the published targets.
"""

import argparse
import math
from dataclasses import dataclass

from liedesign.criteria import Criterion, CriterionEvaluator
from liedesign.designs import BETA_CONVENTIONS, euler_grid, product_design, sphere2_grid
from liedesign.harmonics import ModelSpec


@dataclass(frozen=True)
class Target:
    name: str
    counts: tuple
    emin: float
    em1: float


TARGETS = (
    Target("so3 L=1", (6, 4, 6), 0.667, 0.907),
    Target("s2xso3 (2,1)", (4, 6, 6, 4, 6), 0.295, 0.582),
)


def grid(counts, conv):
    if len(counts) == 3:
        return euler_grid(*counts, conv), ModelSpec("so3", 1)
    return product_design(sphere2_grid(*counts[:2], conv), euler_grid(*counts[2:], conv)), ModelSpec("s2xso3", (2, 1))


def efficiencies(counts, conv):
    d, model = grid(counts, conv)
    ev, ref = CriterionEvaluator(d, model), CriterionEvaluator(None, model)
    out = []
    for p in (-math.inf, -1.0):
        c = Criterion("p", p)
        out.append(ev.evaluate(c).value / ref.evaluate(c).value)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.parse_args()
    scores = {}
    print(f"{'convention':<11} {'target':<14} {'eff -inf':>9} {'eff -1':>8}   published")
    for conv in BETA_CONVENTIONS:
        err = []
        for t in TARGETS:
            emin, em1 = efficiencies(t.counts, conv)
            err.append(max(abs(emin - t.emin), abs(em1 - t.em1)))
            print(f"{conv:<11} {t.name:<14} {emin:9.4f} {em1:8.4f}   {t.emin:.3f} / {t.em1:.3f}")
        scores[conv] = err
    for i, t in enumerate(TARGETS):
        best = min(scores, key=lambda c: scores[c][i])
        print(f"closest for {t.name}: {best} (max deviation {scores[best][i]:.4f})")


if __name__ == "__main__":
    main()
