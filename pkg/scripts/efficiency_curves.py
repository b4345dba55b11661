"""Phi_p efficiency curves of equally spaced grids against an M = I design.

Writes CSV (grid, p, efficiency) for the SO(3) grids (6,4,6), (8,5,8),
(10,6,10) with L = 1, or the S2 x SO(3) grids (4,6,6,4,6), (5,8,8,5,8),
(6,10,10,6,10) with truncation (2, 1).
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from liedesign.criteria import Criterion, CriterionEvaluator
from liedesign.designs import DEFAULT_GRID_CONVENTION, euler_grid, product_design, sphere2_grid
from liedesign.harmonics import ModelSpec


@dataclass
class CurveConfig:
    family: str = "so3"
    p_min: float = -10.0
    p_step: float = 0.05
    convention: str = DEFAULT_GRID_CONVENTION
    grids: list = field(default_factory=list)

    def __post_init__(self):
        if not self.grids:
            self.grids = {
                "so3": [(6, 4, 6), (8, 5, 8), (10, 6, 10)],
                "s2xso3": [(4, 6, 6, 4, 6), (5, 8, 8, 5, 8), (6, 10, 10, 6, 10)],
            }[self.family]

    @property
    def model(self):
        return ModelSpec("so3", 1) if self.family == "so3" else ModelSpec("s2xso3", (2, 1))

    def design(self, counts):
        if self.family == "so3":
            return euler_grid(*counts, self.convention)
        return product_design(sphere2_grid(*counts[:2], self.convention), euler_grid(*counts[2:], self.convention))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=["so3", "s2xso3"], default="so3")
    ap.add_argument("--p-min", type=float, default=-10.0)
    ap.add_argument("--p-step", type=float, default=0.05)
    ap.add_argument("--convention", default=DEFAULT_GRID_CONVENTION)
    args = ap.parse_args()
    cfg = CurveConfig(args.family, args.p_min, args.p_step, args.convention)

    ps = [-math.inf] + list(np.round(np.arange(cfg.p_min, 1.0 - 1e-9, cfg.p_step), 10))
    ref = CriterionEvaluator(None, cfg.model)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["grid", "p", "efficiency"])
    for counts in cfg.grids:
        ev = CriterionEvaluator(cfg.design(counts), cfg.model)
        for p in ps:
            c = Criterion("p", float(p))
            eff = ev.evaluate(c).value / ref.evaluate(c).value
            out.writerow(["x".join(map(str, counts)), c.param_text, format(eff, ".12g")])


if __name__ == "__main__":
    main()
