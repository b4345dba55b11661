"""Check a user-supplied numerical design on S^3 and its rounded version.

Loads e.g. sdf008.00097 (97 points), reports ||M - I|| for the d = 4 model,
the lambda-design residual per level and the Phi_Es / Phi_p efficiencies of
an efficiently rounded copy of a weighted design, if one is given.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from liedesign.criteria import Criterion, CriterionEvaluator, information_matrix, verify_lambda
from liedesign.designs import load_design, load_point_file
from liedesign.harmonics import ModelSpec
from liedesign.rounding import round_design


@dataclass(frozen=True)
class CheckConfig:
    path: str
    degree: int = 4
    weighted: str | None = None
    n: int = 97


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path", help="point file with one unit 4-vector per line")
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--weighted", help="JSON design with unequal weights to round")
    ap.add_argument("--n", type=int, default=97)
    cfg = CheckConfig(**vars(ap.parse_args()))

    model = ModelSpec("s3", cfg.degree)
    d = load_point_file(cfg.path, 4)
    err = np.abs(information_matrix(d, model) - np.eye(model.dimension)).max()
    print(f"{len(d)} points, D = {model.dimension}, ||M - I||_max = {err:.3e}")
    rep = verify_lambda(d, ModelSpec("s3", 2 * cfg.degree))
    for level, res in rep.level_residuals.items():
        print(f"  level {level}: residual {res:.2e}")
    if cfg.weighted:
        exact, app = round_design(load_design(cfg.weighted, "s3"), cfg.n)
        ev, ref = CriterionEvaluator(exact, model), CriterionEvaluator(d, model)
        for c in [Criterion("p", -1.0), Criterion("p", 0.0), Criterion("p", -math.inf)]:
            e = ev.evaluate(c)
            print(f"  rounded {c}: efficiency {e.value / ref.evaluate(c).value:.4f} feasible={e.feasible}")


if __name__ == "__main__":
    main()
