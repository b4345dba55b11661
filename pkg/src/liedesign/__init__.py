"""Optimal exact designs for harmonic regression on compact groups and spheres."""

from .criteria import (
    Criterion,
    CriterionEvaluator,
    SelectionSet,
    c_matrix,
    caratheodory_bounds,
    efficiency,
    equivalence_certificate,
    es_certificate,
    information_matrix,
    phi_Es,
    phi_p,
    required_strength,
    verify_lambda,
)
from .designs import (
    Design,
    bajnok_s3_design,
    binary_tetrahedral_design,
    circle_design,
    euler_grid,
    haar_sample,
    icosahedron_design,
    interval_t_design,
    load_design,
    load_point_file,
    merge_duplicates,
    mimura_tight_2design,
    product_design,
    project_su2_to_so3,
    save_design,
    sphere2_grid,
    torus_grid,
)
from .harmonics import ModelSpec, basis_matrix, basis_vector
from .rounding import efficient_round

__version__ = "0.1.0"
