import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liedesign.criteria import (
    CG_FACTOR,
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
from liedesign.designs import (
    Design,
    binary_tetrahedral_design,
    circle_design,
    euler_grid,
    haar_sample,
    mimura_tight_2design,
    project_su2_to_so3,
)
from liedesign.errors import DomainError, InfeasibleDesignError, ManifoldMismatchError, PreconditionError
from liedesign.harmonics import ModelSpec

from oracles import eigh_values, kiefer_mean, pinv_lapack

SO3 = ModelSpec("so3", 1)
TETRA = project_su2_to_so3(binary_tetrahedral_design())

# frozen from the oracle route (numpy eigh on M, explicit C_K); endpoints beta grid
FROZEN_SO3_GRID = {
    (6, 4, 6): (0.5625, 0.838469256127275),
    (8, 5, 8): (0.6, 0.8653846153846151),
}


def test_information_matrix_basics():
    for n in range(1, 5):
        m = information_matrix(circle_design(2 * n + 1), ModelSpec("circle", n))
        assert np.abs(m - np.eye(2 * n + 1)).max() < 1e-12
    one = Design("s3", [[0, 1, 0, 0]])
    m = information_matrix(one, ModelSpec("s3", 2))
    assert np.linalg.matrix_rank(m) == 1 and np.trace(m).real == pytest.approx(14)
    with pytest.raises(ManifoldMismatchError):
        information_matrix(one, SO3)


@given(st.sampled_from(["s2", "s3", "so3", "s2xso3"]), st.integers(1, 30), st.integers(0, 10**6))
def test_trace_identity_random_designs(manifold, n, seed):
    model = {"s2": ModelSpec("s2", 3), "s3": ModelSpec("s3", 3), "so3": ModelSpec("so3", 2),
             "s2xso3": ModelSpec("s2xso3", (1, 1))}[manifold]
    d = haar_sample(manifold, n, seed)
    w = np.random.default_rng(seed).random(n) + 0.1
    d = Design(manifold, d.points, w / w.sum())
    m = information_matrix(d, model)
    assert abs(np.trace(m) - model.dimension) < 1e-9
    assert np.abs(m - m.conj().T).max() < 1e-13
    assert eigh_values(m).min() > -1e-10


def test_selection_set():
    model = ModelSpec("s3", 2)
    sel = SelectionSet(model, (0, 2))
    k = sel.matrix()
    assert sel.s == 10 and np.array_equal(k.T @ k, np.eye(10))
    assert list(sel.indices) == [0] + list(range(5, 14))
    for bad in [(), (1, 1), (2, 1), (3,)]:
        with pytest.raises(DomainError):
            SelectionSet(model, bad)


def test_c_matrix_examples():
    model = ModelSpec("s3", 2)
    sel = SelectionSet(model, (1,))
    assert np.allclose(c_matrix(np.eye(14), sel), np.eye(4))
    assert np.allclose(c_matrix(2 * np.eye(14), SelectionSet.full(model)), 2 * np.eye(14))


@given(st.integers(0, 10**6))
def test_c_matrix_against_dense_oracle(seed):
    model = ModelSpec("so3", 1)
    d = haar_sample("so3", 14, seed)
    m = information_matrix(d, model)
    sel = SelectionSet(model, (1,))
    k = sel.matrix()
    oracle = np.linalg.inv(k.T @ pinv_lapack(m) @ k)
    assert np.abs(c_matrix(m, sel) - oracle).max() < 1e-8 * np.abs(oracle).max()


def test_c_matrix_rank_deficient_but_feasible():
    # point mass on a few rows of M, chosen to contain levels 0..2 of s3 d=4
    model = ModelSpec("s3", 4)
    sel = SelectionSet(model, (0, 1, 2))
    low = information_matrix(haar_sample("s3", 20, 1), ModelSpec("s3", 2))
    m = np.zeros((55, 55), complex)
    m[:14, :14] = low
    assert np.linalg.matrix_rank(m) == 14
    c = c_matrix(m, sel)
    assert c.shape == (14, 14)
    assert np.allclose(c, low, atol=1e-9)
    with pytest.raises(InfeasibleDesignError):
        c_matrix(m, SelectionSet(model, (0, 3)))


def test_phi_p_optimal_values():
    for model, d in [(SO3, TETRA), (ModelSpec("circle", 2), circle_design(5))]:
        D = model.dimension
        assert phi_p(d, model, None, -1) == pytest.approx(1 / D)
        assert phi_p(d, model, None, -math.inf) == pytest.approx(1)
        assert phi_p(d, model, None, 0) == pytest.approx(1)
        assert phi_p(d, model, None, 0.5) == pytest.approx(D**2)
        for s in (1, 3, D):
            assert phi_Es(d, model, s) == pytest.approx(s)


def test_phi_Es():
    g = euler_grid(2, 2, 3)
    assert phi_Es(g, SO3, 1) <= 1e-8
    assert phi_Es(g, SO3, 10) == pytest.approx(10)
    with pytest.raises(DomainError):
        phi_Es(g, SO3, 11)
    with pytest.raises(InfeasibleDesignError):
        phi_p(g, SO3, None, -1)


@pytest.mark.parametrize("counts", sorted(FROZEN_SO3_GRID))
def test_frozen_grid_efficiencies(counts):
    g = euler_grid(*counts)
    emin, em1 = FROZEN_SO3_GRID[counts]
    assert efficiency(g, None, SO3, None, "p=-inf").value == pytest.approx(emin, abs=1e-12)
    assert efficiency(g, TETRA, SO3, None, "p=-1").value == pytest.approx(em1, abs=1e-12)
    # same numbers through LAPACK and the textbook Kiefer mean
    w = 1 / eigh_values(pinv_lapack(information_matrix(g, SO3)))
    assert kiefer_mean(w, -1) * 10 == pytest.approx(em1, abs=1e-10)


def test_efficiency_flags():
    g = euler_grid(2, 2, 3)
    assert efficiency(g, None, SO3, None, "p=-1") == (0.0, False)
    with pytest.raises(InfeasibleDesignError):
        efficiency(TETRA, g, SO3, None, "p=-1")
    assert efficiency(TETRA, TETRA, SO3, None, Criterion("p", -2)).value == pytest.approx(1)


def test_criterion_parse():
    assert Criterion.parse("p=-inf") == Criterion("p", -math.inf)
    assert str(Criterion.parse("Es=3")) == "Es=3"
    assert str(Criterion.parse("p=-0.25")) == "p=-0.25"
    for bad in ("p=1", "Es=0", "q=1", "p"):
        with pytest.raises(DomainError):
            Criterion.parse(bad)


def test_scale_covariance():
    grids = [euler_grid(*c) for c in [(6, 4, 6), (8, 5, 8), (10, 6, 10), (5, 5, 5)]]
    for p in (-3, -1, 0, 0.5, -math.inf):
        vals = [CriterionEvaluator(g, SO3).evaluate(Criterion("p", p)).value for g in grids]
        scaled = []
        for g in grids:
            ev = CriterionEvaluator(g, SO3)
            ev.m = 3.7 * ev.m
            scaled.append(ev.evaluate(Criterion("p", p)).value)
        assert np.argmax(vals) == np.argmax(scaled)
        assert np.allclose(np.array(scaled) / np.array(vals), 3.7)


@pytest.mark.parametrize("p", [-5, -1, 0, 0.5, -math.inf])
def test_certificates_at_haar_design(p):
    for sel in (None, SelectionSet(SO3, (1,))):
        rep = equivalence_certificate(TETRA, SO3, sel, p)
        assert abs(rep.max_violation) <= 1e-8
    es = es_certificate(TETRA, SO3, SelectionSet(SO3, (1,)))
    assert abs(es.max_violation) <= 1e-9 and es.lhs_max == pytest.approx(9)
    full = es_certificate(euler_grid(6, 4, 6), SO3, None)
    assert full.lhs_max == pytest.approx(10)


def test_certificate_failures():
    one = Design("so3", [[0.1, 0.2, 0.3]])
    with pytest.raises(InfeasibleDesignError):
        equivalence_certificate(one, SO3, None, 0)
    g = euler_grid(6, 4, 6)
    assert equivalence_certificate(g, SO3, None, -1).max_violation > 1e-3
    assert es_certificate(g, SO3, SelectionSet(SO3, (1,))).max_violation > 1e-3
    assert es_certificate(euler_grid(2, 2, 3), SO3, SelectionSet(SO3, (1,))).max_violation > 1e-3
    with pytest.raises(DomainError):
        equivalence_certificate(g, SO3, None, 1)


def test_verify_lambda():
    for n in range(1, 6):
        assert verify_lambda(circle_design(2 * n + 1), ModelSpec("circle", n)).max_residual <= 1e-12
    m = mimura_tight_2design()
    assert verify_lambda(m, ModelSpec("s3", 1), 2).passed
    assert not verify_lambda(m, ModelSpec("s3", 1), 3).passed
    assert set(verify_lambda(m, ModelSpec("s3", 3)).level_residuals) == {1, 2, 3}
    with pytest.raises(PreconditionError):
        verify_lambda(Design("s3", m.points, [0.3, 0.2, 0.2, 0.2, 0.1]), ModelSpec("s3", 1))


def test_lambda_design_gives_identity():
    # strength 2d via Clebsch-Gordan implies M = I at truncation d
    for design, manifold, strength in [
        (mimura_tight_2design(), "s3", 2),
        (binary_tetrahedral_design(), "s3", 5),
        (circle_design(9), "circle", 8),
    ]:
        model = ModelSpec(manifold, strength)
        assert verify_lambda(design, model).passed
        half = ModelSpec(manifold, strength // 2)
        assert np.abs(information_matrix(design, half) - np.eye(half.dimension)).max() <= 1e-8


def test_required_strength():
    r = required_strength(ModelSpec("s3", 1))
    assert (r.level, r.eigenvalue, r.loose_level) == (5, 35, 5)
    assert r.threshold == pytest.approx(CG_FACTOR * 3) and r.loose_threshold == 42
    assert required_strength(ModelSpec("s3", 1), "clebschGordan").level == 2
    assert required_strength(ModelSpec("s3", 4), "clebschGordan").level == 8
    assert required_strength(ModelSpec("s3", 4)).level == 17
    so3 = required_strength(ModelSpec("so3", 1), "clebschGordan")
    assert (so3.level, so3.cover_level) == (2, 4)
    assert required_strength(ModelSpec("circle", 2), "clebschGordan").level == 4
    assert required_strength(ModelSpec("circle", 1)).level == 3  # 9 <= 8+4 sqrt 2 < 16
    assert required_strength(ModelSpec("torus", (1, 1)), "clebschGordan").level == (2, 2)
    assert required_strength(ModelSpec("torus", (1, 1))).level == 26  # |k|^2 <= 27.3, 26 = 1 + 25
    assert required_strength(ModelSpec("s2xso3", (2, 1)), "clebschGordan").level == (4, 2)
    assert required_strength(ModelSpec("s2xso3", (2, 1))).level == (8, 5)  # 72 <= 81.9 < 90; 35 <= 41 < 48
    assert CG_FACTOR < 14
    with pytest.raises(DomainError):
        required_strength(SO3, "other")


def test_caratheodory():
    assert caratheodory_bounds(10, 10) == (10, 55)
    for d in range(5):
        D = (d + 1) ** 2
        assert caratheodory_bounds(D, D) == (D, ((d + 1) ** 4 + (d + 1) ** 2) // 2)
    assert caratheodory_bounds(1, 1) == (1, 1)
    assert caratheodory_bounds(10, 3) == (3, 6 + 21)
    with pytest.raises(DomainError):
        caratheodory_bounds(3, 4)
