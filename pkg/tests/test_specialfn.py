import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liedesign.errors import DomainError
from liedesign.specialfn import assoc_legendre, binom, gegenbauer, jacobi, log_binom

from oracles import gegenbauer_explicit, jacobi_explicit

xs = st.floats(-1, 1)


def test_jacobi_examples():
    assert jacobi(0, 0.3, 2.5, 0.1) == 1
    assert jacobi(1, 0, 0, 0.5) == pytest.approx(0.5)
    assert jacobi(2, 1, 1, 1.0) == pytest.approx(3.0)


@given(st.integers(0, 6), st.integers(0, 4), st.integers(0, 4), xs)
def test_jacobi_vs_explicit(k, a, b, x):
    assert jacobi(k, a, b, x) == pytest.approx(jacobi_explicit(k, a, b, x), abs=1e-10, rel=1e-10)


def test_jacobi_orthogonality():
    # x = cos(theta) makes half-integer weights smooth for Gauss-Legendre
    t, wts = np.polynomial.legendre.leggauss(64)
    theta = 0.5 * np.pi * (t + 1)
    x = np.cos(theta)
    for a, b in [(0, 0), (1, 2), (0.5, 0.5), (2, 0), (0.5, 1.5)]:
        weight = (1 - x) ** a * (1 + x) ** b * np.sin(theta) * 0.5 * np.pi
        for j in range(9):
            for k in range(j):
                val = np.sum(wts * weight * jacobi(j, a, b, x) * jacobi(k, a, b, x))
                assert abs(val) < 1e-8


def test_gegenbauer_examples():
    assert gegenbauer(0, 1.5, 0.2) == 1
    assert gegenbauer(1, 1, 0.3) == pytest.approx(0.6)
    assert gegenbauer(2, 1, 0.5) == pytest.approx(0.0, abs=1e-15)


@given(st.integers(0, 6), st.floats(0.1, 4), xs)
def test_gegenbauer_vs_explicit_and_jacobi(n, lam, x):
    g = gegenbauer(n, lam, x)
    assert g == pytest.approx(gegenbauer_explicit(n, lam, x), abs=1e-9, rel=1e-9)
    # C_n^lam = [(2 lam)_n / (lam + 1/2)_n] P_n^{(lam-1/2, lam-1/2)}
    ratio = math.exp(
        math.lgamma(2 * lam + n) - math.lgamma(2 * lam) - math.lgamma(lam + 0.5 + n) + math.lgamma(lam + 0.5)
    )
    assert g == pytest.approx(ratio * jacobi(n, lam - 0.5, lam - 0.5, x), abs=1e-9, rel=1e-9)


def test_assoc_legendre_examples():
    assert assoc_legendre(0, 0, 0.3) == 1
    assert assoc_legendre(1, 0, 0.4) == pytest.approx(0.4)
    assert assoc_legendre(2, 1, 0.0) == pytest.approx(0.0)
    x = 0.35
    assert assoc_legendre(2, 1, x) == pytest.approx(-3 * x * math.sqrt(1 - x * x))
    assert assoc_legendre(1, 1, x) == pytest.approx(-math.sqrt(1 - x * x))  # Condon-Shortley sign


def test_domain_errors():
    for bad in (lambda: jacobi(-1, 0, 0, 0), lambda: jacobi(1, -1, 0, 0), lambda: jacobi(1, 0, 0, 1.5),
                lambda: gegenbauer(1, -0.5, 0), lambda: assoc_legendre(1, 2, 0)):
        with pytest.raises(DomainError):
            bad()


def test_binomials():
    assert binom(5, 2) == pytest.approx(10)
    assert binom(3, 5) == 0
    assert math.exp(log_binom(40, 20)) == pytest.approx(math.comb(40, 20), rel=1e-12)


def test_vectorized():
    x = np.linspace(-1, 1, 7)
    assert jacobi(3, 1, 2, x).shape == (7,)
    assert np.allclose(jacobi(3, 1, 2, x), [jacobi(3, 1, 2, v) for v in x])
