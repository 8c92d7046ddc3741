import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sieveclass.basis import (BasisFamily, SieveBasis, basis_norms, evaluate_basis,
                              gram_matrix, legendre_values)
from sieveclass.errors import ArgumentError, DomainError

LEG = BasisFamily.LEGENDRE
TRIG = BasisFamily.TRIGONOMETRIC


def test_constant_first_function():
    assert evaluate_basis(SieveBasis(LEG, 1), 0.7) == pytest.approx([1.0])


def test_legendre_degree_one_at_right_endpoint():
    # sqrt(3) * (2t - 1) at t = 1
    assert evaluate_basis(SieveBasis(LEG, 2), 1.0) == pytest.approx([1.0, math.sqrt(3)], abs=1e-14)


def test_trigonometric_quarter_point():
    vals = evaluate_basis(SieveBasis(TRIG, 3), 0.25)
    assert vals == pytest.approx([1.0, 0.0, math.sqrt(2)], abs=1e-14)


def test_trigonometric_ordering_with_even_c():
    t = 0.1
    vals = evaluate_basis(SieveBasis(TRIG, 4), t)
    expected = [1.0, math.sqrt(2) * math.cos(2 * math.pi * t),
                math.sqrt(2) * math.sin(2 * math.pi * t), math.sqrt(2) * math.cos(4 * math.pi * t)]
    assert vals == pytest.approx(expected, abs=1e-14)


def test_vectorized_shape():
    assert evaluate_basis(SieveBasis(LEG, 5), np.linspace(0, 1, 7)).shape == (7, 5)


@pytest.mark.parametrize("t", [-0.01, 1.0001, float("nan")])
def test_outside_domain(t):
    with pytest.raises(DomainError):
        evaluate_basis(SieveBasis(LEG, 2), t)


def test_zero_size_rejected():
    with pytest.raises(ArgumentError):
        SieveBasis(LEG, 0)


def test_norms_trigonometric():
    xi, zeta = basis_norms(SieveBasis(TRIG, 3), 1001)
    assert xi == pytest.approx(math.sqrt(2), abs=1e-12)
    # at t = 0: 1 + 2 cos^2 = 3
    assert zeta == pytest.approx(math.sqrt(3), abs=1e-12)


def test_norms_single_constant():
    assert basis_norms(SieveBasis(LEG, 1), 11) == pytest.approx((1.0, 1.0))


def test_norms_legendre_four():
    xi, zeta = basis_norms(SieveBasis(LEG, 4), 2001)
    assert xi == pytest.approx(math.sqrt(7), abs=1e-12)
    # endpoints: sum_{l<=4} (2l - 1) = 16
    assert zeta == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("family", list(BasisFamily))
@pytest.mark.parametrize("c", [1, 2, 5, 8, 12])
def test_orthonormal(family, c):
    gram = gram_matrix(SieveBasis(family, c), 10001)
    assert np.max(np.abs(gram - np.eye(c))) <= 1e-3


@pytest.mark.parametrize("family", list(BasisFamily))
def test_norms_monotone_in_c(family):
    norms = [basis_norms(SieveBasis(family, c), 501) for c in range(1, 15)]
    xis, zetas = zip(*norms)
    assert all(np.diff(xis) >= -1e-12)
    assert all(np.diff(zetas) >= -1e-12)


def test_recurrence_matches_explicit_polynomials():
    x = np.linspace(-1, 1, 101)
    explicit = np.column_stack([np.ones_like(x), x, (3 * x**2 - 1) / 2, (5 * x**3 - 3 * x) / 2])
    assert np.max(np.abs(legendre_values(x, 3) - explicit)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(list(BasisFamily)), st.integers(1, 20),
       st.floats(0.0, 1.0, allow_nan=False))
def test_values_finite(family, c, t):
    vals = evaluate_basis(SieveBasis(family, c), t)
    assert vals.shape == (c,)
    assert np.all(np.isfinite(vals))
