import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sieveclass.arfit import fit_cv, fit_ols
from sieveclass.basis import BasisFamily, SieveBasis
from sieveclass.errors import ArgumentError
from sieveclass.features import (aggregate_feature, aggregation_range, class_median,
                                 lag_features, max_deviation, pooled_min_order)
from sieveclass.arfit import ArFit

from conftest import simulate_ar


def _fit(blocks, family=BasisFamily.LEGENDRE):
    blocks = np.asarray(blocks, float)
    b, c = blocks.shape
    return ArFit(b=b, c=c, basis=SieveBasis(family, c), beta_hat=blocks.ravel(),
                 n=100, condition_estimate=1.0)


def test_linear_legendre_deviation():
    # phi_1 = sqrt(3) * 0.1 * (2t - 1) ranges over +-0.1 sqrt(3)
    fit = _fit([[0.3, 0.1]])
    assert max_deviation(fit, 1) == pytest.approx(0.2 * np.sqrt(3), abs=1e-12)


def test_trigonometric_deviation_on_grid():
    fit = _fit([[0.0, 0.1, 0.0], [0.2, 0.0, 0.0]], BasisFamily.TRIGONOMETRIC)
    assert lag_features(fit) == pytest.approx([0.2 * np.sqrt(2), 0.0], abs=1e-12)


def test_constant_basis_gives_zero():
    fit = fit_ols(simulate_ar([0.4, 0.2], 300, 3), 2, 1)
    assert np.array_equal(lag_features(fit), [0.0, 0.0])
    assert max_deviation(fit, 2) == 0.0


def test_vectorized_matches_scalar():
    fit = fit_ols(simulate_ar([0.4, 0.2], 800, 5), 3, 4)
    assert np.allclose(lag_features(fit), [max_deviation(fit, j) for j in (1, 2, 3)], atol=1e-14)


def test_aggregation_examples():
    D = [0.1, 0.5, 0.3, 0.2]
    assert aggregate_feature(D, 4, 1) == (0.2, (4, 4))
    assert aggregate_feature(D, 4, 2) == (0.3, (3, 4))
    assert aggregate_feature(D, 4, 4) == (0.2, (4, 4))
    assert aggregate_feature(D + [0.05, 0.1], 6, 4) == (0.2, (4, 6))
    assert aggregation_range(5, 3) == (3, 5)


def test_aggregation_errors():
    with pytest.raises(ArgumentError):
        aggregation_range(2, 3)
    with pytest.raises(ArgumentError):
        aggregate_feature([0.1], 2, 1)
    with pytest.raises(ArgumentError):
        pooled_min_order([])
    with pytest.raises(ArgumentError):
        class_median([])


def test_pooled_and_median():
    assert pooled_min_order([3, 2, 5]) == 2
    assert class_median([3.0, 1.0, 2.0, 10.0]) == 2.5


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=8), st.data())
def test_aggregate_bounds(D, data):
    b_k = len(D)
    b_star = data.draw(st.integers(1, b_k))
    S, (lo, hi) = aggregate_feature(D, b_k, b_star)
    assert hi == b_k and 1 <= lo <= hi
    assert S in D and S <= max(D)


def test_stationary_cv_feature_small():
    values = [lag_features(fit_cv(simulate_ar([0.5], 5000, s)))[0] for s in range(10)]
    assert np.median(values) <= 0.1


@pytest.mark.xfail(strict=True, reason="with a forced c=8 fit the grid maximum deviation "
                   "of a stationary AR(1) concentrates near 0.14, not below 0.1")
def test_stationary_forced_c8_feature_small():
    values = [max_deviation(fit_ols(simulate_ar([0.5], 5000, s), 1, 8), 1) for s in range(20)]
    assert np.median(values) <= 0.1
