"""Maximum-deviation features and their ensemble aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arfit import ArFit, eval_phi
from .basis import evaluate_basis, uniform_grid
from .errors import ArgumentError

DEFAULT_GRID_SIZE = 201


@dataclass
class FeatureSet:
    """Per-series lag features ``D(1..b)`` and the aggregated scalar ``S``."""

    series_id: str
    b: int
    D: np.ndarray
    S: float
    aggregation_range: tuple[int, int]
    c: Optional[int] = None
    label: Optional[str] = None
    D0: Optional[float] = None
    extra: dict = field(default_factory=dict)


def max_deviation(fit: ArFit, j: int, grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """``sup_{t1, t2} |phi_j(t1) - phi_j(t2)|`` as max - min over a grid."""
    if not 1 <= j <= fit.b and not (j == 0 and fit.intercept):
        raise ArgumentError(f"lag {j} outside 1..{fit.b}")
    if fit.c == 1:
        return 0.0
    phi = eval_phi(fit, j, uniform_grid(grid_size))
    return float(phi.max() - phi.min())


def lag_features(fit: ArFit, grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """``D(j)`` for every lag ``j = 1..b`` of a fit."""
    if fit.c == 1:
        return np.zeros(fit.b)
    phi = fit.beta_hat.reshape(-1, fit.c)[int(fit.intercept):]
    curves = evaluate_basis(fit.basis, uniform_grid(grid_size)) @ phi.T
    return curves.max(axis=0) - curves.min(axis=0)


def pooled_min_order(orders: Sequence[int]) -> int:
    if len(orders) == 0:
        raise ArgumentError("need at least one selected order")
    return int(min(orders))


def aggregation_range(b_k: int, b_star: int) -> tuple[int, int]:
    if not 1 <= b_star <= b_k:
        raise ArgumentError(f"pooled order {b_star} must lie in 1..{b_k}")
    return max(b_k - b_star + 1, b_star), b_k


def aggregate_feature(D: Sequence[float], b_k: int, b_star: int) -> tuple[float, tuple[int, int]]:
    """``S = max D(j)`` over ``max(b_k - b* + 1, b*) <= j <= b_k``."""
    D = np.asarray(D, dtype=float)
    if D.size != b_k:
        raise ArgumentError(f"expected {b_k} lag features, got {D.size}")
    lo, hi = aggregation_range(b_k, b_star)
    return float(D[lo - 1:hi].max()), (lo, hi)


def class_median(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise ArgumentError("median of an empty class")
    return float(np.median(np.asarray(values, dtype=float)))
