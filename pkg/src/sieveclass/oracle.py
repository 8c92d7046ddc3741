"""Population ground truth for locally stationary models.

For a frozen time ``t`` the best linear predictor coefficients of order ``b``
solve the Yule-Walker system ``Gamma^b(t) phi = nu^b(t)``, where
``Gamma^b(t)`` is the Toeplitz matrix of autocovariances ``gamma(t, |l1-l2|)``
and ``nu^b_l(t) = gamma(t, l)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, toeplitz

from .basis import uniform_grid
from .errors import ArgumentError, DomainError, SingularCovarianceError

MIN_EIGENVALUE = 1e-10


class ModelKind(str, enum.Enum):
    TV_MA1 = "tvma1"
    TV_AR1 = "tvar1"
    STATIONARY_AR1 = "stationary-ar1"
    CUSTOM = "custom"


@dataclass(frozen=True)
class AutocovModel:
    """Autocovariance model ``gamma(t, h)``.

    ``coefficient`` is the function ``a(t)`` of a time-varying MA(1) or AR(1)
    model (a constant for the stationary AR(1) case may be given as a
    float).  ``custom_gamma`` takes ``(t, h)`` and is used for
    ``ModelKind.CUSTOM``.
    """

    kind: ModelKind
    coefficient: Optional[Callable[[float], float] | float] = None
    custom_gamma: Optional[Callable[[float, int], float]] = None

    def a(self, t: float) -> float:
        coef = self.coefficient
        return float(coef(t)) if callable(coef) else float(coef)


def gamma(model: AutocovModel, t: float, h: int) -> float:
    """Autocovariance at rescaled time ``t`` and lag ``h >= 0``.

    The AR(1) forms return the frozen-time value ``a(t)^h / (1 - a(t)^2)``
    and ignore the ``O(log^2 n / n)`` correction of the time-varying case.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t} outside [0, 1]")
    if h < 0:
        raise ArgumentError("lag must be non-negative")
    kind = ModelKind(model.kind)
    if kind is ModelKind.CUSTOM:
        return float(model.custom_gamma(t, h))
    a = model.a(t)
    if kind is ModelKind.TV_MA1:
        return a * a + 1.0 if h == 0 else (a if h == 1 else 0.0)
    if abs(a) >= 1.0:
        raise DomainError(f"AR(1) coefficient {a} at t={t} is not inside (-1, 1)")
    return a**h / (1.0 - a * a)


def _yule_walker_system(model: AutocovModel, b: int, t: float):
    g = np.array([gamma(model, t, h) for h in range(b + 1)])
    return toeplitz(g[:b]), g[1:]


def population_phi(model: AutocovModel, b: int, t: float) -> np.ndarray:
    """Solve ``Gamma^b(t) phi = nu^b(t)`` by a Cholesky factorization."""
    if b < 1:
        raise ArgumentError("order b must be at least 1")
    big_gamma, nu = _yule_walker_system(model, b, t)
    if np.linalg.eigvalsh(big_gamma)[0] < MIN_EIGENVALUE:
        raise SingularCovarianceError(
            f"autocovariance matrix of order {b} at t={t} is not positive definite")
    return cho_solve(cho_factor(big_gamma), nu)


def population_phi_explicit(model: AutocovModel, b: int, t: float) -> np.ndarray:
    """Same quantity through the precision matrix ``Omega^b(t) = Gamma^b(t)^-1``.

    ``phi_j(t) = sum_{j'} Omega_{j'j}(t) gamma(t, j')``.  Only used to
    cross-check :func:`population_phi`.
    """
    big_gamma, nu = _yule_walker_system(model, b, t)
    omega = np.linalg.inv(big_gamma)
    return omega.T @ nu


def yule_walker_residual(model: AutocovModel, b: int, t: float, phi: np.ndarray) -> float:
    big_gamma, nu = _yule_walker_system(model, b, t)
    return float(np.max(np.abs(big_gamma @ phi - nu)) / max(np.max(np.abs(nu)), 1e-300))


def population_curves(model: AutocovModel, b: int, grid_size: int = 201,
                      explicit: bool = False) -> np.ndarray:
    """Rows ``phi(t)`` for each point of a uniform grid, shape (grid_size, b)."""
    solver = population_phi_explicit if explicit else population_phi
    return np.array([solver(model, b, t) for t in uniform_grid(grid_size)])


def population_feature(model: AutocovModel, b: int, j: int, grid_size: int = 201,
                       explicit: bool = False) -> float:
    """``D*(j)``: max - min over the grid of the population ``phi_j(t)``."""
    if not 1 <= j <= b:
        raise ArgumentError(f"lag {j} outside 1..{b}")
    curve = population_curves(model, b, grid_size, explicit)[:, j - 1]
    return float(curve.max() - curve.min())
