"""Sieve basis families on [0, 1].

Two orthonormal families are provided:

``legendre``
    shifted Legendre polynomials with unit L2([0, 1]) norm,
    ``alpha_l(t) = sqrt(2l - 1) * P_{l-1}(2t - 1)``.
``trigonometric``
    ``1, sqrt(2) cos(2 pi t), sqrt(2) sin(2 pi t), sqrt(2) cos(4 pi t), ...``
    truncated after exactly ``c`` terms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import ArgumentError, DomainError


class BasisFamily(str, enum.Enum):
    LEGENDRE = "legendre"
    TRIGONOMETRIC = "trigonometric"


@dataclass(frozen=True)
class SieveBasis:
    """A family of ``c`` basis functions on [0, 1]."""

    family: BasisFamily = BasisFamily.LEGENDRE
    c: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", BasisFamily(self.family))
        if int(self.c) != self.c or self.c < 1:
            raise ArgumentError(f"basis size c must be a positive integer, got {self.c!r}")
        object.__setattr__(self, "c", int(self.c))

    def with_size(self, c: int) -> "SieveBasis":
        return SieveBasis(self.family, c)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "c": self.c}

    @classmethod
    def from_dict(cls, d: dict) -> "SieveBasis":
        return cls(BasisFamily(d["family"]), int(d["c"]))


def legendre_values(x, degree: int) -> np.ndarray:
    """Legendre polynomials ``P_0 .. P_degree`` at ``x`` in [-1, 1].

    Uses the three-term recurrence
    ``(k + 1) P_{k+1} = (2k + 1) x P_k - k P_{k-1}``.
    Returns an array of shape ``x.shape + (degree + 1,)``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (degree + 1,))
    out[..., 0] = 1.0
    if degree >= 1:
        out[..., 1] = x
    for k in range(1, degree):
        out[..., k + 1] = ((2 * k + 1) * x * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def _check_domain(t: np.ndarray) -> None:
    if not np.all(np.isfinite(t)) or np.any(t < 0.0) or np.any(t > 1.0):
        raise DomainError("basis functions are defined on [0, 1] only")


def evaluate_basis(basis: SieveBasis, t) -> np.ndarray:
    """Evaluate ``(alpha_1(t), ..., alpha_c(t))``.

    Parameters
    ----------
    basis : SieveBasis
    t : float or array_like
        Points in [0, 1].

    Returns
    -------
    ndarray
        Shape ``(c,)`` for scalar ``t``, otherwise ``t.shape + (c,)``.
    """
    t = np.asarray(t, dtype=float)
    _check_domain(t)
    c = basis.c
    if basis.family is BasisFamily.LEGENDRE:
        scale = np.sqrt(2.0 * np.arange(c) + 1.0)
        return legendre_values(2.0 * t - 1.0, c - 1) * scale
    out = np.empty(t.shape + (c,))
    out[..., 0] = 1.0
    for ell in range(1, c):
        k = (ell + 1) // 2
        arg = 2.0 * np.pi * k * t
        out[..., ell] = np.sqrt(2.0) * (np.cos(arg) if ell % 2 == 1 else np.sin(arg))
    return out


def uniform_grid(grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise ArgumentError("grid_size must be at least 2")
    return np.linspace(0.0, 1.0, int(grid_size))


def basis_norms(basis: SieveBasis, grid_size: int = 2001) -> tuple[float, float]:
    """Grid approximations of ``xi_c`` and ``zeta_c``.

    ``xi_c`` is the largest absolute value of any single basis function and
    ``zeta_c`` the largest Euclidean norm of the basis vector, both taken
    over a uniform grid that includes the endpoints.
    """
    values = evaluate_basis(basis, uniform_grid(grid_size))
    xi = float(np.max(np.abs(values)))
    zeta = float(np.max(np.sqrt(np.sum(values**2, axis=1))))
    return xi, zeta


def gram_matrix(basis: SieveBasis, grid_size: int = 10001) -> np.ndarray:
    """Trapezoid-rule Gram matrix ``int_0^1 alpha_l alpha_m dt``."""
    t = uniform_grid(grid_size)
    values = evaluate_basis(basis, t)
    return trapezoid(values[:, :, None] * values[:, None, :], t, axis=0)
