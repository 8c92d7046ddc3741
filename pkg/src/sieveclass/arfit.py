"""Sieve least-squares fit of a time-varying AR approximation.

The coefficient functions of ``z_i = sum_j phi_j(i/n) z_{i-j} + e_i`` are
expanded in a sieve basis, ``phi_j(t) = sum_l a_{jl} alpha_l(t)``, which turns
the problem into ordinary least squares on a Kronecker-structured design.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import qr, solve_triangular

from .basis import BasisFamily, SieveBasis, evaluate_basis
from .errors import ArgumentError, DegenerateInputError, InsufficientDataError

RIDGE_CONDITION = 1e10
RIDGE_SCALE = 1e-8
DEFAULT_B_GRID = tuple(range(1, 9))
DEFAULT_C_GRID = tuple(range(1, 9))


@dataclass(frozen=True, eq=False)
class ArFit:
    """Fitted sieve AR approximation.

    ``beta_hat`` is blocked by lag ``j`` (outer) then basis index ``l``
    (inner).  With ``intercept=True`` an extra leading block holds the
    expansion of the smooth intercept ``phi_0``.
    """

    b: int
    c: int
    basis: SieveBasis
    beta_hat: np.ndarray
    n: int
    condition_estimate: float
    loocv_score: float = float("nan")
    ridge: bool = False
    intercept: bool = False
    residual_variance: float = float("nan")
    meta: dict = field(default_factory=dict, compare=False)

    def coefficient_block(self, j: int) -> np.ndarray:
        lo = 0 if self.intercept else 1
        if not lo <= j <= self.b:
            raise ArgumentError(f"lag {j} outside {lo}..{self.b}")
        k = j if self.intercept else j - 1
        return self.beta_hat[k * self.c:(k + 1) * self.c]


def _values(z) -> np.ndarray:
    return np.asarray(getattr(z, "values", z), dtype=float)


def _check_sizes(n: int, b: int, ncols: int) -> None:
    if b < 1:
        raise ArgumentError("AR order b must be at least 1")
    if n <= ncols + 1 or n - b < ncols:
        raise InsufficientDataError(
            f"series of length {n} too short for {ncols} sieve coefficients")


def build_design(z, b: int, basis: SieveBasis, intercept: bool = False):
    """Design matrix and response of the sieve regression.

    Row ``s`` (1-based, ``s = 1..n-b``) is
    ``(z_{s+b-1}, ..., z_s) kron (alpha_1((s+b)/n), ..., alpha_c((s+b)/n))``
    and the response is ``(z_{b+1}, ..., z_n)``.

    Returns
    -------
    design : ndarray, shape (n - b, b * c)
        ``(n - b, (b + 1) * c)`` when ``intercept`` is set; the intercept
        block comes first.
    response : ndarray, shape (n - b,)
    """
    z = _values(z)
    n, c = z.size, basis.c
    _check_sizes(n, b, (b + int(intercept)) * c)
    m = n - b
    t = np.arange(b + 1, n + 1) / n
    alpha = evaluate_basis(basis, t)
    # lag matrix: column j-1 holds z_{i-j} for response index i = s + b
    lags = np.column_stack([z[b - j:n - j] for j in range(1, b + 1)])
    if intercept:
        lags = np.column_stack([np.ones(m), lags])
    design = (lags[:, :, None] * alpha[:, None, :]).reshape(m, -1)
    return design, z[b:].copy()


def _qr_solve(design: np.ndarray, response: np.ndarray):
    q, r = qr(design, mode="economic", check_finite=False)
    diag = np.abs(np.diag(r))
    cond = float(diag.max() / diag.min()) if diag.min() > 0 else float("inf")
    qty = q.T @ response
    return q, r, qty, max(cond, 1.0)


def fit_ols(z, b: int, c: int, basis: SieveBasis | BasisFamily | str = BasisFamily.LEGENDRE,
            intercept: bool = False) -> ArFit:
    """Least-squares sieve fit via a Householder QR factorization.

    If the triangular factor has a diagonal magnitude ratio above ``1e10``
    the problem is refit with a tiny ridge penalty and ``ridge`` is set.
    """
    z = _values(z)
    if z.size and np.ptp(z) == 0.0:
        raise DegenerateInputError("constant series cannot be fitted")
    basis = _as_basis(basis, c)
    design, response = build_design(z, b, basis, intercept)
    q, r, qty, cond = _qr_solve(design, response)
    ridge = cond > RIDGE_CONDITION
    if not ridge:
        beta = solve_triangular(r, qty, check_finite=False)
        resid = response - design @ beta
        lev = np.sum(q * q, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            score = float(np.mean((resid / (1.0 - lev)) ** 2))
        if not np.isfinite(score):
            score = float("inf")
    else:
        p = design.shape[1]
        lam = RIDGE_SCALE * float(np.sum(design * design)) / p
        aug = np.vstack([design, np.sqrt(lam) * np.eye(p)])
        _, r_aug, qty_aug, _ = _qr_solve(aug, np.concatenate([response, np.zeros(p)]))
        beta = solve_triangular(r_aug, qty_aug, check_finite=False)
        resid = response - design @ beta
        score = float("inf")
    dof = max(response.size - beta.size, 1)
    return ArFit(b=b, c=basis.c, basis=basis, beta_hat=beta, n=z.size,
                 condition_estimate=cond, loocv_score=score, ridge=ridge,
                 intercept=intercept, residual_variance=float(resid @ resid) / dof)


def _as_basis(basis, c: int) -> SieveBasis:
    if isinstance(basis, SieveBasis):
        return basis.with_size(c)
    return SieveBasis(BasisFamily(basis), c)


def eval_phi(fit: ArFit, j: int, t) -> np.ndarray | float:
    """``phi_hat_j(t)``: the j-th coefficient block against the basis at t."""
    block = fit.coefficient_block(j)
    values = evaluate_basis(fit.basis, t) @ block
    return float(values) if np.ndim(values) == 0 else values


def loo_residuals(design: np.ndarray, response: np.ndarray) -> np.ndarray:
    """Closed-form leave-one-out residuals ``e_s / (1 - h_ss)``."""
    q, r, qty, _ = _qr_solve(design, response)
    resid = response - q @ qty
    lev = np.sum(q * q, axis=1)
    return resid / (1.0 - lev)


class OrderSelection(NamedTuple):
    b: int
    c: int
    cv_table: dict


def select_order_cv(z, b_grid: Sequence[int] = DEFAULT_B_GRID,
                    c_grid: Sequence[int] = DEFAULT_C_GRID,
                    basis: SieveBasis | BasisFamily | str = BasisFamily.LEGENDRE,
                    intercept: bool = False, common_sample: bool = True) -> OrderSelection:
    """Pick ``(b, c)`` minimising the leave-one-out prediction error.

    The score of a cell is the mean of ``(e_s / (1 - h_ss))^2`` over its
    design rows.  With ``common_sample`` (the default) every cell is fitted
    and scored on the same responses ``z_{B+1..n}``, ``B = max(b_grid)``, so
    that scores of different orders are comparable; otherwise order ``b``
    uses all of its ``n - b`` rows.  For a
    fixed ``b`` the columns are reordered basis-index-major, so the design of
    every smaller ``c`` is a column prefix and one QR factorization serves
    all of them.  Cells that are numerically rank deficient or fail to fit
    score ``inf``.  Ties go to the smaller ``b``, then the smaller ``c``.
    """
    z = _values(z)
    b_grid = sorted({int(b) for b in b_grid})
    c_grid = sorted({int(c) for c in c_grid})
    if not b_grid or not c_grid:
        raise ArgumentError("order grids must be nonempty")
    if min(b_grid) < 1 or min(c_grid) < 1:
        raise ArgumentError("order grids must hold positive integers")
    if np.ptp(z) == 0.0:
        raise DegenerateInputError("constant series cannot be fitted")
    if max(b_grid) * max(c_grid) + 1 >= z.size:
        raise InsufficientDataError(
            f"series of length {z.size} too short for grids up to "
            f"b={max(b_grid)}, c={max(c_grid)}")
    family = basis.family if isinstance(basis, SieveBasis) else BasisFamily(basis)
    c_max = max(c_grid)
    table = {}
    for b in b_grid:
        nblocks = b + int(intercept)
        try:
            design, response = build_design(z, b, SieveBasis(family, c_max), intercept)
            if common_sample:
                skip = max(b_grid) - b
                design, response = design[skip:], response[skip:]
        except InsufficientDataError:
            table.update({(b, c): float("inf") for c in c_grid})
            continue
        # column (block k, basis l) moves to position l * nblocks + k
        order = np.arange(nblocks * c_max).reshape(nblocks, c_max).T.ravel()
        q, r, qty, _ = _qr_solve(design[:, order], response)
        diag = np.abs(np.diag(r))
        sq = q * q
        for c in c_grid:
            k = c * nblocks
            d = diag[:k]
            if d.min() == 0.0 or d.max() / d.min() > RIDGE_CONDITION:
                table[(b, c)] = float("inf")
                continue
            resid = response - q[:, :k] @ qty[:k]
            lev = sq[:, :k].sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                score = float(np.sum((resid / (1.0 - lev)) ** 2) / response.size)
            table[(b, c)] = score if np.isfinite(score) else float("inf")
    best = min(table, key=lambda bc: (table[bc], bc[0], bc[1]))
    return OrderSelection(best[0], best[1], table)


def fit_cv(z, b_grid=DEFAULT_B_GRID, c_grid=DEFAULT_C_GRID,
           basis: SieveBasis | BasisFamily | str = BasisFamily.LEGENDRE,
           intercept: bool = False, common_sample: bool = True) -> ArFit:
    """Order selection followed by the OLS fit of the selected cell."""
    sel = select_order_cv(z, b_grid, c_grid, basis, intercept, common_sample)
    fit = fit_ols(z, sel.b, sel.c, basis, intercept)
    return replace(fit, meta={"cv_table": sel.cv_table})
