"""Synthetic two-class cohorts (simulation Models 1-6, noise forms i-iii).

Every record owns an independent random stream: a Philox generator keyed by
the record seed.  Philox is counter based, so record ``k`` of a cohort with
base seed ``s`` always uses key ``s + k`` no matter how the cohort is split
across workers.

Each recursion starts from a zero history and runs ``BURN_IN`` discarded
steps whose rescaled time is clamped to ``1/n`` before the ``n`` kept steps
at ``t = i/n``, ``i = 1..n``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ArgumentError, DataError

LABELS = ("X", "Y")
MODEL_IDS = (1, 2, 3, 4, 5, 6)
NOISE_IDS = (1, 2, 3)
BURN_IN = 100


@dataclass
class TimeSeriesRecord:
    """One observed series."""

    id: str
    values: np.ndarray
    label: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise DataError(f"series {self.id!r} must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"series {self.id!r} contains non-finite values")
        if self.label is not None and self.label not in LABELS:
            raise ArgumentError(f"unknown class label {self.label!r}")

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SimulationSpec:
    model_id: int = 1
    noise_id: int = 1
    delta: float = 0.2
    n: int = 1000
    class_label: str = "X"
    seed: int = 0

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise ArgumentError(f"unknown model id {self.model_id!r} (expected 1..6)")
        if self.noise_id not in NOISE_IDS:
            raise ArgumentError(f"unknown noise id {self.noise_id!r} (expected 1..3)")
        if self.class_label not in LABELS:
            raise ArgumentError(f"unknown class label {self.class_label!r}")
        if self.n < 10:
            raise ArgumentError("series length n must be at least 10")
        if self.delta < 0:
            raise ArgumentError("delta must be non-negative")


def rng_for_seed(seed: int) -> np.random.Generator:
    """Counter-based generator keyed directly by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed) % 2**128))


def _time_index(n: int) -> np.ndarray:
    # burn-in steps sit at the first in-sample time i = 1
    return np.concatenate([np.ones(BURN_IN), np.arange(1, n + 1, dtype=float)])


def noise_scale(noise_id: int, i: np.ndarray, n: int) -> np.ndarray:
    if noise_id == 1:
        return np.ones_like(i)
    if noise_id == 2:
        return 0.25 + 0.25 * np.cos(2 * np.pi * i / n) ** 2
    if noise_id == 3:
        return 0.5 + i / (2.0 * n)
    raise ArgumentError(f"unknown noise id {noise_id!r}")


def _tvar(a1: np.ndarray, a2: np.ndarray, eps: np.ndarray) -> np.ndarray:
    x = np.zeros(eps.size)
    x1 = x2 = 0.0
    for i in range(eps.size):
        xi = a1[i] * x1 + a2[i] * x2 + eps[i]
        x[i] = xi
        x2, x1 = x1, xi
    return x


def _recursion(spec: SimulationSpec, eps: np.ndarray, i: np.ndarray) -> np.ndarray:
    n = spec.n
    t = i / n
    cos_t = np.cos(2 * np.pi * t)
    sin_t = np.sin(2 * np.pi * t)
    zero = np.zeros_like(t)
    is_x = spec.class_label == "X"
    m = spec.model_id

    if m == 1:
        scale = 2.0 * spec.delta if is_x else spec.delta
        return _tvar(scale * cos_t, zero, eps)
    if m == 2:
        if is_x:
            return _tvar(np.full_like(t, 0.4), 0.6 * sin_t, eps)
        return _tvar(np.full_like(t, 0.6), 0.4 * cos_t, eps)
    if m == 3:
        if is_x:
            return _tvar(0.4 * (cos_t + 1.0), zero, eps)
        out = eps.copy()
        out[1:] += 0.4 * eps[:-1]
        out[2:] += 0.3 * eps[:-2]
        return out
    if m == 5:
        if is_x:
            return _tvar(0.2 * sin_t, np.full_like(t, 0.2), eps)
        return _tvar(np.full_like(t, 0.2), 0.2 * sin_t, eps)

    x = np.zeros(eps.size)
    x1 = x2 = 0.0
    if m == 4:
        amp = 1.5 * sin_t if is_x else 0.5 * cos_t
        for k in range(eps.size):
            xk = amp[k] * np.exp(-t[k] * x1 * x1) + eps[k]
            x[k] = xk
            x2, x1 = x1, xk
        return x
    # m == 6
    lift = sin_t + 1.0
    for k in range(eps.size):
        if is_x:
            xk = 0.2 * lift[k] / (x1 + 1.0) + 0.2 * np.exp(-t[k] * x2 * x2) + eps[k]
        else:
            xk = 0.2 * np.exp(-t[k] * x1 * x1) + 0.3 * lift[k] * x2 + eps[k]
        x[k] = xk
        x2, x1 = x1, xk
    return x


def generate_series(spec: SimulationSpec, record_id: Optional[str] = None) -> TimeSeriesRecord:
    """Simulate one series of length ``spec.n``; deterministic in ``spec``."""
    rng = rng_for_seed(spec.seed)
    i = _time_index(spec.n)
    eps = rng.standard_normal(i.size) * noise_scale(spec.noise_id, i, spec.n)
    values = _recursion(spec, eps, i)[BURN_IN:]
    rid = record_id if record_id is not None else f"{spec.class_label}-{spec.seed}"
    return TimeSeriesRecord(rid, values, spec.class_label, spec.seed)


def generate_cohort(template: SimulationSpec, n1: int, n2: int, base_seed: int,
                    prefix: str = "") -> list[TimeSeriesRecord]:
    """``n1`` class-X records followed by ``n2`` class-Y records.

    Record ``k`` (counting across both classes) uses seed ``base_seed + k``.
    """
    if n1 < 1 or n2 < 1:
        raise ArgumentError("both classes need at least one series")
    records = []
    for k in range(n1 + n2):
        label = "X" if k < n1 else "Y"
        within = k if k < n1 else k - n1
        spec = replace(template, class_label=label, seed=int(base_seed) + k)
        records.append(generate_series(spec, f"{prefix}{label}{within:04d}"))
    return records
