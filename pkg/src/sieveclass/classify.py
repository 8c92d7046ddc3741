"""Threshold classification of two classes of locally stationary series.

Pipeline (nonstationary mode): every series gets a cross-validated sieve AR
fit, lag features ``D(j)`` and an aggregated feature ``S``; the class medians
fix an orientation and a grid search picks the accuracy-maximizing
threshold.  When every training series looks correlation stationary the
classifier switches to a fallback that compares constant AR coefficient
vectors with Euclidean distances.  An optional prescreen compares smoothed
mean functions first.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import uniform_filter1d
from scipy.signal import lfilter, lfiltic

from . import __version__
from ._parallel import parallel_map
from .arfit import (DEFAULT_B_GRID, DEFAULT_C_GRID, ArFit, build_design, fit_cv,
                    fit_ols, select_order_cv)
from .basis import BasisFamily, SieveBasis, evaluate_basis, uniform_grid
from .errors import (ArgumentError, DataError, DegenerateInputError,
                     IndeterminateClassesError, VersionMismatchError)
from .features import (DEFAULT_GRID_SIZE, FeatureSet, aggregate_feature, class_median,
                       lag_features, pooled_min_order)
from .simgen import TimeSeriesRecord, rng_for_seed


class Mode(str, enum.Enum):
    NONSTATIONARY = "nonstationary"
    STATIONARY_FALLBACK = "stationary-fallback"


class Orientation(str, enum.Enum):
    X_BELOW = "x-below"
    X_ABOVE = "x-above"

    def low_label(self) -> str:
        return "X" if self is Orientation.X_BELOW else "Y"

    def high_label(self) -> str:
        return "Y" if self is Orientation.X_BELOW else "X"


@dataclass
class TrainConfig:
    b_grid: tuple = DEFAULT_B_GRID
    c_grid: tuple = DEFAULT_C_GRID
    basis: str = BasisFamily.LEGENDRE.value
    M: int = 1000
    grid_size: int = DEFAULT_GRID_SIZE
    intercept: bool = False
    standardize: bool = False
    pretest: bool = False
    pretest_level: float = 0.05
    bootstrap: int = 200
    pretest_max_series: Optional[int] = None
    prescreen: bool = False
    bandwidth: float = 0.1
    margin: float = 3.0
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        self.b_grid = tuple(sorted({int(b) for b in self.b_grid}))
        self.c_grid = tuple(sorted({int(c) for c in self.c_grid}))
        self.basis = BasisFamily(self.basis).value
        if not self.b_grid or not self.c_grid or self.b_grid[0] < 1 or self.c_grid[0] < 1:
            raise ArgumentError("order grids must be nonempty sets of positive integers")
        if self.M < 1:
            raise ArgumentError("M must be at least 1")
        if self.grid_size < 2:
            raise ArgumentError("grid_size must be at least 2")
        if self.bootstrap < 1:
            raise ArgumentError("bootstrap count must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b_grid"], d["c_grid"] = list(self.b_grid), list(self.c_grid)
        d.pop("threads")  # does not affect results
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


# ---------------------------------------------------------------- thresholds

class ThresholdChoice(NamedTuple):
    threshold: float
    orientation: Orientation
    training_accuracy: float
    C1: float
    C2: float


def threshold_grid(S_x: Sequence[float], S_y: Sequence[float], M: int):
    """Candidates ``C1 + (C2 - C1)(i - 1)/M``, ``i = 1..M+1``.

    ``C1`` is half the smallest and ``C2`` twice the largest feature.
    Returns ``(candidates, C1, C2)``.
    """
    if len(S_x) == 0 or len(S_y) == 0:
        raise ArgumentError("both classes need at least one feature value")
    if M < 1:
        raise ArgumentError("M must be at least 1")
    both = np.concatenate([np.asarray(S_x, float), np.asarray(S_y, float)])
    c1, c2 = 0.5 * float(both.min()), 2.0 * float(both.max())
    grid = c1 + (c2 - c1) * np.arange(M + 1) / M
    return grid, c1, c2


def orientation_of(S_x, S_y) -> Orientation:
    med_x, med_y = class_median(S_x), class_median(S_y)
    if med_x == med_y:
        raise IndeterminateClassesError(
            f"class medians coincide ({med_x}); labels cannot be assigned")
    return Orientation.X_BELOW if med_x < med_y else Orientation.X_ABOVE


def correct_counts(S_x, S_y, thresholds, orientation: Orientation):
    """Correctly assigned counts per threshold; ``<=`` goes to the low side."""
    sx, sy = np.sort(np.asarray(S_x, float)), np.sort(np.asarray(S_y, float))
    thresholds = np.asarray(thresholds, float)
    low_x = np.searchsorted(sx, thresholds, side="right")
    low_y = np.searchsorted(sy, thresholds, side="right")
    if orientation is Orientation.X_BELOW:
        return low_x, sy.size - low_y
    return sx.size - low_x, low_y


def select_threshold(S_x, S_y, M: int = 1000) -> ThresholdChoice:
    """Smallest grid threshold among the training-accuracy maximizers."""
    orientation = orientation_of(S_x, S_y)
    grid, c1, c2 = threshold_grid(S_x, S_y, M)
    nx, ny = correct_counts(S_x, S_y, grid, orientation)
    total = nx + ny
    best = int(np.argmax(total))  # first maximizer = smallest threshold
    acc = float(total[best]) / (len(S_x) + len(S_y))
    return ThresholdChoice(float(grid[best]), orientation, acc, c1, c2)


def assign(S_z: float, threshold: float, orientation: Orientation) -> str:
    """Low side for ``S_z <= threshold``, high side otherwise."""
    return orientation.low_label() if S_z <= threshold else orientation.high_label()


# ------------------------------------------------------ stationarity pretest

def stationarity_statistic(fit: ArFit, grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """``T = sum_j int (phi_j(t) - mean_j)^2 dt`` by the trapezoid rule."""
    if fit.c == 1:
        return 0.0
    t = uniform_grid(grid_size)
    blocks = fit.beta_hat.reshape(-1, fit.c)[int(fit.intercept):]
    curves = evaluate_basis(fit.basis, t) @ blocks.T
    means = trapezoid(curves, t, axis=0)
    return float(np.sum(trapezoid((curves - means) ** 2, t, axis=0)))


def stationarity_test(z, fit: ArFit, B: int = 200, seed: int = 0,
                      grid_size: int = DEFAULT_GRID_SIZE,
                      c_grid: Optional[Sequence[int]] = None) -> float:
    """Multiplier-bootstrap p-value for constant AR coefficients.

    Resamples are drawn from the constant-coefficient (``c = 1``) fit of the
    same order, started at the observed first ``b`` values, with the null
    residuals multiplied by i.i.d. standard normal weights.  Each resample
    is refit at the original ``(b, c)``, or, when ``c_grid`` is given, at
    the sieve size re-selected by cross-validation over ``c_grid`` with the
    order held at ``b``.  The latter mirrors how ``c`` of the observed fit
    was chosen; without it a cross-validated ``c > 1`` on stationary data
    is compared against a null that never had to pass the selection step,
    and the test over-rejects.  The p-value is
    ``(1 + #{T* >= T}) / (B + 1)``.  A constant fit has ``T = 0`` and
    therefore ``p = 1``.
    """
    z = np.asarray(getattr(z, "values", z), dtype=float)
    if B < 1:
        raise ArgumentError("bootstrap count must be positive")
    stat = stationarity_statistic(fit, grid_size)
    if fit.c == 1:
        return 1.0
    b = fit.b
    null = fit_ols(z, b, 1, fit.basis, fit.intercept)
    design, response = build_design(z, b, null.basis, fit.intercept)
    resid = response - design @ null.beta_hat
    coefs = null.beta_hat[int(fit.intercept):]
    shift = null.beta_hat[0] if fit.intercept else 0.0
    a = np.concatenate([[1.0], -coefs])
    zi = lfiltic([1.0], a, z[:b][::-1])
    rng = rng_for_seed(seed)
    exceed = 0
    for _ in range(B):
        innov = shift + resid * rng.standard_normal(resid.size)
        zstar = np.concatenate([z[:b], lfilter([1.0], a, innov, zi=zi)[0]])
        c = fit.c
        if c_grid is not None:
            c = select_order_cv(zstar, (b,), c_grid, fit.basis, fit.intercept).c
        if c == 1:
            continue  # T* = 0 < T
        boot = fit_ols(zstar, b, c, fit.basis, fit.intercept)
        exceed += stationarity_statistic(boot, grid_size) >= stat
    return (1.0 + exceed) / (B + 1.0)


# ------------------------------------------------------ stationary fallback

class StationaryFit(NamedTuple):
    phi_bar_x: np.ndarray
    phi_bar_y: np.ndarray
    S_xz: float
    S_yz: float
    b_star_max: int


def _constant_coefficients(z, b: int) -> np.ndarray:
    return fit_ols(z, b, 1, BasisFamily.LEGENDRE).beta_hat


def _stationary_order(z, b_grid) -> int:
    return select_order_cv(z, b_grid, (1,), BasisFamily.LEGENDRE).b


def fit_stationary(cohort: Sequence[TimeSeriesRecord], test_series,
                   b_grid: Sequence[int] = DEFAULT_B_GRID) -> StationaryFit:
    """Constant-coefficient classification quantities.

    Orders are chosen by cross-validation with a single constant basis
    function, the common order is the largest of them (training and test),
    and every series is refit at that order.
    """
    xs = [r.values for r in cohort if r.label == "X"]
    ys = [r.values for r in cohort if r.label == "Y"]
    if not xs or not ys:
        raise DataError("fallback fit needs labeled series of both classes")
    z = np.asarray(getattr(test_series, "values", test_series), dtype=float)
    b_star = max(_stationary_order(s, b_grid) for s in xs + ys + [z])
    phi_x = np.mean([_constant_coefficients(s, b_star) for s in xs], axis=0)
    phi_y = np.mean([_constant_coefficients(s, b_star) for s in ys], axis=0)
    phi_z = _constant_coefficients(z, b_star)
    return StationaryFit(phi_x, phi_y, float(np.linalg.norm(phi_z - phi_x)),
                         float(np.linalg.norm(phi_z - phi_y)), b_star)


# ------------------------------------------------------------ mean prescreen

MEAN_GRID_SIZE = 201


def smoothed_mean(z, bandwidth: float, grid_size: int = MEAN_GRID_SIZE) -> np.ndarray:
    """Moving-average mean function sampled on a uniform rescaled-time grid."""
    z = np.asarray(getattr(z, "values", z), dtype=float)
    window = max(1, int(round(bandwidth * z.size)))
    smooth = uniform_filter1d(z, window, mode="nearest")
    t = np.arange(1, z.size + 1) / z.size
    return np.interp(uniform_grid(grid_size), t, smooth)


@dataclass
class MeanProfile:
    mean_x: np.ndarray
    mean_y: np.ndarray
    pooled_std: float
    bandwidth: float
    margin: float

    def to_dict(self) -> dict:
        return {"mean_x": self.mean_x.tolist(), "mean_y": self.mean_y.tolist(),
                "pooled_std": self.pooled_std, "bandwidth": self.bandwidth,
                "margin": self.margin}

    @classmethod
    def from_dict(cls, d: dict) -> "MeanProfile":
        return cls(np.asarray(d["mean_x"]), np.asarray(d["mean_y"]),
                   float(d["pooled_std"]), float(d["bandwidth"]), float(d["margin"]))


def fit_mean_profile(cohort: Sequence[TimeSeriesRecord], bandwidth: float = 0.1,
                     margin: float = 3.0) -> MeanProfile:
    curves = {"X": [], "Y": []}
    for rec in cohort:
        curves[rec.label].append(smoothed_mean(rec, bandwidth))
    if not curves["X"] or not curves["Y"]:
        raise DataError("mean prescreen needs both classes")
    means = {k: np.mean(v, axis=0) for k, v in curves.items()}
    own = [np.max(np.abs(c - means[k])) for k, v in curves.items() for c in v]
    return MeanProfile(means["X"], means["Y"], float(np.std(own)), bandwidth, margin)


def mean_prescreen(cohort_or_profile, z, smoother_bandwidth: float = 0.1,
                   margin: float = 3.0) -> Optional[str]:
    """Label by L-infinity distance of mean functions, or ``None``.

    A label is returned only when the two distances differ by more than
    ``margin`` times the spread of the training series' distances to their
    own class average.
    """
    if isinstance(cohort_or_profile, MeanProfile):
        profile = cohort_or_profile
    else:
        profile = fit_mean_profile(cohort_or_profile, smoother_bandwidth, margin)
    if not math.isfinite(profile.margin) or profile.pooled_std <= 0.0:
        return None
    m = smoothed_mean(z, profile.bandwidth, profile.mean_x.size)
    d_x = float(np.max(np.abs(m - profile.mean_x)))
    d_y = float(np.max(np.abs(m - profile.mean_y)))
    if abs(d_x - d_y) > profile.margin * profile.pooled_std:
        return "X" if d_x < d_y else "Y"
    return None


# -------------------------------------------------------------- train/predict

@dataclass
class TrainedClassifier:
    mode: Mode
    config: TrainConfig
    S_bar_x: Optional[float] = None
    S_bar_y: Optional[float] = None
    threshold: Optional[float] = None
    orientation: Optional[Orientation] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    pooled_b_star: Optional[int] = None
    b_star_x: Optional[int] = None
    b_star_y: Optional[int] = None
    training_accuracy: Optional[float] = None
    stationary_phi_x: Optional[list] = None
    stationary_phi_y: Optional[list] = None
    b_star_max: Optional[int] = None
    stationary_table: Optional[dict] = None
    mean_profile: Optional[MeanProfile] = None
    pretest_pvalues: list = field(default_factory=list)
    n_x: int = 0
    n_y: int = 0
    version: str = __version__
    training_features: list = field(default_factory=list, repr=False, compare=False)

    @property
    def M(self) -> int:
        return self.config.M

    @property
    def basis(self) -> SieveBasis:
        return SieveBasis(BasisFamily(self.config.basis), max(self.config.c_grid))

    def to_dict(self) -> dict:
        d = {
            "version": self.version,
            "mode": self.mode.value,
            "S_bar_x": self.S_bar_x,
            "S_bar_y": self.S_bar_y,
            "threshold": self.threshold,
            "orientation": None if self.orientation is None else self.orientation.value,
            "C1": self.C1,
            "C2": self.C2,
            "M": self.config.M,
            "pooled_b_star": self.pooled_b_star,
            "b_star_x": self.b_star_x,
            "b_star_y": self.b_star_y,
            "training_accuracy": self.training_accuracy,
            "basis": {"family": self.config.basis},
            "b_grid": list(self.config.b_grid),
            "c_grid": list(self.config.c_grid),
            "stationary_phi_x": self.stationary_phi_x,
            "stationary_phi_y": self.stationary_phi_y,
            "b_star_max": self.b_star_max,
            "stationary_table": self.stationary_table,
            "mean_profile": None if self.mean_profile is None else self.mean_profile.to_dict(),
            "pretest_pvalues": self.pretest_pvalues,
            "n_x": self.n_x,
            "n_y": self.n_y,
            "config": self.config.to_dict(),
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict, check_version: bool = True) -> "TrainedClassifier":
        if check_version and d.get("version") != __version__:
            raise VersionMismatchError(
                f"model written by version {d.get('version')!r}, this is {__version__}")
        return cls(
            mode=Mode(d["mode"]),
            config=TrainConfig.from_dict(d["config"]),
            S_bar_x=d["S_bar_x"], S_bar_y=d["S_bar_y"], threshold=d["threshold"],
            orientation=None if d["orientation"] is None else Orientation(d["orientation"]),
            C1=d["C1"], C2=d["C2"], pooled_b_star=d["pooled_b_star"],
            b_star_x=d["b_star_x"], b_star_y=d["b_star_y"],
            training_accuracy=d["training_accuracy"],
            stationary_phi_x=d["stationary_phi_x"], stationary_phi_y=d["stationary_phi_y"],
            b_star_max=d["b_star_max"], stationary_table=d["stationary_table"],
            mean_profile=None if d["mean_profile"] is None else MeanProfile.from_dict(d["mean_profile"]),
            pretest_pvalues=d["pretest_pvalues"], n_x=d["n_x"], n_y=d["n_y"],
            version=d["version"],
        )

    @classmethod
    def from_json(cls, text: str, check_version: bool = True) -> "TrainedClassifier":
        return cls.from_dict(json.loads(text), check_version)


@dataclass
class Prediction:
    series_id: str
    label: str
    mode: Mode
    source: str
    S_z: Optional[float] = None
    b: Optional[int] = None
    c: Optional[int] = None
    S_xz: Optional[float] = None
    S_yz: Optional[float] = None
    tie: bool = False


def prepare_values(record, config: TrainConfig) -> np.ndarray:
    z = np.asarray(getattr(record, "values", record), dtype=float)
    if config.standardize:
        sd = z.std()
        if sd == 0.0:
            raise DegenerateInputError("constant series cannot be standardized")
        z = (z - z.mean()) / sd
    return z


def _fit_one(z: np.ndarray, config: TrainConfig) -> ArFit:
    return fit_cv(z, config.b_grid, config.c_grid, config.basis, config.intercept)


def _pretest_one(args) -> float:
    z, fit, config, seed = args
    return stationarity_test(z, fit, config.bootstrap, seed, config.grid_size, config.c_grid)


def _stationary_table(values: Sequence[np.ndarray], b_max: int) -> list:
    """Mean constant-coefficient vectors for every order ``1..b_max``."""
    return [np.mean([_constant_coefficients(v, b) for v in values], axis=0).tolist()
            for b in range(1, b_max + 1)]


def train(cohort: Sequence[TimeSeriesRecord], config: TrainConfig | None = None) -> TrainedClassifier:
    """Fit the two-class structural classifier on labeled series."""
    config = config or TrainConfig()
    xs = [r for r in cohort if r.label == "X"]
    ys = [r for r in cohort if r.label == "Y"]
    if not xs or not ys:
        raise DataError("training needs at least one series of each class")
    records = xs + ys
    need = max(config.b_grid) * max(config.c_grid) + 1
    short = [r.id for r in records if r.n <= need]
    if short:
        raise DataError(f"series too short for the order grids: {short[:5]}")

    profile = fit_mean_profile(records, config.bandwidth, config.margin) if config.prescreen else None
    values = [prepare_values(r, config) for r in records]
    fits = parallel_map(functools.partial(_fit_one, config=config), values, config.threads)

    pvalues = []
    stationary = False
    if config.pretest:
        limit = len(records) if config.pretest_max_series is None else config.pretest_max_series
        # interleave the classes so both are represented in a subsample
        order = [k for pair in zip(range(len(xs)), range(len(xs), len(records))) for k in pair]
        order += [k for k in range(len(records)) if k not in set(order)]
        stationary = True
        for k in order[:max(limit, 0)]:
            p = _pretest_one((values[k], fits[k], config, config.seed + k))
            pvalues.append({"series_id": records[k].id, "p_value": p})
            if p < config.pretest_level:
                stationary = False
                break

    if stationary:
        return _train_fallback(records, values, config, profile, pvalues, len(xs), len(ys))

    D = [lag_features(f, config.grid_size) for f in fits]
    b_star_x = pooled_min_order([f.b for f in fits[:len(xs)]])
    b_star_y = pooled_min_order([f.b for f in fits[len(xs):]])
    feats = []
    for k, (rec, fit) in enumerate(zip(records, fits)):
        b_star = b_star_x if k < len(xs) else b_star_y
        S, rng = aggregate_feature(D[k], fit.b, b_star)
        feats.append(FeatureSet(rec.id, fit.b, D[k], S, rng, c=fit.c, label=rec.label))
    S_x = [f.S for f in feats[:len(xs)]]
    S_y = [f.S for f in feats[len(xs):]]
    choice = select_threshold(S_x, S_y, config.M)
    return TrainedClassifier(
        mode=Mode.NONSTATIONARY, config=config,
        S_bar_x=class_median(S_x), S_bar_y=class_median(S_y),
        threshold=choice.threshold, orientation=choice.orientation,
        C1=choice.C1, C2=choice.C2, pooled_b_star=min(b_star_x, b_star_y),
        b_star_x=b_star_x, b_star_y=b_star_y,
        training_accuracy=choice.training_accuracy, mean_profile=profile,
        pretest_pvalues=pvalues, n_x=len(xs), n_y=len(ys), training_features=feats)


def _train_fallback(records, values, config, profile, pvalues, n_x, n_y) -> TrainedClassifier:
    orders = [_stationary_order(v, config.b_grid) for v in values]
    b_max = max(config.b_grid)
    table_x = _stationary_table(values[:n_x], b_max)
    table_y = _stationary_table(values[n_x:], b_max)
    b_star_max = max(orders)
    feats = [FeatureSet(r.id, b, np.zeros(b), 0.0, (b, b), c=1, label=r.label)
             for r, b in zip(records, orders)]
    return TrainedClassifier(
        mode=Mode.STATIONARY_FALLBACK, config=config,
        stationary_phi_x=table_x[b_star_max - 1], stationary_phi_y=table_y[b_star_max - 1],
        b_star_max=b_star_max, stationary_table={"X": table_x, "Y": table_y},
        mean_profile=profile, pretest_pvalues=pvalues, n_x=n_x, n_y=n_y,
        training_features=feats)


def series_feature(model: TrainedClassifier, record) -> tuple[FeatureSet, ArFit]:
    """Aggregated feature of a new series against a trained model.

    The aggregation window uses the series' own order ``b_z`` and the pooled
    training order, capped at ``b_z`` when the series selects fewer lags.
    """
    config = model.config
    z = prepare_values(record, config)
    fit = _fit_one(z, config)
    D = lag_features(fit, config.grid_size)
    b_star = min(model.pooled_b_star, fit.b)
    S, rng = aggregate_feature(D, fit.b, b_star)
    sid = getattr(record, "id", "z")
    return FeatureSet(sid, fit.b, D, S, rng, c=fit.c, label=getattr(record, "label", None)), fit


def predict(model: TrainedClassifier, record) -> Prediction:
    """Assign a label to one series."""
    sid = getattr(record, "id", "z")
    if model.mean_profile is not None:
        label = mean_prescreen(model.mean_profile, record)
        if label is not None:
            return Prediction(sid, label, model.mode, "prescreen")
    config = model.config
    if model.mode is Mode.NONSTATIONARY:
        feat, fit = series_feature(model, record)
        label = assign(feat.S, model.threshold, model.orientation)
        return Prediction(sid, label, model.mode, "threshold", S_z=feat.S, b=fit.b, c=fit.c)

    z = prepare_values(record, config)
    b_z = _stationary_order(z, config.b_grid)
    b_star = max(model.b_star_max, b_z)
    phi_z = _constant_coefficients(z, b_star)
    s_xz = float(np.linalg.norm(phi_z - np.asarray(model.stationary_table["X"][b_star - 1])))
    s_yz = float(np.linalg.norm(phi_z - np.asarray(model.stationary_table["Y"][b_star - 1])))
    tie = s_xz == s_yz
    label = "X" if s_xz <= s_yz else "Y"
    return Prediction(sid, label, model.mode, "fallback", b=b_star, c=1,
                      S_xz=s_xz, S_yz=s_yz, tie=tie)
