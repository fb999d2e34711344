"""Large-bandwidth behaviour of Gaussian CKA.

Sweeps Gaussian CKA over a grid of log2 bandwidths, compares it with linear
CKA, fits the tail slope of the log2 relative difference, extrapolates the
1/sigma^2 asymptote back from the largest bandwidth and locates the
convergence onset.  Also computes representation eccentricity.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .alignment import cka
from .errors import DataError, DegenerateRepresentation, InsufficientTail, ZeroLinearCKA
from .kernels import (
    Centering,
    FeatureMatrix,
    KernelSpec,
    as_features,
    gaussian_from_squared,
    gram,
    median_distance,
    squared_distances,
)

DEFAULT_GRID: tuple[float, ...] = tuple(float(p) for p in range(-4, 9))
DEFAULT_THRESHOLD = 0.25
DEFAULT_TAIL_POINTS = 4
# |CKA_G - CKA_lin| below this fraction of CKA_lin is roundoff
PRECISION_FLOOR = 1e-13
ZERO_LINEAR_CKA = 1e-12

Curve = Sequence[tuple[float, "float | None"]]


@dataclass(frozen=True)
class GeometryReport:
    diam_x: float
    median_x: float
    diam_y: float
    median_y: float

    @property
    def rho_x(self) -> float:
        return self.diam_x / self.median_x

    @property
    def rho_y(self) -> float:
        return self.diam_y / self.median_y

    @property
    def rho(self) -> float:
        return max(self.rho_x, self.rho_y)


def _diam_and_median(x: FeatureMatrix, include_diagonal: bool) -> tuple[float, float]:
    dist = np.sqrt(squared_distances(x))
    med = median_distance(dist, include_diagonal)
    if med <= 0:
        raise DegenerateRepresentation("median pairwise distance is zero (all rows coincide)")
    return float(np.max(dist)), med


def eccentricity(
    x: FeatureMatrix | np.ndarray,
    y: FeatureMatrix | np.ndarray,
    median_includes_diagonal: bool = False,
) -> GeometryReport:
    """Diameters, median distances and eccentricity of a representation pair.

    The eccentricity is the larger of diam/median over the two
    representations; it is 1 exactly when all pairwise distances agree.
    """
    dx, mx = _diam_and_median(as_features(x), median_includes_diagonal)
    dy, my = _diam_and_median(as_features(y), median_includes_diagonal)
    return GeometryReport(dx, mx, dy, my)


@dataclass(frozen=True)
class SweepConfig:
    """Bandwidth sweep settings.

    With ``fixed_kernel`` unset both representations get Gaussian kernels;
    the second one uses bandwidth ``bandwidth_ratio * sigma``.  With
    ``fixed_kernel`` set, only X gets a Gaussian kernel and Y keeps the fixed
    kernel throughout.  The baseline is linear CKA in place of each Gaussian
    kernel.
    """

    log2_sigmas: tuple[float, ...] = DEFAULT_GRID
    centering: Centering = Centering.COLUMN
    fixed_kernel: KernelSpec | None = None
    bandwidth_ratio: float = 1.0
    threshold: float = DEFAULT_THRESHOLD
    tail_points: int = DEFAULT_TAIL_POINTS
    median_includes_diagonal: bool = False

    def __post_init__(self) -> None:
        grid = tuple(float(g) for g in self.log2_sigmas)
        object.__setattr__(self, "log2_sigmas", grid)
        object.__setattr__(self, "centering", Centering(self.centering))
        if len(grid) < 4:
            raise DataError(f"bandwidth grid needs at least 4 points, got {len(grid)}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DataError("bandwidth grid must be strictly increasing")
        if not self.bandwidth_ratio > 0:
            raise DataError("bandwidth ratio must be positive")
        if self.fixed_kernel is not None and self.fixed_kernel.family.value == "gaussian":
            raise DataError("fixed kernel must be linear or euclidean")
        if self.tail_points < 2:
            raise DataError("tail fit needs at least 2 points")

    @property
    def anchor_log2_sigma(self) -> float:
        return self.log2_sigmas[-1]


@dataclass(frozen=True)
class SweepPoint:
    log2_sigma: float
    cka_gaussian: float
    cka_linear: float
    rel_diff: float
    below_floor: bool

    @property
    def log_rel_diff(self) -> float | None:
        """log2 relative difference, or None below the precision floor."""
        if self.below_floor:
            return None
        return math.log2(self.rel_diff)


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    cka_linear: float
    tail_slope: float | None
    onset_log2_sigma: float | None
    anchor_log2_sigma: float | None
    anchor_rel_diff: float | None
    config: SweepConfig = field(repr=False)

    @property
    def onset_reached(self) -> bool:
        return self.onset_log2_sigma is not None

    def curve(self) -> list[tuple[float, float | None]]:
        return [(p.log2_sigma, p.log_rel_diff) for p in self.points]


def predicted_asymptote(r8: float, log2_sigma: float, anchor: float = 8.0) -> float:
    """log2 relative difference on the 1/sigma^2 line through the anchor."""
    return math.log2(r8) - 2.0 * (log2_sigma - anchor)


def tail_slope(curve: Curve, tail_points: int = DEFAULT_TAIL_POINTS) -> float:
    """Least-squares slope over the last ``tail_points`` finite entries."""
    finite = [(s, v) for s, v in curve if v is not None and math.isfinite(v)]
    if len(finite) < tail_points or tail_points < 2:
        raise InsufficientTail(
            f"need {tail_points} finite points for the tail fit, have {len(finite)}"
        )
    xs = np.array([s for s, _ in finite[-tail_points:]])
    ys = np.array([v for _, v in finite[-tail_points:]])
    dx = xs - xs.mean()
    return float(np.sum(dx * (ys - ys.mean())) / np.sum(dx * dx))


def convergence_onset(
    curve: Curve,
    r8: float | None,
    threshold: float = DEFAULT_THRESHOLD,
    anchor: float | None = None,
) -> float | None:
    """Smallest grid log2 sigma from which the curve tracks the asymptote.

    A point tracks the asymptote when its log2 relative difference is within
    ``threshold`` of :func:`predicted_asymptote`.  Points with value ``None``
    (below the precision floor) count as tracking.  Returns ``None`` when
    convergence is not reached: no tracking suffix exists, or it holds no
    finite point below the anchor, since the anchor matches its own
    extrapolation by construction.
    """
    if not curve:
        raise DataError("empty curve")
    if anchor is None:
        anchor = curve[-1][0]
    ok = []
    for s, v in curve:
        if v is None:
            ok.append(True)
        elif r8 is None or not r8 > 0:
            ok.append(False)
        else:
            ok.append(abs(v - predicted_asymptote(r8, s, anchor)) < threshold)
    start = len(curve)
    while start > 0 and ok[start - 1]:
        start -= 1
    if start == 0:
        return curve[0][0]
    if not any(v is not None and s < anchor for s, v in curve[start:]):
        return None
    return curve[start][0]


def _relative(g: float, lin: float) -> tuple[float, bool]:
    diff = abs(g - lin)
    return diff / lin, diff < PRECISION_FLOOR * lin


def sweep(
    x: FeatureMatrix | np.ndarray,
    y: FeatureMatrix | np.ndarray,
    cfg: SweepConfig | None = None,
    workers: int = 1,
) -> SweepResult:
    """Gaussian-vs-linear CKA over the bandwidth grid of ``cfg``."""
    cfg = cfg or SweepConfig()
    fx, fy = as_features(x), as_features(y)
    if fx.n != fy.n:
        raise DataError(f"representations have {fx.n} and {fy.n} rows")
    lin = KernelSpec.linear(cfg.centering)
    other = lin if cfg.fixed_kernel is None else cfg.fixed_kernel.with_centering(cfg.centering)
    cka_lin = cka(gram(fx, lin), gram(fy, other)).value
    if cka_lin <= ZERO_LINEAR_CKA:
        raise ZeroLinearCKA(f"linear CKA is {cka_lin!r}; relative difference undefined")

    diag = cfg.median_includes_diagonal
    sqx = squared_distances(fx)
    medx = median_distance(np.sqrt(sqx), diag)
    if cfg.fixed_kernel is None:
        sqy = squared_distances(fy)
        medy = median_distance(np.sqrt(sqy), diag)
        fixed = None
    else:
        fixed = gram(fy, other)

    def evaluate(log2_sigma: float) -> SweepPoint:
        sigma = 2.0**log2_sigma
        k = gaussian_from_squared(sqx, medx, KernelSpec.gaussian(sigma, cfg.centering, diag))
        if fixed is None:
            spec_l = KernelSpec.gaussian(sigma * cfg.bandwidth_ratio, cfg.centering, diag)
            l = gaussian_from_squared(sqy, medy, spec_l)
        else:
            l = fixed
        value = cka(k, l).value
        rel, floor = _relative(value, cka_lin)
        return SweepPoint(log2_sigma, value, cka_lin, rel, floor)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(evaluate, cfg.log2_sigmas))
    else:
        points = tuple(evaluate(s) for s in cfg.log2_sigmas)

    finite = [p for p in points if not p.below_floor]
    anchor = finite[-1] if finite else None
    curve = [(p.log2_sigma, p.log_rel_diff) for p in points]
    try:
        slope = tail_slope(curve, cfg.tail_points)
    except InsufficientTail:
        slope = None
    onset = convergence_onset(
        curve,
        anchor.rel_diff if anchor else None,
        cfg.threshold,
        anchor.log2_sigma if anchor else None,
    )
    return SweepResult(
        points=points,
        cka_linear=cka_lin,
        tail_slope=slope,
        onset_log2_sigma=onset,
        anchor_log2_sigma=anchor.log2_sigma if anchor else None,
        anchor_rel_diff=anchor.rel_diff if anchor else None,
        config=cfg,
    )
