"""Pairwise distances, Gram matrices and mean-centering.

All reductions go through numpy's contiguous-axis reductions (pairwise
summation), and every output entry is produced by the same fixed sequence of
operations, so results do not depend on how rows are blocked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AlreadyCentered, DataError, DegenerateRepresentation, NonFiniteInput

# Upper bound on the size of the (rows, N, d) scratch block used when forming
# pairwise row differences or products.
_BLOCK_ELEMENTS = 1 << 22


class Family(str, enum.Enum):
    LINEAR = "linear"
    GAUSSIAN = "gaussian"
    EUCLIDEAN = "euclidean"


class Centering(str, enum.Enum):
    NONE = "none"
    COLUMN = "column"
    ROW = "row"
    DOUBLE = "double"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus centering mode.

    ``bandwidth`` is the Gaussian bandwidth in units of the median pairwise
    distance of the representation; it must be ``None`` for the other
    families.
    """

    family: Family
    bandwidth: float | None = None
    centering: Centering = Centering.COLUMN
    median_includes_diagonal: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "centering", Centering(self.centering))
        if self.family is Family.GAUSSIAN:
            if self.bandwidth is None or not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
                raise DataError(f"gaussian kernel needs a positive bandwidth, got {self.bandwidth!r}")
            object.__setattr__(self, "bandwidth", float(self.bandwidth))
        elif self.bandwidth is not None:
            raise DataError(f"{self.family.value} kernel takes no bandwidth")

    @classmethod
    def linear(cls, centering: Centering | str = Centering.COLUMN) -> KernelSpec:
        return cls(Family.LINEAR, None, Centering(centering))

    @classmethod
    def euclidean(cls, centering: Centering | str = Centering.COLUMN) -> KernelSpec:
        return cls(Family.EUCLIDEAN, None, Centering(centering))

    @classmethod
    def gaussian(
        cls,
        sigma: float,
        centering: Centering | str = Centering.COLUMN,
        median_includes_diagonal: bool = False,
    ) -> KernelSpec:
        return cls(Family.GAUSSIAN, sigma, Centering(centering), median_includes_diagonal)

    def with_centering(self, centering: Centering | str) -> KernelSpec:
        return replace(self, centering=Centering(centering))

    def describe(self) -> str:
        if self.family is Family.GAUSSIAN:
            return f"gaussian(sigma={self.bandwidth:g})"
        return self.family.value


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """N x d real matrix, one example per row."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DataError(f"feature matrix must be 2-D, got shape {arr.shape}")
        n, d = arr.shape
        if n < 2 or d < 1:
            raise DataError(f"feature matrix needs N >= 2 rows and d >= 1 columns, got {n}x{d}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise NonFiniteInput(f"non-finite entry at row {bad[0]}, column {bad[1]}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def as_features(x: FeatureMatrix | np.ndarray) -> FeatureMatrix:
    return x if isinstance(x, FeatureMatrix) else FeatureMatrix(x)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    dist: np.ndarray
    median: float
    diameter: float
    median_includes_diagonal: bool = False

    @property
    def squared(self) -> np.ndarray:
        return self.dist * self.dist


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """N x N kernel matrix tagged with the kernel that produced it.

    ``scale`` is the largest magnitude of the matrix that was (or would be)
    centered; it is the reference for deciding that a centered matrix is
    numerically zero.  ``shifted`` optionally holds ``values - c`` for some
    constant ``c`` computed without cancellation (Gaussian kernels keep
    ``expm1`` of the exponent here); centering removes constants, so
    :func:`center` prefers it.
    """

    values: np.ndarray
    spec: KernelSpec
    source_median: float | None = None
    scale: float | None = None
    shifted: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DataError(f"gram matrix must be square, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)
        if self.scale is None:
            base = vals if self.shifted is None else self.shifted
            object.__setattr__(self, "scale", float(np.max(np.abs(base))) if base.size else 0.0)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _block_rows(n: int, d: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(1, n * d))


def squared_distances(x: FeatureMatrix | np.ndarray) -> np.ndarray:
    """Squared Euclidean distances from explicit row differences."""
    data = as_features(x).data
    n, d = data.shape
    out = np.empty((n, n))
    step = _block_rows(n, d)
    for start in range(0, n, step):
        diff = data[start : start + step, None, :] - data[None, :, :]
        out[start : start + step] = np.sum(diff * diff, axis=-1)
    return out


def _inner_products(data: np.ndarray) -> np.ndarray:
    n, d = data.shape
    out = np.empty((n, n))
    step = _block_rows(n, d)
    for start in range(0, n, step):
        out[start : start + step] = np.sum(data[start : start + step, None, :] * data[None, :, :], axis=-1)
    return out


def median_distance(dist: np.ndarray, include_diagonal: bool = False) -> float:
    """Median pairwise distance.

    By default the median runs over the off-diagonal entries (each unordered
    pair once, which gives the same median as counting both orders).  With
    ``include_diagonal`` all N^2 entries, zeros included, are used.
    """
    if include_diagonal:
        return float(np.median(dist))
    iu = np.triu_indices(dist.shape[0], k=1)
    return float(np.median(dist[iu]))


def pairwise_distances(
    x: FeatureMatrix | np.ndarray, median_includes_diagonal: bool = False
) -> DistanceMatrix:
    sq = squared_distances(x)
    dist = np.sqrt(sq)
    return DistanceMatrix(
        dist=dist,
        median=median_distance(dist, median_includes_diagonal),
        diameter=float(np.max(dist)),
        median_includes_diagonal=median_includes_diagonal,
    )


def _column_means(a: np.ndarray) -> np.ndarray:
    # transpose to make the reduced axis contiguous, so numpy sums pairwise
    return np.ascontiguousarray(a.T).sum(axis=1) / a.shape[0]


def _row_means(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a).sum(axis=1) / a.shape[1]


def _center_values(values: np.ndarray, mode: Centering) -> np.ndarray:
    if mode is Centering.NONE:
        return values.copy()
    if mode is Centering.COLUMN:
        return values - _column_means(values)[None, :]
    if mode is Centering.ROW:
        return values - _row_means(values)[:, None]
    # double: column-center, then row-center the result (H K H)
    cols = values - _column_means(values)[None, :]
    return cols - _row_means(cols)[:, None]


def center(g: GramMatrix, mode: Centering | str) -> GramMatrix:
    """Mean-center an uncentered Gram matrix.

    Column centering subtracts column means (``H K``), row centering
    subtracts row means (``K H``), double centering gives ``H K H``.
    """
    mode = Centering(mode)
    if g.spec.centering is not Centering.NONE:
        raise AlreadyCentered(f"gram matrix is already {g.spec.centering.value}-centered")
    base = g.shifted if g.shifted is not None else g.values
    return GramMatrix(
        values=_center_values(base, mode),
        spec=g.spec.with_centering(mode),
        source_median=g.source_median,
        scale=g.scale,
    )


def gaussian_from_squared(
    sq: np.ndarray, median: float, spec: KernelSpec
) -> GramMatrix:
    """Gaussian Gram matrix from precomputed squared distances.

    The bandwidth is ``spec.bandwidth`` times ``median``.
    """
    if median <= 0:
        raise DegenerateRepresentation("median pairwise distance is zero (all rows coincide)")
    width = median * spec.bandwidth
    arg = -sq / (2.0 * width * width)
    shifted = np.expm1(arg)
    raw = GramMatrix(
        values=np.exp(arg),
        spec=spec.with_centering(Centering.NONE),
        source_median=median,
        shifted=shifted,
    )
    if spec.centering is Centering.NONE:
        return raw
    return center(raw, spec.centering)


def gram(x: FeatureMatrix | np.ndarray, spec: KernelSpec) -> GramMatrix:
    """Gram matrix of ``x`` for ``spec``, centered per ``spec.centering``."""
    fm = as_features(x)
    if spec.family is Family.LINEAR:
        raw = GramMatrix(_inner_products(fm.data), spec.with_centering(Centering.NONE))
    elif spec.family is Family.EUCLIDEAN:
        raw = GramMatrix(squared_distances(fm), spec.with_centering(Centering.NONE))
    else:
        sq = squared_distances(fm)
        median = median_distance(np.sqrt(sq), spec.median_includes_diagonal)
        return gaussian_from_squared(sq, median, spec)
    if spec.centering is Centering.NONE:
        return raw
    return center(raw, spec.centering)
