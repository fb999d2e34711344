"""Cross-run summary statistics."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyInput, NonFiniteInput

# Q1/Q3 interpolate linearly between order statistics at rank (R - 1) p + 1.
QUANTILE_METHOD = "linear"


@dataclass(frozen=True)
class RunSummary:
    mean: float
    sd: float
    se: float
    median: float
    iqr: float
    se_equivalent: float
    runs: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunSummary:
        return cls(**d)


def summarize(values: Iterable[float]) -> RunSummary:
    """Mean, sample sd, SE = sd/sqrt(R), median, IQR and IQR/sqrt(R).

    Values are sorted first, so the result does not depend on input order.
    A single value has sd 0.
    """
    arr = np.sort(np.asarray(list(values), dtype=np.float64))
    if arr.size == 0:
        raise EmptyInput("no values to summarize")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("cannot summarize non-finite values")
    r = arr.size
    mean = float(np.mean(arr))
    sd = float(np.std(arr, ddof=1)) if r > 1 else 0.0
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method=QUANTILE_METHOD)
    iqr = float(q3 - q1)
    root = math.sqrt(r)
    return RunSummary(
        mean=mean,
        sd=sd,
        se=sd / root,
        median=float(med),
        iqr=iqr,
        se_equivalent=iqr / root,
        runs=r,
    )
