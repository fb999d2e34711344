"""HSIC, CKA and non-centered kernel alignment over Gram matrices."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .kernels import Centering, GramMatrix, KernelSpec
from .errors import AlreadyCentered, CenteringMismatch, DimensionMismatch, ZeroSelfSimilarity

# A self-similarity trace at or below this fraction of N^2 * scale^2 is
# treated as zero (constant representation after centering).
ZERO_SELF_SIMILARITY_RTOL = 1e-15


class Kind(str, enum.Enum):
    HSIC = "hsic"
    CKA = "cka"
    NON_CENTERED_ALIGNMENT = "non_centered_alignment"


@dataclass(frozen=True)
class AlignmentValue:
    value: float
    kind: Kind
    kernel_k: KernelSpec
    kernel_l: KernelSpec
    n: int

    def __float__(self) -> float:
        return self.value

    def reported(self) -> float:
        """Value for display; similarity measures are clamped to [-1, 1]."""
        if self.kind is Kind.HSIC:
            return self.value
        return min(1.0, max(-1.0, self.value))


def trace_product(a: np.ndarray, b: np.ndarray) -> float:
    """tr(A B) as a double sum over entries, symmetric in (A, B) bit for bit."""
    p = a * b.T
    # p + p.T is the same array whichever argument comes first
    return float(np.sum(p + p.T)) / 2.0


def _check_pair(k: GramMatrix, l: GramMatrix) -> None:
    if k.n != l.n:
        raise DimensionMismatch(f"gram matrices have sizes {k.n} and {l.n}")
    if k.spec.centering is not l.spec.centering:
        raise CenteringMismatch(
            f"centering differs: {k.spec.centering.value} vs {l.spec.centering.value}"
        )


def hsic(kbar: GramMatrix, lbar: GramMatrix) -> AlignmentValue:
    """tr(K̄ L̄) / (N - 1)^2.

    Both matrices must share a centering mode; with ``Centering.NONE`` this
    is the same trace on the raw matrices.
    """
    _check_pair(kbar, lbar)
    n = kbar.n
    value = trace_product(kbar.values, lbar.values) / (n - 1) ** 2
    return AlignmentValue(value, Kind.HSIC, kbar.spec, lbar.spec, n)


def _self_trace(g: GramMatrix) -> float:
    t = trace_product(g.values, g.values)
    if t <= ZERO_SELF_SIMILARITY_RTOL * g.n**2 * g.scale**2:
        raise ZeroSelfSimilarity(
            f"{g.spec.describe()} gram matrix has zero self-similarity after centering"
        )
    return t


def _normalized(k: GramMatrix, l: GramMatrix) -> float:
    cross = trace_product(k.values, l.values)
    tk = _self_trace(k)
    tl = _self_trace(l)
    # the (N - 1)^2 factors cancel
    return cross / math.sqrt(tk * tl)


def cka(k: GramMatrix, l: GramMatrix) -> AlignmentValue:
    """HSIC(K, L) / sqrt(HSIC(K, K) HSIC(L, L))."""
    _check_pair(k, l)
    return AlignmentValue(_normalized(k, l), Kind.CKA, k.spec, l.spec, k.n)


def non_centered_alignment(k: GramMatrix, l: GramMatrix) -> AlignmentValue:
    """tr(K L) / sqrt(tr(K K) tr(L L)) on uncentered matrices."""
    for g in (k, l):
        if g.spec.centering is not Centering.NONE:
            raise AlreadyCentered("non-centered alignment takes uncentered gram matrices")
    if k.n != l.n:
        raise DimensionMismatch(f"gram matrices have sizes {k.n} and {l.n}")
    return AlignmentValue(_normalized(k, l), Kind.NON_CENTERED_ALIGNMENT, k.spec, l.spec, k.n)
