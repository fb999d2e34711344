"""Seeded synthetic representation pairs with controllable similarity and eccentricity.

Random streams
--------------
Every matrix draws from its own PCG64 stream, seeded with
``SeedSequence([seed, stream])``:

====== =========================================
stream contents
====== =========================================
0      X, row-major, N x dX
1      mixing matrix W, row-major, dX x dY, then orthonormalized
2      noise for Y, row-major, N x dY
3      outlier direction, dX + dY entries
====== =========================================

Uniforms are ``(k + 0.5) / 2**53`` for 53-bit integers ``k`` drawn with
``Generator.integers(0, 2**53)``; standard normals are their inverse normal
CDF (``scipy.special.ndtri``).
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .errors import DataError
from .kernels import median_distance, squared_distances

STREAM_X = 0
STREAM_W = 1
STREAM_NOISE = 2
STREAM_OUTLIER = 3

_MANTISSA = 2**53


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    n: int = 200
    dx: int = 64
    dy: int = 16
    coupling: float = 0.8
    outlier_count: int = 0
    outlier_offset: float = 20.0
    nonlinearity: str = "none"

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be an unsigned 64-bit integer")
        if self.n < 4:
            raise DataError("synthetic pairs need N >= 4")
        if self.dx < 1 or self.dy < 1:
            raise DataError("feature dimensions must be positive")
        if not 0.0 <= self.coupling <= 1.0:
            raise DataError("coupling must lie in [0, 1]")
        if not 0 <= self.outlier_count < self.n:
            raise DataError("outlier count must be in [0, N)")
        if self.nonlinearity not in ("none", "relu"):
            raise DataError(f"unknown nonlinearity {self.nonlinearity!r}")

    def reseeded(self, run: int) -> SynthSpec:
        """Spec for run ``run`` of a repeated experiment (seed + run)."""
        return _replace(self, seed=(self.seed + run) % 2**64)

    def to_config(self) -> str:
        lines = ["[synth]"] + [f"{k} = {v}" for k, v in asdict(self).items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_config(cls, text: str, section: str = "synth") -> SynthSpec:
        """Parse a ``key = value`` config section."""
        parser = configparser.ConfigParser()
        parser.read_string(text)
        if not parser.has_section(section):
            raise DataError(f"config has no [{section}] section")
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in parser.items(section):
            if key not in known:
                raise DataError(f"unknown synth key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)

    @classmethod
    def from_config_file(cls, path: str | Path) -> SynthSpec:
        return cls.from_config(Path(path).read_text(encoding="utf-8"))


def _replace(spec: SynthSpec, **changes) -> SynthSpec:
    return SynthSpec(**{**asdict(spec), **changes})


def _coerce(key: str, raw: str):
    try:
        if key in ("seed", "n", "dx", "dy", "outlier_count"):
            return int(raw)
        if key in ("coupling", "outlier_offset"):
            return float(raw)
    except ValueError as exc:
        raise DataError(f"bad value for {key}: {raw!r}") from exc
    return raw.strip().lower()


def stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def standard_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    k = rng.integers(0, _MANTISSA, size=shape, dtype=np.uint64)
    u = (k.astype(np.float64) + 0.5) / _MANTISSA
    return ndtri(u)


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # elementwise products and a contiguous sum; no BLAS, so no thread-dependent rounding
    return np.sum(a[:, None, :] * np.ascontiguousarray(b.T)[None, :, :], axis=-1)


def _orthonormal(g: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt along the longer side of ``g``.

    The result is an isometry when dX <= dY and an orthogonal projection
    onto a random dY-dimensional subspace otherwise.
    """
    tall = g.shape[0] >= g.shape[1]
    q = np.array(g if tall else g.T, dtype=np.float64)
    for j in range(q.shape[1]):
        for i in range(j):
            q[:, j] -= np.sum(q[:, i] * q[:, j]) * q[:, i]
        q[:, j] /= np.sqrt(np.sum(q[:, j] * q[:, j]))
    return q if tall else np.ascontiguousarray(q.T)


def _standardize_columns(a: np.ndarray) -> np.ndarray:
    mean = a.mean(axis=0)
    sd = a.std(axis=0)
    sd[sd == 0] = 1.0
    return (a - mean) / sd


def generate_pair(spec: SynthSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw (X, Y) for ``spec``.

    X is a standard Gaussian cloud.  Y mixes a random orthonormal image of X with
    independent noise, ``coupling * X W + (1 - coupling) * noise``, and is
    column-standardized.  With ReLU both are rectified.  The first
    ``outlier_count`` rows of each are then moved, together, along one random
    direction by ``outlier_offset`` times the median pairwise distance of
    that representation.
    """
    x = standard_normal(stream(spec.seed, STREAM_X), (spec.n, spec.dx))
    w = _orthonormal(standard_normal(stream(spec.seed, STREAM_W), (spec.dx, spec.dy)))
    noise = standard_normal(stream(spec.seed, STREAM_NOISE), (spec.n, spec.dy))
    y = _standardize_columns(spec.coupling * _matmul(x, w) + (1.0 - spec.coupling) * noise)
    if spec.nonlinearity == "relu":
        x = np.maximum(x, 0.0)
        y = np.maximum(y, 0.0)
    if spec.outlier_count:
        direction = standard_normal(stream(spec.seed, STREAM_OUTLIER), (spec.dx + spec.dy,))
        x = _plant(x, direction[: spec.dx], spec.outlier_count, spec.outlier_offset)
        y = _plant(y, direction[spec.dx :], spec.outlier_count, spec.outlier_offset)
    return x, y


def _plant(a: np.ndarray, direction: np.ndarray, count: int, offset: float) -> np.ndarray:
    scale = median_distance(np.sqrt(squared_distances(a)))
    unit = direction / np.linalg.norm(direction)
    out = a.copy()
    out[:count] += offset * scale * unit
    return out
