"""Plain-text feature matrix files.

One example per line, comma-separated decimals, ``#`` comment lines and
blank lines ignored, UTF-8.  With ``header=True`` the first line is skipped.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .kernels import FeatureMatrix


def parse_matrix(text: str, header: bool = False, source: str | None = None) -> FeatureMatrix:
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if header and lineno == 1:
            continue
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in stripped.split(",")]
        except ValueError as exc:
            raise ParseError(f"not a number: {exc}", lineno, source) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError("non-finite value", lineno, source)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"expected {width} values, found {len(row)}", lineno, source)
        rows.append(row)
    if len(rows) < 2:
        raise ParseError("need at least two rows", None, source)
    return FeatureMatrix(np.array(rows))


def read_matrix(path: str | Path, header: bool = False) -> FeatureMatrix:
    path = Path(path)
    return parse_matrix(path.read_text(encoding="utf-8"), header=header, source=str(path))


def format_matrix(x: FeatureMatrix | np.ndarray) -> str:
    data = x.data if isinstance(x, FeatureMatrix) else np.asarray(x)
    # repr() round-trips doubles exactly
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in data)


def write_matrix(path: str | Path, x: FeatureMatrix | np.ndarray, comment: str | None = None) -> None:
    text = format_matrix(x)
    if comment:
        text = "".join(f"# {c}\n" for c in comment.splitlines()) + text
    Path(path).write_text(text, encoding="utf-8")
