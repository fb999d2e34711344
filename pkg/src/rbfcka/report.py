"""Sweep reports: assembly across runs, JSON/CSV/text serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .asymptotics import GeometryReport, SweepConfig, SweepResult, convergence_onset, eccentricity, sweep, tail_slope
from .errors import DataError, InsufficientTail
from .stats import QUANTILE_METHOD, RunSummary, summarize

SCHEMA = "rbfcka.sweep-report/1"


@dataclass(frozen=True)
class SweepRow:
    log2_sigma: float
    cka_gaussian_mean: float
    cka_gaussian_se: float
    cka_linear_mean: float
    cka_linear_se: float
    rel_diff_mean: float
    log_rel_diff_mean: float | None
    log_rel_diff_se: float | None
    finite_runs: int
    below_precision_floor: bool


@dataclass(frozen=True)
class InstanceRow:
    run: int
    seed: int | None
    rho: float
    diam_x: float
    median_x: float
    diam_y: float
    median_y: float
    tail_slope: float | None
    onset_log2_sigma: float | None
    onset_reached: bool


@dataclass(frozen=True)
class Report:
    metadata: dict
    sweep_table: list[SweepRow]
    instances: list[InstanceRow]
    rho: RunSummary
    tail_slope: float | None
    onset_log2_sigma: float | None
    onset_reached: bool
    anchor_log2_sigma: float | None
    anchor_log_rel_diff: float | None
    schema: str = field(default=SCHEMA)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "metadata": self.metadata,
            "sweep_table": [asdict(r) for r in self.sweep_table],
            "instances": [asdict(r) for r in self.instances],
            "rho": self.rho.to_dict(),
            "tail_slope": self.tail_slope,
            "onset_log2_sigma": self.onset_log2_sigma,
            "onset_reached": self.onset_reached,
            "anchor_log2_sigma": self.anchor_log2_sigma,
            "anchor_log_rel_diff": self.anchor_log_rel_diff,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        if d.get("schema") != SCHEMA:
            raise DataError(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            metadata=d["metadata"],
            sweep_table=[SweepRow(**r) for r in d["sweep_table"]],
            instances=[InstanceRow(**r) for r in d["instances"]],
            rho=RunSummary.from_dict(d["rho"]),
            tail_slope=d["tail_slope"],
            onset_log2_sigma=d["onset_log2_sigma"],
            onset_reached=d["onset_reached"],
            anchor_log2_sigma=d["anchor_log2_sigma"],
            anchor_log_rel_diff=d["anchor_log_rel_diff"],
            schema=d["schema"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = [f.name for f in fields(SweepRow)]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for row in self.sweep_table:
            writer.writerow(["" if getattr(row, n) is None else _cell(getattr(row, n)) for n in names])
        return buf.getvalue()

    def to_text(self) -> str:
        out = []
        runs = len(self.instances)
        out.append(f"runs: {runs}")
        out.append(
            f"rho: median {self.rho.median:.4f}  mean {self.rho.mean:.4f}  "
            f"(+/- {2 * self.rho.se_equivalent:.4f} as 2 IQR/sqrt(R))"
        )
        out.append("")
        out.append(
            f"{'log2 sigma':>10}  {'CKA_G mean':>11}  {'SE':>9}  {'CKA_lin':>9}  {'SE':>9}  "
            f"{'log2 rel':>9}  {'SE':>7}"
        )
        for r in self.sweep_table:
            if r.log_rel_diff_mean is None:
                rel = f"{'floor':>9}  {'':>7}"
            else:
                rel = f"{r.log_rel_diff_mean:9.3f}  {r.log_rel_diff_se:7.3f}"
            out.append(
                f"{r.log2_sigma:10g}  {r.cka_gaussian_mean:11.6f}  {r.cka_gaussian_se:9.2e}  "
                f"{r.cka_linear_mean:9.6f}  {r.cka_linear_se:9.2e}  {rel}"
            )
        out.append("")
        slope = "n/a" if self.tail_slope is None else f"{self.tail_slope:.4f}"
        onset = f"{self.onset_log2_sigma:g}" if self.onset_reached else "not reached"
        out.append(f"tail slope: {slope}")
        out.append(f"log2 onset bandwidth: {onset}")
        return "\n".join(out) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    s = summarize(values)
    return s.mean, s.se


def config_echo(cfg: SweepConfig) -> dict:
    return {
        "log2_sigmas": list(cfg.log2_sigmas),
        "centering": cfg.centering.value,
        "fixed_kernel": None if cfg.fixed_kernel is None else cfg.fixed_kernel.family.value,
        "bandwidth_ratio": cfg.bandwidth_ratio,
        "threshold": cfg.threshold,
        "tail_points": cfg.tail_points,
        "median_includes_diagonal": cfg.median_includes_diagonal,
        "quantile_method": QUANTILE_METHOD,
    }


def build_report(
    instances: Sequence[tuple[int, int | None, Callable[[], tuple[np.ndarray, np.ndarray]]]],
    cfg: SweepConfig,
    extra_metadata: dict | None = None,
    workers: int = 1,
    timestamp: str | None = None,
) -> Report:
    """Sweep every instance and aggregate the results.

    ``instances`` holds ``(run, seed, make_pair)`` triples; ``make_pair`` is
    called inside the worker.  Results are combined in instance order, so the
    report does not depend on ``workers``.
    """
    if not instances:
        raise DataError("no instances to sweep")

    def one(item) -> tuple[SweepResult, GeometryReport]:
        _, _, make_pair = item
        x, y = make_pair()
        return sweep(x, y, cfg), eccentricity(x, y, cfg.median_includes_diagonal)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, instances))
    else:
        results = [one(item) for item in instances]

    rows = []
    for i, log2_sigma in enumerate(cfg.log2_sigmas):
        pts = [res.points[i] for res, _ in results]
        g_mean, g_se = _mean_se([p.cka_gaussian for p in pts])
        l_mean, l_se = _mean_se([p.cka_linear for p in pts])
        rel_mean = summarize([p.rel_diff for p in pts]).mean
        logs = [p.log_rel_diff for p in pts if p.log_rel_diff is not None]
        if logs:
            log_mean, log_se = _mean_se(logs)
        else:
            log_mean = log_se = None
        rows.append(
            SweepRow(
                log2_sigma=log2_sigma,
                cka_gaussian_mean=g_mean,
                cka_gaussian_se=g_se,
                cka_linear_mean=l_mean,
                cka_linear_se=l_se,
                rel_diff_mean=rel_mean,
                log_rel_diff_mean=log_mean,
                log_rel_diff_se=log_se,
                finite_runs=len(logs),
                below_precision_floor=not logs,
            )
        )

    inst_rows = [
        InstanceRow(
            run=run,
            seed=seed,
            rho=geo.rho,
            diam_x=geo.diam_x,
            median_x=geo.median_x,
            diam_y=geo.diam_y,
            median_y=geo.median_y,
            tail_slope=res.tail_slope,
            onset_log2_sigma=res.onset_log2_sigma,
            onset_reached=res.onset_reached,
        )
        for (run, seed, _), (res, geo) in zip(instances, results)
    ]

    curve = [(r.log2_sigma, r.log_rel_diff_mean) for r in rows]
    finite = [(s, v) for s, v in curve if v is not None]
    try:
        slope = tail_slope(curve, cfg.tail_points)
    except InsufficientTail:
        slope = None
    anchor_s, anchor_v = finite[-1] if finite else (None, None)
    onset = convergence_onset(
        curve, None if anchor_v is None else 2.0**anchor_v, cfg.threshold, anchor_s
    )

    metadata = {
        "version": __version__,
        "timestamp": timestamp,
        "config": config_echo(cfg),
    }
    if extra_metadata:
        metadata.update(extra_metadata)
    return Report(
        metadata=metadata,
        sweep_table=rows,
        instances=inst_rows,
        rho=summarize([g.rho for _, g in results]),
        tail_slope=slope,
        onset_log2_sigma=onset,
        onset_reached=onset is not None,
        anchor_log2_sigma=anchor_s,
        anchor_log_rel_diff=anchor_v,
    )


def is_finite_or_flagged(report: Report) -> bool:
    """Every numeric cell is finite, or None with a flag explaining it."""
    for r in report.sweep_table:
        for name in ("cka_gaussian_mean", "cka_gaussian_se", "cka_linear_mean", "cka_linear_se", "rel_diff_mean"):
            if not math.isfinite(getattr(r, name)):
                return False
        if r.log_rel_diff_mean is None and not r.below_precision_floor:
            return False
    return True
