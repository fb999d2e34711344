"""Command-line interface.

Subcommands: ``cka``, ``sweep``, ``geometry``, ``synth``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import math
import sys
from pathlib import Path

from . import __version__
from .alignment import cka, hsic, non_centered_alignment
from .asymptotics import DEFAULT_TAIL_POINTS, DEFAULT_THRESHOLD, SweepConfig, eccentricity
from .errors import DataError, DegeneracyError, RowCountMismatch
from .kernels import Centering, Family, KernelSpec, gram
from .matrix_io import read_matrix, write_matrix
from .report import build_report
from .synth import SynthSpec, generate_pair

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3

CKA_SCHEMA = "rbfcka.cka/1"
GEOMETRY_SCHEMA = "rbfcka.geometry/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> tuple[float, ...]:
    """``lo:hi:step`` in log2 units, both ends inclusive."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"bad grid {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(lo + k * step for k in range(count))


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--header", action="store_true", help="skip the first line of each input file")
    p.add_argument(
        "--median-includes-diagonal",
        action="store_true",
        help="count the N zero self-distances when taking the median distance",
    )


def _add_centering(p: argparse.ArgumentParser) -> None:
    p.add_argument("--centering", choices=[c.value for c in Centering], default="column")
    p.add_argument("--no-centering", dest="centering", action="store_const", const="none")


def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("synthetic representations")
    g.add_argument("--config", type=Path, help="file with a [synth] key = value section")
    g.add_argument("--seed", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--dx", type=int)
    g.add_argument("--dy", type=int)
    g.add_argument("--coupling", type=float)
    g.add_argument("--outliers", dest="outlier_count", type=int)
    g.add_argument("--outlier-offset", type=float)
    g.add_argument("--nonlinearity", choices=["none", "relu"])


def _synth_spec(args) -> SynthSpec:
    spec = SynthSpec.from_config_file(args.config) if args.config else SynthSpec()
    overrides = {
        k: getattr(args, k)
        for k in ("seed", "n", "dx", "dy", "coupling", "outlier_count", "outlier_offset", "nonlinearity")
        if getattr(args, k) is not None
    }
    return SynthSpec(**{**spec.__dict__, **overrides})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rbfcka", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cka", help="CKA between two feature matrix files")
    p.add_argument("x", type=Path)
    p.add_argument("y", type=Path)
    p.add_argument("--kernel", choices=[f.value for f in Family], default="linear")
    p.add_argument("--sigma", type=float, default=1.0, help="gaussian bandwidth in median distances")
    p.add_argument("--kernel-y", choices=[f.value for f in Family], help="kernel for Y (default: --kernel)")
    p.add_argument("--sigma-y", type=float, help="bandwidth for Y (default: --sigma)")
    _add_centering(p)
    _add_input_flags(p)
    p.add_argument("--hsic", action="store_true", help="also print HSIC")
    p.add_argument("--alignment", action="store_true", help="also print non-centered alignment")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="Gaussian vs linear CKA over a bandwidth grid")
    p.add_argument("x", type=Path, nargs="?")
    p.add_argument("y", type=Path, nargs="?")
    p.add_argument("--grid", default="-4:8:1", help="log2 bandwidths lo:hi:step (default -4:8:1)")
    p.add_argument("--runs", type=int, default=1, help="synthetic runs; run r uses seed + r")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--tail-points", type=int, default=DEFAULT_TAIL_POINTS)
    p.add_argument("--fixed-kernel", choices=["linear", "euclidean"], help="keep this kernel on Y")
    p.add_argument("--bandwidth-ratio", type=float, default=1.0, help="Y bandwidth / X bandwidth")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timestamp", action="store_true", help="record the current time in the report")
    _add_centering(p)
    _add_input_flags(p)
    _add_synth_flags(p)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true")
    out.add_argument("--csv", action="store_true")

    p = sub.add_parser("geometry", help="diameters, median distances and eccentricity")
    p.add_argument("x", type=Path)
    p.add_argument("y", type=Path, nargs="?")
    _add_input_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("synth", help="write a synthetic representation pair to files")
    p.add_argument("--out-x", type=Path, required=True)
    p.add_argument("--out-y", type=Path, required=True)
    _add_synth_flags(p)
    return parser


def _read_pair(args):
    x = read_matrix(args.x, header=args.header)
    y = read_matrix(args.y, header=args.header) if args.y is not None else x
    if x.n != y.n:
        raise RowCountMismatch(f"{args.x} has {x.n} rows but {args.y} has {y.n}")
    return x, y


def _kernel(family: str, sigma: float, centering: str, diag: bool) -> KernelSpec:
    if family == "gaussian":
        return KernelSpec.gaussian(sigma, centering, diag)
    return KernelSpec(Family(family), None, Centering(centering))


def cmd_cka(args) -> str:
    x, y = _read_pair(args)
    diag = args.median_includes_diagonal
    spec_k = _kernel(args.kernel, args.sigma, args.centering, diag)
    spec_l = _kernel(
        args.kernel_y or args.kernel,
        args.sigma_y if args.sigma_y is not None else args.sigma,
        args.centering,
        diag,
    )
    k, l = gram(x, spec_k), gram(y, spec_l)
    values = {"cka": cka(k, l)}
    if args.hsic:
        values["hsic"] = hsic(k, l)
    if args.alignment:
        raw_k = gram(x, spec_k.with_centering("none"))
        raw_l = gram(y, spec_l.with_centering("none"))
        values["non_centered_alignment"] = non_centered_alignment(raw_k, raw_l)
    result = {name: v.value for name, v in values.items()}
    if args.json:
        doc = {
            "schema": CKA_SCHEMA,
            "n": x.n,
            "kernel_x": spec_k.describe(),
            "kernel_y": spec_l.describe(),
            "centering": args.centering,
            "median_includes_diagonal": diag,
            **result,
        }
        return json.dumps(doc, indent=2) + "\n"
    return "".join(f"{name} {v.reported():.10f}\n" for name, v in values.items())


def cmd_sweep(args) -> str:
    grid = parse_grid(args.grid)
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    fixed = None if args.fixed_kernel is None else KernelSpec(Family(args.fixed_kernel), None, Centering(args.centering))
    cfg = SweepConfig(
        log2_sigmas=grid,
        centering=args.centering,
        fixed_kernel=fixed,
        bandwidth_ratio=args.bandwidth_ratio,
        threshold=args.threshold,
        tail_points=args.tail_points,
        median_includes_diagonal=args.median_includes_diagonal,
    )
    if args.x is not None:
        if args.runs != 1:
            raise UsageError("--runs applies to synthetic inputs only")
        x, y = _read_pair(args)
        instances = [(0, None, lambda: (x.data, y.data))]
        source = {"source": "files", "x": str(args.x), "y": str(args.y if args.y is not None else args.x)}
    else:
        base = _synth_spec(args)
        instances = []
        for r in range(args.runs):
            spec = base.reseeded(r)
            instances.append((r, spec.seed, lambda spec=spec: generate_pair(spec)))
        source = {"source": "synthetic", "synth": dict(base.__dict__), "runs": args.runs, "seed_rule": "seed + run"}
    stamp = dt.datetime.now(dt.timezone.utc).isoformat() if args.timestamp else None
    report = build_report(instances, cfg, {"input": source}, workers=args.threads, timestamp=stamp)
    if args.json:
        return report.to_json()
    if args.csv:
        return report.to_csv()
    return report.to_text()


def cmd_geometry(args) -> str:
    x, y = _read_pair(args)
    geo = eccentricity(x, y, args.median_includes_diagonal)
    if args.json:
        doc = {
            "schema": GEOMETRY_SCHEMA,
            "diam_x": geo.diam_x,
            "median_x": geo.median_x,
            "rho_x": geo.rho_x,
            "diam_y": geo.diam_y,
            "median_y": geo.median_y,
            "rho_y": geo.rho_y,
            "rho": geo.rho,
        }
        return json.dumps(doc, indent=2) + "\n"
    return (
        f"X: diameter {geo.diam_x:.10g}  median {geo.median_x:.10g}  ratio {geo.rho_x:.10g}\n"
        f"Y: diameter {geo.diam_y:.10g}  median {geo.median_y:.10g}  ratio {geo.rho_y:.10g}\n"
        f"rho {geo.rho:.10f}\n"
    )


def cmd_synth(args) -> str:
    spec = _synth_spec(args)
    x, y = generate_pair(spec)
    comment = spec.to_config().strip()
    write_matrix(args.out_x, x, comment + "\n# X")
    write_matrix(args.out_y, y, comment + "\n# Y")
    return f"wrote {args.out_x} ({x.shape[0]}x{x.shape[1]}) and {args.out_y} ({y.shape[0]}x{y.shape[1]})\n"


COMMANDS = {"cka": cmd_cka, "sweep": cmd_sweep, "geometry": cmd_geometry, "synth": cmd_synth}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sys.stdout.write(COMMANDS[args.command](args))
    except UsageError as exc:
        print(f"rbfcka: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegeneracyError as exc:
        print(f"rbfcka: degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, OSError) as exc:
        print(f"rbfcka: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
