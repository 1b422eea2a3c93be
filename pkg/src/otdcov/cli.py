"""Command-line interface: ``otdcov {test, null-table, grid, power}``.

Exit codes: 0 success, 2 invalid user input, 3 numerical or internal failure.
"""
import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from ._rng import as_rng
from .exceptions import DomainError
from .ranks_rd import build_ball_grid
from .ranks_sphere import build_sphere_grid, sphere_grid_shape
from .testkit.config import TestConfig
from .testkit.null import NullTableCache, null_distribution, write_null_table
from .testkit.power import power_study
from .testkit.run import run_test
from .testkit.samplers import SCENARIOS

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3

SILENT_NORM_TOL = 1e-6
WARN_NORM_TOL = 1e-3


class InputError(Exception):
    """Invalid user input; reported with exit code 2."""


def _warn(msg):
    print(f"otdcov: warning: {msg}", file=sys.stderr)


# dataset ingestion ------------------------------------------------------

def _column_block(header, prefix):
    cols = [i for i, name in enumerate(header) if name.strip().lower().startswith(prefix)
            and name.strip()[1:].isdigit()]
    order = sorted(cols, key=lambda i: int(header[i].strip()[1:]))
    expected = [f"{prefix}{k}" for k in range(1, len(order) + 1)]
    if [header[i].strip().lower() for i in order] != expected:
        raise InputError(f"line 1: columns must be {prefix}1..{prefix}{len(order)}")
    return order


def read_dataset(path, dx=None, dy=None):
    """Read a CSV with header ``x1..x{dx}, y1..y{dy}``; returns ``(X, Y)``.

    Errors carry the 1-based line number of the offending row.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise InputError("line 1: missing header")
    header = rows[0]
    xcols = _column_block(header, "x")
    ycols = _column_block(header, "y")
    if len(xcols) + len(ycols) != len(header):
        raise InputError("line 1: unexpected columns; expected only x1.., y1..")
    if not xcols or not ycols:
        raise InputError("line 1: need at least one x and one y column")
    if dx is not None and dx != len(xcols):
        raise InputError(f"line 1: --dx {dx} but the header has {len(xcols)} x columns")
    if dy is not None and dy != len(ycols):
        raise InputError(f"line 1: --dy {dy} but the header has {len(ycols)} y columns")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InputError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise InputError(f"line {lineno}: non-numeric field") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"line {lineno}: non-finite value")
        values.append(vals)
    if not values:
        raise InputError("no data rows")
    data = np.array(values)
    return data[:, xcols], data[:, ycols]


def normalize_directions(z, name):
    """Check unit norms: silent below 1e-6, renormalise with a warning below 1e-3."""
    norms = np.linalg.norm(z, axis=1)
    dev = np.abs(norms - 1.0)
    bad = np.flatnonzero(dev > WARN_NORM_TOL)
    if bad.size:
        i = int(bad[0])
        raise InputError(f"line {i + 2}: {name} has norm {norms[i]:.6g}, expected 1")
    flags = []
    if np.any(dev > SILENT_NORM_TOL):
        k = int(np.sum(dev > SILENT_NORM_TOL))
        _warn(f"renormalised {k} {name} row(s) with norm off by more than {SILENT_NORM_TOL}")
        flags.append(f"renormalized:{name}:{k}")
    return z / norms[:, None], flags


# helpers ----------------------------------------------------------------

def _config(args, n_null_draws=None):
    variant = getattr(args, "variant", "two-step")
    return TestConfig(space=args.space, scores_x=args.scores_x, scores_y=args.scores_y,
                      chart=getattr(args, "chart", None), variant=variant,
                      n_null_draws=args.null_draws if n_null_draws is None else n_null_draws,
                      alpha=getattr(args, "alpha", 0.05), seed=args.seed,
                      biloop_c=getattr(args, "biloop_c", 1.0))


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


def _emit(text, out):
    """Write ``text`` to ``out`` (a path) or standard output, all at once."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        path = Path(out)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None


def _parse_ints(text, name):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{name} must be a comma-separated list of integers") from None
    if not vals:
        raise InputError(f"{name} is empty")
    return vals


# commands ---------------------------------------------------------------

def cmd_test(args):
    start = time.perf_counter()
    X, Y = read_dataset(args.input, args.dx, args.dy)
    flags = []
    if args.space == "sphere":
        X, fx = normalize_directions(X, "x")
        Y, fy = normalize_directions(Y, "y")
        flags += fx + fy
    cfg = _config(args)
    cache = NullTableCache(args.null_cache) if args.null_cache else None
    report = run_test(X, Y, cfg, cache=cache)
    out = {
        "statistic": report.statistic,
        "p_value": report.p_value,
        "critical_value": _finite_or_none(report.critical_value),
        "n": report.n,
        "alpha": report.alpha,
        "reject": report.reject,
        "config": report.config,
        "fingerprint": report.fingerprint,
        "seed": report.seed,
        "n_null_draws": report.n_null_draws,
        "flags": flags + report.flags,
        "runtime_ms": round((time.perf_counter() - start) * 1000.0, 3),
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_null_table(args):
    cfg = _config(args, n_null_draws=args.draws)
    if cfg.space == "sphere" and cfg.variant == "step1_only":
        raise InputError("the step-1 spherical statistic has a data-dependent null; no table")
    dims = (args.dx, args.dy)
    draws = null_distribution(cfg, args.n, dims)
    key = cfg.null_key(args.n, *dims)
    path = Path(args.out)
    if not path.parent.exists():
        raise InputError(f"cannot write {args.out}: directory does not exist")
    try:
        write_null_table(path, draws, key)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def cmd_grid(args):
    d, n = args.d, args.n
    if args.space == "euclidean":
        if args.pole is not None:
            raise InputError("--pole only applies to --space sphere")
        grid = build_ball_grid(n, d, args.seed)
    else:
        if d < 2:
            raise InputError("sphere grids need --d >= 2")
        if args.pole is None:
            pole = np.zeros(d)
            pole[-1] = 1.0
        else:
            try:
                pole = np.array([float(v) for v in args.pole.split(",")])
            except ValueError:
                raise InputError("--pole must be comma-separated numbers") from None
            if pole.shape != (d,):
                raise InputError(f"--pole must have {d} coordinates")
            if not np.all(np.isfinite(pole)) or abs(np.linalg.norm(pole) - 1.0) > SILENT_NORM_TOL:
                raise InputError("--pole must be a unit vector")
            pole = pole / np.linalg.norm(pole)
        grid = build_sphere_grid(pole, *sphere_grid_shape(n, d), d,
                                 as_rng(args.seed, "step2-meridians", 0))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "rank_level"] + [f"c{k}" for k in range(1, d + 1)])
    for i, (rank, pt) in enumerate(zip(grid.ranks, grid.points)):
        writer.writerow([i, int(rank)] + [format(float(v), ".17g") for v in pt])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_power(args):
    if args.reps < 100:
        raise InputError("--reps must be >= 100")
    n_values = _parse_ints(args.n_list, "--n-list")
    if min(n_values) < 4:
        raise InputError("every n in --n-list must be >= 4")
    cfg = _config(args)
    kappa = math.inf if args.kappa is None else args.kappa
    rows = power_study(args.scenario, n_values, cfg, args.reps, d1=args.dx, d2=args.dy,
                       kappa=kappa, r=args.r)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["scenario", "n", "rejections", "reps", "rate", "stderr"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] if c in ("scenario", "n", "rejections", "reps")
                         else format(row[c], ".17g") for c in cols])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# parser -----------------------------------------------------------------

def _add_statistic_flags(p, *, with_alpha=True):
    p.add_argument("--space", choices=["euclidean", "sphere"], default="euclidean")
    p.add_argument("--scores-x", default="wilcoxon",
                   help="wilcoxon, van_der_waerden, sign or biloop[-<base>]")
    p.add_argument("--scores-y", default="wilcoxon")
    p.add_argument("--variant", choices=["two-step", "step1"], default="two-step")
    p.add_argument("--chart", default=None,
                   choices=["azimuthal_equidistant", "azimuthal_equidistant_normalized"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--biloop-c", type=float, default=1.0)
    if with_alpha:
        p.add_argument("--alpha", type=float, default=0.05)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="otdcov",
        description="Distribution-free rank distance covariance tests of independence.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test independence of the x and y columns of a CSV file")
    p.add_argument("--input", required=True, help="CSV with header x1..x{dx}, y1..y{dy}")
    p.add_argument("--dx", type=int, default=None)
    p.add_argument("--dy", type=int, default=None)
    _add_statistic_flags(p)
    p.add_argument("--null-draws", type=int, default=999)
    p.add_argument("--null-cache", default=None, help="directory for cached null tables")
    p.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("null-table", help="simulate and store a null table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dx", type=int, required=True)
    p.add_argument("--dy", type=int, required=True)
    _add_statistic_flags(p, with_alpha=False)
    p.add_argument("--draws", type=int, default=999)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_null_table)

    p = sub.add_parser("grid", help="write the grid used for a sample size")
    p.add_argument("--space", choices=["euclidean", "sphere"], default="euclidean")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pole", default=None, help='sphere pole as "c1,c2,..." (default e_d)')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("power", help="simulate rejection rates")
    p.add_argument("--scenario", choices=list(SCENARIOS), required=True)
    p.add_argument("--n-list", required=True, help="comma-separated sample sizes")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--dx", type=int, default=2)
    p.add_argument("--dy", type=int, default=2)
    p.add_argument("--kappa", type=float, default=None,
                   help="noise concentration of the rotation scenario (default: noiseless)")
    p.add_argument("--r", type=float, default=0.5, help="copula correlation")
    _add_statistic_flags(p)
    p.add_argument("--null-draws", type=int, default=999)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_power)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches the input-error code
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"otdcov: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"otdcov: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"otdcov: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-failure code
        print(f"otdcov: internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
