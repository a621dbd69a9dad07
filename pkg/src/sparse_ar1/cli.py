"""Command-line front end.

Subcommands: ``precision``, ``simulate``, ``condsim``, ``logpdf``, ``bench``.
Exit codes: 0 success, 2 invalid input, 3 unreadable or unwritable files.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import re
import sys

import numpy as np

from . import bench
from .core import Ar1Params, TimeGrid, ValidationError, build_precision
from .density import log_density
from .sampling import ConditionalProblem, make_rng, sample_conditional, sample_unconditional

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

_SEED_MAX = 2**64 - 1


class InputError(ValidationError):
    pass


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _numbers_from_text(text: str, what: str) -> list[str]:
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    # tolerate a single header token such as "time" or "mean"
    if tokens:
        try:
            float(tokens[0])
        except ValueError:
            tokens = tokens[1:]
    if not tokens:
        raise InputError(f"{what}: no values given")
    return tokens


def parse_float_list(spec: str, what: str) -> np.ndarray:
    """Inline comma list or ``@file``."""
    text = _read_text(spec[1:]) if spec.startswith("@") else spec
    try:
        return np.array([float(t) for t in _numbers_from_text(text, what)])
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from None


def parse_times(spec: str, what: str = "times") -> TimeGrid:
    """Inline comma list, ``@file``, or an inclusive ``start:end`` range."""
    range_match = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", spec)
    if range_match:
        start, end = int(range_match[1]), int(range_match[2])
        if end < start:
            raise InputError(f"{what}: empty range {spec}")
        return TimeGrid(np.arange(start, end + 1, dtype=np.int64))
    text = _read_text(spec[1:]) if spec.startswith("@") else spec
    try:
        return TimeGrid([int(t) for t in _numbers_from_text(text, what)])
    except ValueError as exc:
        raise InputError(f"{what}: times must be integers ({exc})") from None


def parse_mean(spec: str | None, m: int):
    if spec is None:
        return 0.0
    if spec.startswith("@"):
        values = parse_float_list(spec, "mean")
        if values.size != m:
            raise InputError(f"mean: file has {values.size} values, expected {m}")
        return values
    try:
        return float(spec)
    except ValueError:
        raise InputError(f"mean: not a number: {spec!r}") from None


def read_observations(path: str) -> tuple[TimeGrid, np.ndarray]:
    """CSV with a header row and columns ``time,value``."""
    reader = csv.DictReader(io.StringIO(_read_text(path)))
    fields = [f.strip().lower() for f in reader.fieldnames or []]
    if "time" not in fields or "value" not in fields:
        raise InputError(f"{path}: header must contain 'time' and 'value' columns")
    reader.fieldnames = fields
    times, values = [], []
    for line, row in enumerate(reader, start=2):
        try:
            times.append(int(row["time"]))
            values.append(float(row["value"]))
        except (TypeError, ValueError):
            raise InputError(f"{path}: bad row at line {line}") from None
    if not times:
        raise InputError(f"{path}: no observations")
    order = np.argsort(times, kind="stable")
    return TimeGrid(np.asarray(times)[order]), np.asarray(values)[order]


def parse_seed(seed: str | None) -> tuple[int, bool]:
    """Returns ``(seed, generated)``; a missing seed is drawn from system entropy."""
    if seed is None:
        return int(np.random.SeedSequence().entropy) & _SEED_MAX, True
    try:
        value = int(seed)
    except ValueError:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed!r}") from None
    if not 0 <= value <= _SEED_MAX:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return value, False


def _params(args) -> Ar1Params:
    return Ar1Params(args.rho, args.sigma)


def _fmt(x: float) -> str:
    return repr(float(x))


def _rng(args):
    seed, generated = parse_seed(args.seed)
    if generated:
        print(f"seed: {seed}", file=sys.stderr)
    return make_rng(seed)


def _write_draws(out, times: np.ndarray, draws: np.ndarray) -> None:
    """``draws`` has shape (n_draws, len(times)); one output row per time."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["time"] + [f"draw_{j + 1}" for j in range(draws.shape[0])])
    for i, t in enumerate(times):
        writer.writerow([int(t)] + [_fmt(v) for v in draws[:, i]])


def cmd_precision(args, out) -> None:
    q = build_precision(_params(args), parse_times(args.times))
    if args.format == "json":
        json.dump(q.to_json(), out)
        out.write("\n")
        return
    if args.format != "csv":
        raise InputError(f"precision supports --format json or csv, not {args.format}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["i", "j", "value"])
    for i in range(q.dim):
        if i > 0:
            writer.writerow([i, i - 1, _fmt(q.offdiag[i - 1])])
        writer.writerow([i, i, _fmt(q.diag[i])])
        if i + 1 < q.dim:
            writer.writerow([i, i + 1, _fmt(q.offdiag[i])])


def _check_draws(n: int) -> int:
    if n < 1:
        raise InputError("--draws must be at least 1")
    return n


def cmd_simulate(args, out) -> None:
    params = _params(args)
    grid = parse_times(args.times)
    mean = parse_mean(args.mean, grid.m)
    n = _check_draws(args.draws)
    draws = sample_unconditional(params, grid, mean, _rng(args), size=n)
    _write_draws(out, grid.times, draws)


def cmd_condsim(args, out) -> None:
    params = _params(args)
    grid_o, x_o = read_observations(args.obs_file)
    grid_p = parse_times(args.pred_times, "pred-times")
    if args.mean is not None and args.mean.startswith("@"):
        raise InputError("condsim accepts only a constant --mean")
    mean = parse_mean(args.mean, 1)
    problem = ConditionalProblem(params, grid_o, grid_p, x_o, mean_o=mean, mean_p=mean)
    n = _check_draws(args.draws)
    draws = sample_conditional(problem, _rng(args), size=n)
    if not args.summary:
        _write_draws(out, grid_p.times, draws)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["time", "mean", "q025", "q975"])
    lo, hi = np.percentile(draws, [2.5, 97.5], axis=0)
    for i, t in enumerate(grid_p.times):
        writer.writerow([int(t), _fmt(draws[:, i].mean()), _fmt(lo[i]), _fmt(hi[i])])


def cmd_logpdf(args, out) -> None:
    grid = parse_times(args.times)
    x = parse_float_list(args.x, "x")
    if x.size != grid.m:
        raise InputError(f"x has {x.size} values but there are {grid.m} times")
    value = log_density(_params(args), grid, parse_mean(args.mean, grid.m), x)
    out.write(f"{value:.15g}\n")


def cmd_bench(args, out) -> None:
    try:
        sizes = [int(float(s)) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"--sizes: expected a comma list of sizes, got {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise InputError("--sizes must list positive sizes")
    seed, _ = parse_seed(args.seed if args.seed is not None else "0")
    rows = bench.run_benchmark(
        sizes, params=_params(args), dense_cap=args.dense_cap, seed=seed,
        warmup=args.warmup, repeat=args.repeat,
    )
    out.write(bench.format_table(rows, args.format))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-ar1",
        description="Sparse precision tools for irregularly sampled Gaussian AR(1) processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, rho_required=True):
        p.add_argument("--rho", type=float, required=rho_required, default=0.8,
                       help="correlation parameter, |rho| < 1")
        p.add_argument("--sigma", type=float, default=1.0, help="innovation standard deviation")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = sub.add_parser("precision", help="export the tridiagonal precision matrix")
    common(p)
    p.add_argument("--times", required=True, help="comma list, @file, or start:end")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_precision)

    p = sub.add_parser("simulate", help="unconditional draws, one CSV row per time")
    common(p)
    p.add_argument("--times", required=True)
    p.add_argument("--mean", help="constant or @file with one value per time")
    p.add_argument("--seed", help="unsigned 64-bit seed; drawn and reported if omitted")
    p.add_argument("--draws", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("condsim", help="conditional draws at prediction times")
    common(p)
    p.add_argument("--obs-file", required=True, help="CSV with header time,value")
    p.add_argument("--pred-times", required=True)
    p.add_argument("--mean", help="constant process mean")
    p.add_argument("--seed")
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--summary", action="store_true",
                   help="emit per-time mean and 2.5/97.5 percentiles instead of draws")
    p.set_defaults(func=cmd_condsim)

    p = sub.add_parser("logpdf", help="log-density of a vector of values")
    common(p)
    p.add_argument("--times", required=True)
    p.add_argument("--x", required=True, help="comma list or @file")
    p.add_argument("--mean")
    p.set_defaults(func=cmd_logpdf)

    p = sub.add_parser("bench", help="sparse vs dense timing table")
    common(p, rho_required=False)
    p.add_argument("--sizes", default="1e3,1e4,1e5,1e6")
    p.add_argument("--dense-cap", type=int, default=2000)
    p.add_argument("--format", choices=["csv", "md"], default="csv")
    p.add_argument("--seed")
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--repeat", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with contextlib.ExitStack() as stack:
            out = sys.stdout
            if args.output:
                out = stack.enter_context(open(args.output, "w", encoding="utf-8", newline=""))
            args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
