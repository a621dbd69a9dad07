"""Wall-clock comparison of the sparse pipeline against the dense baseline."""

from __future__ import annotations

import math
import os
import statistics
import time
from typing import Callable

import numpy as np

from .banded import band_cholesky
from .core import Ar1Params, TimeGrid, build_covariance, build_precision
from .density import log_density
from .oracle import dense_log_pdf
from .sampling import make_rng, sample_unconditional

__all__ = ["time_call", "random_grid", "bench_row", "run_benchmark", "format_table", "COLUMNS"]

COLUMNS = [
    "m",
    "build_precision",
    "band_cholesky",
    "log_density",
    "sample_unconditional",
    "dense_log_pdf",
    "sparse_slope",
]

# rough per-point working set of the sparse pipeline, bytes
_SPARSE_BYTES_PER_POINT = 200


def time_call(fn: Callable[[], object], *, warmup: int = 3, repeat: int = 5) -> float:
    """Median wall-clock seconds of ``fn()`` over ``repeat`` runs after ``warmup``."""
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def random_grid(m: int, rng: np.random.Generator, max_gap: int = 5) -> TimeGrid:
    gaps = rng.integers(1, max_gap + 1, size=m - 1)
    return TimeGrid(np.concatenate([[0], np.cumsum(gaps)]))


def _available_bytes() -> int | None:
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return None


def bench_row(
    m: int,
    *,
    params: Ar1Params,
    dense_cap: int,
    seed: int = 0,
    warmup: int = 3,
    repeat: int = 5,
) -> dict:
    """Timings for one size. Entries are seconds, or ``None`` when skipped."""
    row: dict = {"m": m}
    avail = _available_bytes()
    if avail is not None and m * _SPARSE_BYTES_PER_POINT > avail:
        return row | {c: None for c in COLUMNS[1:]}

    rng = make_rng(seed)
    try:
        grid = random_grid(m, rng)
        x = sample_unconditional(params, grid, 0.0, rng)
        q = build_precision(params, grid)
        row["build_precision"] = time_call(lambda: build_precision(params, grid), warmup=warmup, repeat=repeat)
        row["band_cholesky"] = time_call(lambda: band_cholesky(q), warmup=warmup, repeat=repeat)
        row["log_density"] = time_call(lambda: log_density(params, grid, 0.0, x), warmup=warmup, repeat=repeat)
        row["sample_unconditional"] = time_call(
            lambda: sample_unconditional(params, grid, 0.0, rng), warmup=warmup, repeat=repeat
        )
    except MemoryError:
        return row | {c: None for c in COLUMNS[1:]}

    row["dense_log_pdf"] = None
    if m <= dense_cap:
        try:
            def dense():
                return dense_log_pdf(0.0, build_covariance(params, grid, cap=dense_cap), x)

            row["dense_log_pdf"] = time_call(dense, warmup=min(warmup, 1), repeat=repeat)
        except MemoryError:
            pass
    return row


def run_benchmark(
    sizes,
    *,
    params: Ar1Params | None = None,
    dense_cap: int = 2000,
    seed: int = 0,
    warmup: int = 3,
    repeat: int = 5,
) -> list[dict]:
    """Benchmark each size in turn.

    ``sparse_slope`` is the log-log slope of ``log_density`` time against
    ``m`` relative to the previous measured row; values near 1 indicate
    linear scaling.
    """
    params = params or Ar1Params(0.8, 1.0)
    rows = []
    prev = None
    for m in sizes:
        row = bench_row(int(m), params=params, dense_cap=dense_cap, seed=seed, warmup=warmup, repeat=repeat)
        row["sparse_slope"] = None
        t = row.get("log_density")
        if t and prev and row["m"] != prev[0]:
            row["sparse_slope"] = math.log(t / prev[1]) / math.log(row["m"] / prev[0])
        if t:
            prev = (row["m"], t)
        rows.append(row)
    return rows


def _cell(column: str, value) -> str:
    if value is None:
        return "" if column == "sparse_slope" else "skipped"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def format_table(rows: list[dict], fmt: str = "csv") -> str:
    lines = []
    if fmt == "md":
        lines.append("| " + " | ".join(COLUMNS) + " |")
        lines.append("|" + "---|" * len(COLUMNS))
        for row in rows:
            lines.append("| " + " | ".join(_cell(c, row.get(c)) for c in COLUMNS) + " |")
    else:
        lines.append(",".join(COLUMNS))
        for row in rows:
            lines.append(",".join(_cell(c, row.get(c)) for c in COLUMNS))
    return "\n".join(lines) + "\n"
