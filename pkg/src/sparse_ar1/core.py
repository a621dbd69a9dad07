"""Domain types and construction of the AR(1) precision and covariance matrices.

A stationary Gaussian AR(1) process observed at strictly increasing integer
times has a tridiagonal precision matrix whose entries depend only on the
gaps between consecutive sample times. This module builds that matrix in
O(m) and, for reference and small problems, the dense covariance it inverts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numba import njit

__all__ = [
    "ValidationError",
    "NotPositiveDefiniteError",
    "Ar1Params",
    "TimeGrid",
    "TridiagSym",
    "BandLowerBi",
    "MeanSpec",
    "DEFAULT_DENSE_CAP",
    "mean_vector",
    "rho_pow",
    "one_minus_rho_pow2",
    "build_precision",
    "build_covariance",
    "build_cross_covariance",
]

DEFAULT_DENSE_CAP = 10_000


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant."""


class NotPositiveDefiniteError(ValidationError):
    """A Cholesky pivot was not strictly positive.

    ``index`` is the zero-based column at which factorization failed.
    """

    def __init__(self, index: int, pivot: float):
        self.index = index
        self.pivot = pivot
        super().__init__(
            f"matrix is not positive definite: pivot {pivot!r} at column {index}"
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _frozen_copy(values) -> np.ndarray:
    """Read-only 1-D float64 array; already-frozen float64 input is shared, not copied."""
    if isinstance(values, np.ndarray) and values.dtype == np.float64 and not values.flags.writeable:
        return values.reshape(-1)
    return _readonly(np.array(values, dtype=np.float64).reshape(-1))


@dataclass(frozen=True)
class Ar1Params:
    """Correlation ``rho`` and innovation standard deviation ``sigma``.

    ``rho = 0`` is accepted and yields independent samples.
    """

    rho: float
    sigma: float = 1.0

    def __post_init__(self):
        rho, sigma = float(self.rho), float(self.sigma)
        if not np.isfinite(rho) or not abs(rho) < 1.0:
            raise ValidationError("rho must satisfy |rho| < 1")
        if not np.isfinite(sigma) or not sigma > 0.0:
            raise ValidationError("sigma must satisfy sigma > 0")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)

    @property
    def marginal_variance(self) -> float:
        return self.sigma**2 / (1.0 - self.rho**2)


class TimeGrid:
    """Strictly increasing signed 64-bit integer sample times."""

    __slots__ = ("times",)

    def __init__(self, times: Sequence[int] | np.ndarray):
        arr = np.asarray(times)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("times must be a non-empty one-dimensional sequence")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
                raise ValidationError("times must be integers")
        elif arr.dtype.kind not in "iub":
            raise ValidationError("times must be integers")
        arr = np.array(arr, dtype=np.int64)
        if arr.size > 1:
            bad = np.flatnonzero(np.diff(arr) < 1)
            if bad.size:
                i = int(bad[0])
                raise ValidationError(
                    "times must be strictly increasing: "
                    f"times[{i}]={arr[i]} >= times[{i + 1}]={arr[i + 1]}"
                )
        self.times = _readonly(arr)

    def __len__(self) -> int:
        return self.times.size

    def __repr__(self) -> str:
        return f"TimeGrid({self.times.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeGrid):
            return NotImplemented
        return np.array_equal(self.times, other.times)

    __hash__ = None

    @property
    def m(self) -> int:
        return self.times.size

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.times)

    @classmethod
    def coerce(cls, grid: TimeGrid | Sequence[int] | np.ndarray) -> TimeGrid:
        return grid if isinstance(grid, TimeGrid) else cls(grid)


@dataclass(frozen=True, eq=False)
class TridiagSym:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.

    ``offdiag[i]`` couples positions ``i`` and ``i + 1``.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = _frozen_copy(self.diag)
        o = _frozen_copy(self.offdiag)
        if d.size == 0:
            raise ValidationError("a tridiagonal matrix needs dim >= 1")
        if o.size != d.size - 1:
            raise ValidationError(
                f"offdiag must have length dim - 1 = {d.size - 1}, got {o.size}"
            )
        if not np.all(d > 0.0):
            i = int(np.flatnonzero(~(d > 0.0))[0])
            raise ValidationError(f"diagonal entries must be positive: diag[{i}]={d[i]!r}")
        if not np.all(np.isfinite(o)) or not np.all(np.isfinite(d)):
            raise ValidationError("entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", o)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            a[idx, idx + 1] = self.offdiag
            a[idx + 1, idx] = self.offdiag
        return a

    def to_json(self) -> dict:
        return {"dim": self.dim, "diag": self.diag.tolist(), "offdiag": self.offdiag.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> TridiagSym:
        q = cls(obj["diag"], obj["offdiag"])
        if "dim" in obj and int(obj["dim"]) != q.dim:
            raise ValidationError(f"dim {obj['dim']} does not match diag length {q.dim}")
        return q


@dataclass(frozen=True, eq=False)
class BandLowerBi:
    """Lower bidiagonal matrix: ``diag`` plus ``subdiag`` (entry ``i`` sits at row ``i + 1``)."""

    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        d = _frozen_copy(self.diag)
        s = _frozen_copy(self.subdiag)
        if d.size == 0:
            raise ValidationError("a bidiagonal matrix needs dim >= 1")
        if s.size != d.size - 1:
            raise ValidationError(
                f"subdiag must have length dim - 1 = {d.size - 1}, got {s.size}"
            )
        if not np.all(d > 0.0):
            i = int(np.flatnonzero(~(d > 0.0))[0])
            raise ValidationError(f"diagonal entries must be positive: diag[{i}]={d[i]!r}")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "subdiag", s)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            a[idx + 1, idx] = self.subdiag
        return a

    def to_json(self) -> dict:
        # same wire layout as TridiagSym; "offdiag" holds the subdiagonal
        return {"dim": self.dim, "diag": self.diag.tolist(), "offdiag": self.subdiag.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> BandLowerBi:
        band = cls(obj["diag"], obj["offdiag"])
        if "dim" in obj and int(obj["dim"]) != band.dim:
            raise ValidationError(f"dim {obj['dim']} does not match diag length {band.dim}")
        return band


#: A constant mean for every time point, or one value per time point.
MeanSpec = Union[float, Sequence[float], np.ndarray]


def mean_vector(mean: MeanSpec, m: int) -> np.ndarray:
    """Expand a :data:`MeanSpec` to a length-``m`` float array."""
    arr = np.asarray(mean, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(m, float(arr))
    arr = arr.reshape(-1)
    if arr.size != m:
        raise ValidationError(f"mean has length {arr.size}, expected {m}")
    return arr


def rho_pow(rho: float, g):
    """``rho ** g`` for non-negative integer ``g`` (scalar or array).

    The sign follows the parity of ``g``; magnitudes below the float range
    underflow quietly to zero.
    """
    g_arr = np.asarray(g)
    if np.any(g_arr < 0):
        raise ValidationError("exponent must be non-negative")
    rho = float(rho)
    with np.errstate(under="ignore"):
        out = np.power(abs(rho), g_arr.astype(np.float64))
    if rho < 0.0:
        out = np.where(g_arr % 2 == 1, -out, out)
    return float(out) if out.ndim == 0 else out


def one_minus_rho_pow2(rho: float, g):
    """``1 - rho ** (2 g)`` for integer ``g >= 1``, accurate as ``|rho| -> 1``."""
    g_arr = np.asarray(g, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_abs = np.log(abs(float(rho)))
    out = -np.expm1(2.0 * g_arr * log_abs)
    return float(out) if out.ndim == 0 else out


@njit(cache=True)
def _one_minus_sq(p2, two_g_log):
    # 1 - p2 with p2 = rho^(2g); expm1 only where cancellation would bite
    if p2 > 0.5:
        return -math.expm1(two_g_log)
    return 1.0 - p2


@njit(cache=True)
def _precision_kernel(times, rho, diag, offdiag):
    m = times.shape[0]
    abs_rho = abs(rho)
    log_abs = math.log(abs_rho) if abs_rho > 0.0 else -math.inf
    base = _one_minus_sq(abs_rho * abs_rho, 2.0 * log_abs)
    prev_r = 0.0
    prev_p2 = 0.0
    for i in range(m - 1):
        g = times[i + 1] - times[i]
        a = math.pow(abs_rho, g)
        p2 = a * a
        r = base / _one_minus_sq(p2, 2.0 * g * log_abs)
        diag[i] = r + prev_p2 * prev_r
        offdiag[i] = -(a if rho >= 0.0 or g % 2 == 0 else -a) * r
        prev_r = r
        prev_p2 = p2
    diag[m - 1] = prev_r


def build_precision(params: Ar1Params, grid: TimeGrid | Sequence[int]) -> TridiagSym:
    """Tridiagonal precision matrix of the process sampled on ``grid``.

    With gaps ``g_i = t[i+1] - t[i]`` and ``r_i = (1 - rho^2) / (1 - rho^(2 g_i))``
    the nonzero entries (before division by ``sigma^2``) are::

        Q[0, 0]       = r_0
        Q[m-1, m-1]   = r_{m-2}
        Q[i, i]       = r_i + rho^(2 g_{i-1}) r_{i-1}      0 < i < m-1
        Q[i, i+1]     = -rho^(g_i) r_i

    The interior form is an exact rewrite of
    ``(1-rho^2)(1-rho^(2(g_{i-1}+g_i))) / ((1-rho^(2 g_{i-1}))(1-rho^(2 g_i)))``
    that avoids subtractive cancellation. A single time point gives the
    stationary marginal precision ``(1 - rho^2) / sigma^2``.
    """
    grid = TimeGrid.coerce(grid)
    rho, s2 = params.rho, params.sigma**2
    if grid.m == 1:
        return TridiagSym(np.array([(1.0 - rho * rho) / s2]), np.empty(0))

    diag = np.empty(grid.m)
    offdiag = np.empty(grid.m - 1)
    _precision_kernel(grid.times, rho, diag, offdiag)
    if s2 != 1.0:
        diag /= s2
        offdiag /= s2
    return TridiagSym(_readonly(diag), _readonly(offdiag))


def _check_dense_size(n: int, cap: int | None, what: str) -> None:
    cap = DEFAULT_DENSE_CAP if cap is None else cap
    if n > cap:
        raise ValidationError(
            f"{what} dimension {n} exceeds the dense-size cap {cap}; pass a larger cap to override"
        )


def build_cross_covariance(
    params: Ar1Params,
    grid_p: TimeGrid | Sequence[int],
    grid_o: TimeGrid | Sequence[int],
    *,
    cap: int | None = None,
) -> np.ndarray:
    """Dense ``k x m`` covariance between samples at ``grid_p`` and ``grid_o``.

    Entry ``(i, j)`` is ``sigma^2 / (1 - rho^2) * rho^|s_i - t_j|``. Each
    dimension is checked against the dense-size cap (default 10_000).
    """
    grid_p, grid_o = TimeGrid.coerce(grid_p), TimeGrid.coerce(grid_o)
    _check_dense_size(grid_p.m, cap, "row")
    _check_dense_size(grid_o.m, cap, "column")
    lag = np.abs(grid_p.times[:, None] - grid_o.times[None, :])
    return params.marginal_variance * rho_pow(params.rho, lag)


def build_covariance(
    params: Ar1Params, grid: TimeGrid | Sequence[int], *, cap: int | None = None
) -> np.ndarray:
    """Dense ``m x m`` covariance matrix; the O(m^2) reference object."""
    grid = TimeGrid.coerce(grid)
    return build_cross_covariance(params, grid, grid, cap=cap)
