"""Linear-time factorization and solves for bandwidth-1 matrices.

The recurrences are inherently sequential, so they run as small numba
kernels. Right-hand sides may be a vector of length ``m`` or a matrix of
shape ``(m, n)`` holding ``n`` independent columns.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .core import BandLowerBi, NotPositiveDefiniteError, TridiagSym, ValidationError

__all__ = [
    "band_cholesky",
    "back_substitute",
    "forward_substitute",
    "quadratic_form",
    "log_det_from_chol",
    "tridiag_matvec",
]


@njit(cache=True)
def _cholesky_kernel(qd, qo, ld, ls):
    m = qd.shape[0]
    for j in range(m):
        v = qd[j]
        if j > 0:
            v -= ls[j - 1] * ls[j - 1]
        if not v > 0.0:
            return j, v
        root = math.sqrt(v)
        ld[j] = root
        if j + 1 < m:
            ls[j] = qo[j] / root
    return -1, 0.0


@njit(cache=True)
def _back_kernel(ld, ls, z, v):
    m, n = z.shape
    for c in range(n):
        v[m - 1, c] = z[m - 1, c] / ld[m - 1]
    for i in range(m - 2, -1, -1):
        for c in range(n):
            v[i, c] = (z[i, c] - ls[i] * v[i + 1, c]) / ld[i]


@njit(cache=True)
def _forward_kernel(ld, ls, b, w):
    m, n = b.shape
    for c in range(n):
        w[0, c] = b[0, c] / ld[0]
    for i in range(1, m):
        for c in range(n):
            w[i, c] = (b[i, c] - ls[i - 1] * w[i - 1, c]) / ld[i]


@njit(cache=True)
def _quadratic_kernel(qd, qo, d):
    m = d.shape[0]
    total = qd[m - 1] * d[m - 1] * d[m - 1]
    for i in range(m - 1):
        total += d[i] * (qd[i] * d[i] + 2.0 * qo[i] * d[i + 1])
    return total


def band_cholesky(q: TridiagSym) -> BandLowerBi:
    """Lower bidiagonal ``L`` with ``L @ L.T == Q``.

    Column ``j`` takes pivot ``Q[j, j] - L[j, j-1]**2`` and scales the
    column by its square root; the last column has no subdiagonal entry.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is not strictly positive. ``err.index`` is the column.
    """
    ld = np.empty(q.dim)
    ls = np.empty(q.dim - 1)
    j, pivot = _cholesky_kernel(q.diag, q.offdiag, ld, ls)
    if j >= 0:
        raise NotPositiveDefiniteError(int(j), float(pivot))
    return BandLowerBi(ld, ls)


def _as_columns(l: BandLowerBi, rhs, name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(rhs, dtype=np.float64)
    if arr.ndim not in (1, 2) or arr.shape[0] != l.dim:
        raise ValidationError(
            f"{name} has shape {arr.shape}, expected ({l.dim},) or ({l.dim}, n)"
        )
    vector = arr.ndim == 1
    return np.ascontiguousarray(arr.reshape(l.dim, -1)), vector


def back_substitute(l: BandLowerBi, z) -> np.ndarray:
    """Solve ``L.T @ v = z`` from the last row upward."""
    zz, vector = _as_columns(l, z, "z")
    v = np.empty_like(zz)
    _back_kernel(l.diag, l.subdiag, zz, v)
    return v[:, 0] if vector else v


def forward_substitute(l: BandLowerBi, b) -> np.ndarray:
    """Solve ``L @ w = b`` from the first row downward."""
    bb, vector = _as_columns(l, b, "b")
    w = np.empty_like(bb)
    _forward_kernel(l.diag, l.subdiag, bb, w)
    return w[:, 0] if vector else w


def _check_last_axis(q: TridiagSym, d, name: str) -> np.ndarray:
    arr = np.asarray(d, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != q.dim:
        raise ValidationError(f"{name} has length {arr.shape[-1:] or 0}, expected {q.dim}")
    return arr


def quadratic_form(q: TridiagSym, d) -> float | np.ndarray:
    """``d.T @ Q @ d`` using only the two stored bands.

    ``d`` may carry leading batch dimensions; the form is taken over the
    last axis.
    """
    d = _check_last_axis(q, d, "d")
    if d.ndim == 1:
        return float(_quadratic_kernel(q.diag, q.offdiag, np.ascontiguousarray(d)))
    out = np.sum(q.diag * d * d, axis=-1) + 2.0 * np.sum(
        q.offdiag * d[..., :-1] * d[..., 1:], axis=-1
    )
    return float(out) if np.ndim(out) == 0 else out


def tridiag_matvec(q: TridiagSym, w) -> np.ndarray:
    """``Q @ w`` along the last axis of ``w``."""
    w = _check_last_axis(q, w, "w")
    y = q.diag * w
    y[..., :-1] += q.offdiag * w[..., 1:]
    y[..., 1:] += q.offdiag * w[..., :-1]
    return y


def log_det_from_chol(l: BandLowerBi) -> float:
    """``sum(log(diag(L)))``, i.e. half the log-determinant of ``L @ L.T``."""
    return float(np.sum(np.log(l.diag)))
