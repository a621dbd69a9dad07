"""Dense O(m^3) reference implementations.

This is the slow, obviously-correct path: textbook Cholesky of the dense
covariance, triangular solves, and the multivariate normal formulas built
on them. The test suite checks every sparse routine against it and the
benchmark uses it as the baseline.
"""

from __future__ import annotations

import math

import numpy as np

from .core import NotPositiveDefiniteError, ValidationError

__all__ = [
    "dense_cholesky",
    "dense_inverse",
    "dense_log_pdf",
    "dense_sample",
    "dense_conditional",
    "solve_lower",
    "solve_upper",
]

_LOG_2PI = math.log(2.0 * math.pi)


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def dense_cholesky(a) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == a`` (Cholesky-Crout, row by row).

    Raises ``NotPositiveDefiniteError`` carrying the failing pivot index, and
    ``ValidationError`` if ``a`` is not symmetric to ``1e-12`` (relative to
    its largest entry).
    """
    a = _square(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise ValidationError("matrix is not symmetric")
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0.0:
            raise NotPositiveDefiniteError(j, float(pivot))
        L[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ row) / L[j, j]
    return L


def solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution for dense lower-triangular ``L``; ``b`` may be a matrix."""
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for dense upper-triangular ``U``; ``b`` may be a matrix."""
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b)
    for i in range(U.shape[0] - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def dense_inverse(a) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    L = dense_cholesky(a)
    y = solve_lower(L, np.eye(L.shape[0]))
    return solve_upper(L.T, y)


def dense_log_pdf(mean, cov, x) -> float:
    """Multivariate normal log-density of ``x``."""
    L = dense_cholesky(cov)
    m = L.shape[0]
    mean = np.broadcast_to(np.asarray(mean, dtype=np.float64), (m,))
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m,):
        raise ValidationError(f"x has shape {x.shape}, expected ({m},)")
    w = solve_lower(L, x - mean)
    return -0.5 * m * _LOG_2PI - float(np.sum(np.log(np.diag(L)))) - 0.5 * float(w @ w)


def dense_sample(mean, cov, rng=None, *, z=None, size: int | None = None) -> np.ndarray:
    """Draw ``mean + L z`` with ``L`` the Cholesky factor of ``cov``.

    Pass ``z`` to supply the standard-normal noise directly (shape ``(m,)``
    or ``(size, m)``); otherwise it is drawn from ``rng``.
    """
    L = dense_cholesky(cov)
    m = L.shape[0]
    mean = np.broadcast_to(np.asarray(mean, dtype=np.float64), (m,))
    if z is None:
        if rng is None:
            raise ValidationError("either rng or z must be given")
        z = rng.standard_normal(m if size is None else (size, m))
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != m:
        raise ValidationError(f"z has trailing length {z.shape[-1]}, expected {m}")
    return mean + z @ L.T


def dense_conditional(mean_p, mean_o, cov_pp, cov_po, cov_oo, x_o):
    """Conditional mean and covariance of the ``p`` block given ``x_o``.

    Returns ``(mean_p + S_po S_oo^-1 (x_o - mean_o), S_pp - S_po S_oo^-1 S_op)``.
    """
    cov_po = np.atleast_2d(np.asarray(cov_po, dtype=np.float64))
    L = dense_cholesky(cov_oo)
    resid = np.asarray(x_o, dtype=np.float64) - np.asarray(mean_o, dtype=np.float64)
    alpha = solve_upper(L.T, solve_lower(L, resid))
    gain_t = solve_upper(L.T, solve_lower(L, cov_po.T))
    mu = np.asarray(mean_p, dtype=np.float64) + cov_po @ alpha
    cov = np.asarray(cov_pp, dtype=np.float64) - cov_po @ gain_t
    return mu, cov
