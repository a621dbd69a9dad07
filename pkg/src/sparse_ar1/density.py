"""Log-density and full conditional moments in O(m)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .banded import band_cholesky, log_det_from_chol, quadratic_form
from .core import (
    Ar1Params,
    BandLowerBi,
    MeanSpec,
    TimeGrid,
    TridiagSym,
    ValidationError,
    build_precision,
    mean_vector,
    one_minus_rho_pow2,
    rho_pow,
)

__all__ = [
    "Ar1Factor",
    "log_density",
    "log_density_factored",
    "log_density_from_noise",
    "full_conditional_mean",
    "full_conditional_precision",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Ar1Factor:
    """Precision matrix and its Cholesky factor, built once and reused.

    Useful when the density is evaluated many times for fixed parameters
    and grid while only ``x`` or the mean changes.
    """

    q: TridiagSym
    l: BandLowerBi

    @classmethod
    def build(cls, params: Ar1Params, grid: TimeGrid | Sequence[int]) -> Ar1Factor:
        q = build_precision(params, grid)
        return cls(q, band_cholesky(q))

    @property
    def log_det_half(self) -> float:
        return log_det_from_chol(self.l)


def log_density_factored(factor: Ar1Factor, mean: MeanSpec, x) -> float:
    """``log p(x)`` given a prebuilt :class:`Ar1Factor`."""
    m = factor.q.dim
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m,):
        raise ValidationError(f"x has shape {x.shape}, expected ({m},)")
    d = x - (float(mean) if np.ndim(mean) == 0 else mean_vector(mean, m))
    return -0.5 * m * _LOG_2PI + factor.log_det_half - 0.5 * quadratic_form(factor.q, d)


def log_density(params: Ar1Params, grid: TimeGrid | Sequence[int], mean: MeanSpec, x) -> float:
    """Log-density of ``x`` under the process sampled on ``grid`` with the given mean.

    ``-(m/2) log(2 pi) + sum(log diag L) - (x - mu)' Q (x - mu) / 2``.
    Rebuilds ``Q`` and ``L`` on each call; see :func:`log_density_factored`
    to amortize.
    """
    return log_density_factored(Ar1Factor.build(params, grid), mean, x)


def log_density_from_noise(l: BandLowerBi, z) -> float:
    """Log-density of a sample generated from the noise vector ``z``.

    For ``x = mu + v`` with ``L.T v = z`` the quadratic form collapses to
    ``z @ z``.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (l.dim,):
        raise ValidationError(f"z has shape {z.shape}, expected ({l.dim},)")
    return -0.5 * l.dim * _LOG_2PI + log_det_from_chol(l) - 0.5 * float(z @ z)


def _check_index(i: int, m: int) -> int:
    i = int(i)
    if not 0 <= i < m:
        raise ValidationError(f"index {i} out of range for m={m}")
    return i


def full_conditional_mean(
    params: Ar1Params, grid: TimeGrid | Sequence[int], mean: MeanSpec, y, i: int
) -> float:
    """``E[Y_i | y_{-i}]`` for the zero-based position ``i``.

    Uses the closed forms for the first, interior and last positions
    directly instead of reading them off ``Q``. The value ``y[i]`` itself is
    ignored.
    """
    grid = TimeGrid.coerce(grid)
    m = grid.m
    i = _check_index(i, m)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (m,):
        raise ValidationError(f"y has shape {y.shape}, expected ({m},)")
    mu = mean_vector(mean, m)
    rho, t = params.rho, grid.times
    if m == 1:
        return float(mu[0])
    if i == 0:
        return float(mu[0] + rho_pow(rho, int(t[1] - t[0])) * (y[1] - mu[1]))
    if i == m - 1:
        return float(mu[i] + rho_pow(rho, int(t[i] - t[i - 1])) * (y[i - 1] - mu[i - 1]))

    g_prev, g_next = int(t[i] - t[i - 1]), int(t[i + 1] - t[i])
    span = one_minus_rho_pow2(rho, g_prev + g_next)
    w_prev = rho_pow(rho, g_prev) * one_minus_rho_pow2(rho, g_next) / span
    w_next = rho_pow(rho, g_next) * one_minus_rho_pow2(rho, g_prev) / span
    return float(mu[i] + w_prev * (y[i - 1] - mu[i - 1]) + w_next * (y[i + 1] - mu[i + 1]))


def full_conditional_precision(q: TridiagSym, i: int) -> float:
    """Precision of coordinate ``i`` given all others, which is ``Q[i, i]``."""
    return float(q.diag[_check_index(i, q.dim)])
