"""Unconditional and conditional simulation.

Unconditional draws factor the tridiagonal precision and back-substitute
standard-normal noise. Conditional draws take one joint draw on the merged
prediction/observation grid and correct it with the observed residual
(the Hoffman-Ribak construction), which costs O(km) for k prediction and
m observation times.

Every sampler accepts ``z=`` to inject the standard-normal noise directly,
which makes the noise-free paths exactly testable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .banded import back_substitute, band_cholesky, tridiag_matvec
from .core import (
    Ar1Params,
    MeanSpec,
    TimeGrid,
    ValidationError,
    build_cross_covariance,
    build_precision,
    mean_vector,
)

__all__ = [
    "make_rng",
    "sample_unconditional",
    "merge_grids",
    "ConditionalProblem",
    "sample_conditional",
]


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Seedable source of standard-normal deviates."""
    return np.random.default_rng(seed)


def _noise(rng, z, m: int, size: int | None) -> np.ndarray:
    shape = (m,) if size is None else (size, m)
    if z is None:
        if rng is None:
            raise ValidationError("either rng or z must be given")
        return rng.standard_normal(shape)
    z = np.asarray(z, dtype=np.float64)
    if z.shape != shape:
        raise ValidationError(f"z has shape {z.shape}, expected {shape}")
    return z


def sample_unconditional(
    params: Ar1Params,
    grid: TimeGrid | Sequence[int],
    mean: MeanSpec = 0.0,
    rng: np.random.Generator | None = None,
    *,
    z=None,
    size: int | None = None,
) -> np.ndarray:
    """Draw from ``Normal(mean, Q^-1)`` on ``grid``.

    Parameters
    ----------
    params, grid
        Process parameters and sample times.
    mean
        Constant or per-time mean.
    rng
        Generator supplying the noise; ignored when ``z`` is given.
    z
        Optional standard-normal noise of shape ``(m,)`` (or ``(size, m)``).
    size
        Number of independent draws. ``None`` returns a single vector.

    Returns
    -------
    numpy.ndarray
        Shape ``(m,)``, or ``(size, m)`` when ``size`` is given.
    """
    grid = TimeGrid.coerce(grid)
    mu = mean_vector(mean, grid.m)
    noise = _noise(rng, z, grid.m, size)
    chol = band_cholesky(build_precision(params, grid))
    v = back_substitute(chol, noise.T)
    return mu + v.T


def merge_grids(
    grid_p: TimeGrid | Sequence[int], grid_o: TimeGrid | Sequence[int]
) -> tuple[TimeGrid, np.ndarray]:
    """Sorted union of two disjoint grids.

    Returns ``(merged, perm)`` where ``merged.times == concat(p, o)[perm]``.
    Merged position ``j`` comes from ``grid_p`` when ``perm[j] < len(grid_p)``
    and from ``grid_o`` otherwise.
    """
    grid_p, grid_o = TimeGrid.coerce(grid_p), TimeGrid.coerce(grid_o)
    both = np.concatenate([grid_p.times, grid_o.times])
    perm = np.argsort(both, kind="stable")
    merged = both[perm]
    dup = np.flatnonzero(np.diff(merged) == 0)
    if dup.size:
        raise ValidationError(f"duplicate time {merged[dup[0]]}")
    return TimeGrid(merged), perm


@dataclass(frozen=True, eq=False)
class ConditionalProblem:
    """Observed values ``x_o`` at ``grid_o`` and the prediction times ``grid_p``."""

    params: Ar1Params
    grid_o: TimeGrid
    grid_p: TimeGrid
    x_o: np.ndarray
    mean_o: MeanSpec = 0.0
    mean_p: MeanSpec = 0.0
    merged: TimeGrid = field(init=False, repr=False)
    perm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        grid_o, grid_p = TimeGrid.coerce(self.grid_o), TimeGrid.coerce(self.grid_p)
        x_o = np.asarray(self.x_o, dtype=np.float64)
        if x_o.shape != (grid_o.m,):
            raise ValidationError(f"x_o has shape {x_o.shape}, expected ({grid_o.m},)")
        merged, perm = merge_grids(grid_p, grid_o)
        object.__setattr__(self, "grid_o", grid_o)
        object.__setattr__(self, "grid_p", grid_p)
        object.__setattr__(self, "x_o", x_o)
        object.__setattr__(self, "mean_o", mean_vector(self.mean_o, grid_o.m))
        object.__setattr__(self, "mean_p", mean_vector(self.mean_p, grid_p.m))
        object.__setattr__(self, "merged", merged)
        object.__setattr__(self, "perm", perm)

    @property
    def k(self) -> int:
        return self.grid_p.m

    @property
    def m(self) -> int:
        return self.grid_o.m


def sample_conditional(
    problem: ConditionalProblem,
    rng: np.random.Generator | None = None,
    *,
    z=None,
    size: int | None = None,
    cap: int | None = None,
) -> np.ndarray:
    """Draw ``x_p`` from its exact conditional distribution given ``x_o``.

    A joint draw ``(x*_p, x*_o)`` on the merged grid is corrected by
    ``x_p = x*_p + S_po Q_o (x_o - x*_o)``, with ``Q_o`` the tridiagonal
    precision of the observed grid and ``S_po`` the dense cross-covariance.

    ``z``, if given, is the standard-normal noise of the joint draw in
    merged-grid order, shape ``(k + m,)`` or ``(size, k + m)``. With ``z = 0``
    the result is the conditional mean. ``cap`` bounds each dimension of the
    dense cross-covariance.
    """
    p = problem
    k = p.k
    mean_cat = np.concatenate([p.mean_p, p.mean_o])
    joint = sample_unconditional(p.params, p.merged, mean_cat[p.perm], rng, z=z, size=size)

    unmerged = np.empty_like(joint)
    unmerged[..., p.perm] = joint
    xs_p, xs_o = unmerged[..., :k], unmerged[..., k:]

    q_o = build_precision(p.params, p.grid_o)
    cross = build_cross_covariance(p.params, p.grid_p, p.grid_o, cap=cap)
    w = tridiag_matvec(q_o, p.x_o - xs_o)
    return xs_p + w @ cross.T
