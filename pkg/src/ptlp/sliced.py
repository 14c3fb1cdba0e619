"""Sliced TLP / PTLP: average 1D transport over random projections of the lifted clouds."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .signal import DiscreteSignal, GroundCostParams, _check_compatible, lift

__all__ = [
    "DEFAULT_SLICES",
    "SliceSet",
    "sample_slices",
    "ot_1d",
    "opt_1d",
    "stlp",
    "sptlp",
    "per_slice_stlp",
    "per_slice_sptlp",
    "slice_lambda_schedule",
]

DEFAULT_SLICES = 50
LAMBDA_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class SliceSet:
    """``L`` unit directions in R^D with optional per-slice penalties."""

    directions: np.ndarray
    lambdas: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        dirs = np.array(self.directions, dtype=np.float64)
        if dirs.ndim != 2 or dirs.shape[0] < 1 or dirs.shape[1] < 1:
            raise ValueError("directions must be a non-empty (L, D) array")
        if not np.allclose(np.linalg.norm(dirs, axis=1), 1.0, rtol=0, atol=1e-12):
            raise ValueError("slice directions must have unit norm")
        dirs.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        if self.lambdas is not None:
            lams = np.array(self.lambdas, dtype=np.float64).reshape(-1)
            if lams.shape[0] != dirs.shape[0]:
                raise ValueError("need one lambda per slice")
            if not np.all(lams > 0) or not np.all(np.isfinite(lams)):
                raise ValueError("per-slice lambdas must be finite and > 0")
            lams.setflags(write=False)
            object.__setattr__(self, "lambdas", lams)

    @property
    def count(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def with_lambdas(self, lambdas) -> "SliceSet":
        lambdas = np.broadcast_to(np.asarray(lambdas, dtype=np.float64), (self.count,))
        return SliceSet(self.directions, lambdas, self.seed)

    def __len__(self) -> int:
        return self.count


def sample_slices(count: int = DEFAULT_SLICES, dim: int = 2, seed: int | None = 0) -> SliceSet:
    """``count`` i.i.d. directions, uniform on the sphere S^(dim-1)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if count < 1:
        raise ValueError("need at least one slice")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    while np.any(norms == 0):  # pragma: no cover - probability zero
        bad = norms[:, 0] == 0
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return SliceSet(g / norms, None, seed)


def _check_sorted(x: np.ndarray, name: str) -> None:
    if x.size > 1 and np.any(x[1:] < x[:-1]):
        raise ValueError(f"{name} must be sorted ascending")


def ot_1d(u, v, p: float) -> float:
    """Monotone coupling cost ``sum |u_i - v_i|^p`` of two sorted samples."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch ({u.shape[0]} vs {v.shape[0]})")
    _check_sorted(u, "u")
    _check_sorted(v, "v")
    return float(np.sum(np.abs(u - v) ** p))


@numba.njit(cache=True, nogil=True)
def _opt_1d_kernel(u, v, p, lam):
    m = u.shape[0]
    n = v.shape[0]
    cap = 2.0 * lam
    prev = np.empty(n + 1)
    cur = np.empty(n + 1)
    for j in range(n + 1):
        prev[j] = j * lam
    for i in range(1, m + 1):
        cur[0] = i * lam
        ui = u[i - 1]
        for j in range(1, n + 1):
            d = abs(ui - v[j - 1])
            if p == 1.0:
                c = d
            elif p == 2.0:
                c = d * d
            else:
                c = d**p
            if c > cap:
                c = cap
            best = prev[j - 1] + c
            t = prev[j] + lam
            if t < best:
                best = t
            t = cur[j - 1] + lam
            if t < best:
                best = t
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@numba.njit(cache=True, nogil=True)
def _opt_1d_batch(pu, pv, p, lams, out, start, stop):
    for s in range(start, stop):
        out[s] = _opt_1d_kernel(pu[:, s], pv[:, s], p, lams[s])


def opt_1d(u, v, p: float, lam: float, *, sort: bool = False) -> float:
    """Exact 1D optimal partial transport by an O(MN) dynamic program.

    Sorted inputs admit an optimal monotone partial matching, so
    ``dp[i][j] = min(dp[i-1][j] + lam, dp[i][j-1] + lam,
    dp[i-1][j-1] + min(|u_i - v_j|^p, 2 lam))``. Pass ``sort=True`` to sort
    unsorted input instead of rejecting it.
    """
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lambda must be a finite real > 0, got {lam}")
    u = np.ascontiguousarray(u, dtype=np.float64).reshape(-1)
    v = np.ascontiguousarray(v, dtype=np.float64).reshape(-1)
    if sort:
        u, v = np.sort(u), np.sort(v)
    else:
        _check_sorted(u, "u")
        _check_sorted(v, "v")
    return float(_opt_1d_kernel(u, v, float(p), float(lam)))


def _projections(a, b, params, slices):
    _check_compatible(a, b)
    dim = a.dim + a.channels
    if slices.dim != dim:
        raise ValueError(f"slices live in R^{slices.dim}, lifted signals in R^{dim}")
    pa = np.sort(lift(a, params) @ slices.directions.T, axis=0)
    pb = np.sort(lift(b, params) @ slices.directions.T, axis=0)
    return pa, pb


def per_slice_stlp(a, b, params: GroundCostParams, slices: SliceSet) -> np.ndarray:
    """1D OT value for each slice (length ``L``)."""
    if a.size != b.size:
        raise ValueError(f"sliced TLP needs equal sample counts, got {a.size} and {b.size}")
    pa, pb = _projections(a, b, params, slices)
    return np.sum(np.abs(pa - pb) ** params.p, axis=0)


def stlp(a: DiscreteSignal, b: DiscreteSignal, params: GroundCostParams, slices: SliceSet) -> float:
    """Monte-Carlo sliced TLP: mean 1D OT of the projected lifted signals."""
    return float(np.mean(per_slice_stlp(a, b, params, slices)))


def per_slice_sptlp(
    a, b, params: GroundCostParams, slices: SliceSet, threads: int = 1
) -> np.ndarray:
    """1D OPT value for each slice, with the slice's own lambda.

    Slices are split into contiguous chunks, one per thread; every slice
    writes its own output cell, so the result does not depend on ``threads``.
    """
    if slices.lambdas is None:
        raise ValueError("slices carry no lambdas; use with_lambdas or slice_lambda_schedule")
    pa, pb = _projections(a, b, params, slices)
    pa = np.asfortranarray(pa)
    pb = np.asfortranarray(pb)
    lams = np.ascontiguousarray(slices.lambdas)
    out = np.empty(slices.count)
    p = float(params.p)
    threads = max(1, min(int(threads), slices.count))
    if threads == 1:
        _opt_1d_batch(pa, pb, p, lams, out, 0, slices.count)
    else:
        bounds = np.linspace(0, slices.count, threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            jobs = [
                pool.submit(_opt_1d_batch, pa, pb, p, lams, out, int(s), int(e))
                for s, e in zip(bounds[:-1], bounds[1:])
            ]
            for job in jobs:
                job.result()
    return out


def sptlp(
    a: DiscreteSignal,
    b: DiscreteSignal,
    params: GroundCostParams,
    slices: SliceSet,
    threads: int = 1,
) -> float:
    """Monte-Carlo sliced PTLP: mean 1D OPT of the projected lifted signals."""
    return float(np.mean(per_slice_sptlp(a, b, params, slices, threads)))


def slice_lambda_schedule(
    theta0, lambda0: float, slices: SliceSet, *, absolute: bool = True
) -> SliceSet:
    """Per-slice penalties ``<theta, theta0> * lambda0``, floored at ``1e-6 * lambda0``.

    A ``theta0`` shorter than the slice dimension is the value block only and
    is zero-padded on the leading (position) coordinates. A slice and its
    negation project to mirror images with equal transport cost, so by default
    the absolute inner product is used; ``absolute=False`` only clamps.
    """
    if not (lambda0 > 0 and math.isfinite(lambda0)):
        raise ValueError(f"lambda0 must be a finite real > 0, got {lambda0}")
    theta0 = np.asarray(theta0, dtype=np.float64).reshape(-1)
    if theta0.shape[0] > slices.dim:
        raise ValueError("theta0 has more coordinates than the slices")
    if theta0.shape[0] < slices.dim:
        theta0 = np.concatenate([np.zeros(slices.dim - theta0.shape[0]), theta0])
    if abs(np.linalg.norm(theta0) - 1.0) > 1e-9:
        raise ValueError("theta0 must have unit norm")
    cos = slices.directions @ theta0
    if absolute:
        cos = np.abs(cos)
    lams = np.maximum(cos * lambda0, LAMBDA_FLOOR * lambda0)
    return slices.with_lambdas(lams)
