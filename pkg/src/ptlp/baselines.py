"""Reference distances for the 1NN comparison: Lp, DTW and plain OT."""

from __future__ import annotations

import math

import numba
import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from .signal import DiscreteSignal, _check_compatible, _pow_dist

__all__ = ["lp_distance", "dtw", "ot_distance"]


def lp_distance(a: DiscreteSignal, b: DiscreteSignal, p: float = 2.0) -> float:
    """``(sum_i ||f_i - g_i||_p^p)^(1/p)`` on a shared sample grid."""
    _check_compatible(a, b)
    if a.size != b.size:
        raise ValueError(
            f"Lp distance needs signals on the same grid, got lengths {a.size} and {b.size}"
        )
    return float(np.sum(np.abs(a.values - b.values) ** p)) ** (1.0 / p)


@numba.njit(cache=True, nogil=True)
def _dtw_sqeuclidean(x, y):
    n, k = x.shape
    m = y.shape[0]
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            c = 0.0
            for t in range(k):
                d = x[i - 1, t] - y[j - 1, t]
                c += d * d
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = c + best
    return acc[n, m]


def _as_sequence(x) -> np.ndarray:
    if isinstance(x, DiscreteSignal):
        return x.values
    arr = np.asarray(x, dtype=np.float64)
    return arr.reshape(-1, 1) if arr.ndim == 1 else arr


def dtw(a, b, cost=None) -> float:
    """Dynamic time warping cost between two value sequences.

    ``cost`` is the local cost between two samples and defaults to the squared
    Euclidean distance. Full DP, no window.
    """
    x, y = _as_sequence(a), _as_sequence(b)
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise ValueError("DTW needs non-empty sequences")
    if x.shape[1] != y.shape[1]:
        raise ValueError("sequences have different channel counts")
    if cost is None:
        return float(_dtw_sqeuclidean(np.ascontiguousarray(x), np.ascontiguousarray(y)))
    n, m = x.shape[0], y.shape[0]
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            acc[i, j] = cost(x[i - 1], y[j - 1]) + min(
                acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            )
    return float(acc[n, m])


def _ot_1d_weighted(u: np.ndarray, v: np.ndarray, p: float) -> float:
    # quantile coupling of two uniform empirical measures on R
    u, v = np.sort(u), np.sort(v)
    m, n = u.shape[0], v.shape[0]
    cuts = np.union1d(np.arange(1, m) / m, np.arange(1, n) / n)
    cuts = np.concatenate([[0.0], cuts, [1.0]])
    widths = np.diff(cuts)
    mids = cuts[:-1] + widths / 2
    qu = u[np.minimum((mids * m).astype(int), m - 1)]
    qv = v[np.minimum((mids * n).astype(int), n - 1)]
    return float(np.sum(widths * np.abs(qu - qv) ** p))


def ot_distance(a: DiscreteSignal, b: DiscreteSignal, p: float = 2.0) -> float:
    """p-Wasserstein distance between the value distributions, masses normalized to 1.

    Positions are ignored. Returns the p-th root of the optimal cost.
    """
    _check_compatible(a, b)
    m, n = a.size, b.size
    if m == n:
        c = _pow_dist(a.values, b.values, p)
        rows, cols = linear_sum_assignment(c)
        value = math.fsum(c[rows, cols].tolist()) / m
    elif a.channels == 1:
        value = _ot_1d_weighted(a.values[:, 0], b.values[:, 0], p)
    else:
        c = _pow_dist(a.values, b.values, p)
        eq = np.zeros((m + n, m * n))
        for i in range(m):
            eq[i, i * n : (i + 1) * n] = 1.0
        for j in range(n):
            eq[m + j, j::n] = 1.0
        rhs = np.concatenate([np.full(m, 1.0 / m), np.full(n, 1.0 / n)])
        res = linprog(c.ravel(), A_eq=eq, b_eq=rhs, bounds=(0, None), method="highs")
        if not res.success:  # pragma: no cover
            raise RuntimeError(f"OT linear program failed: {res.message}")
        value = max(float(res.fun), 0.0)
    return value ** (1.0 / p)
