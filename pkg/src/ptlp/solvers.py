"""Exact OT / OPT solvers for empirical measures with unit masses.

With unit masses the optimal plans are induced by partial permutations, so
both problems reduce to linear assignment. For OPT a matched pair ``(i, j)``
pays ``c_ij`` and every unmatched point pays ``lam``; a pair costing at least
``2 * lam`` is never worth matching, which is what makes the reductions below
exact.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .signal import TransportPlan

__all__ = ["solve_ot", "solve_opt", "brute_force_opt", "truncate", "check_cost"]

BRUTE_FORCE_CAP = 6


def check_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError(f"cost must be a 2D matrix, got shape {c.shape}")
    if c.size and not np.all(np.isfinite(c)):
        raise ValueError("cost matrix has non-finite entries")
    if c.size and c.min() < 0:
        raise ValueError("cost matrix has negative entries")
    return c


def truncate(cost, lam: float) -> np.ndarray:
    """Cap every entry at ``2 * lam``."""
    return np.minimum(check_cost(cost), 2.0 * lam)


def solve_ot(cost) -> TransportPlan:
    """Minimum-cost perfect matching for a square cost matrix."""
    c = check_cost(cost)
    m, n = c.shape
    if m != n:
        raise ValueError(
            f"balanced OT needs equal sizes, got {m} x {n}; use solve_opt for unequal masses"
        )
    rows, cols = linear_sum_assignment(c)
    total = math.fsum(c[rows, cols].tolist())
    pairs = tuple((int(i), int(j), 1.0) for i, j in zip(rows, cols))
    return TransportPlan(pairs, 0.0, 0.0, total, (m, n))


def _plan_from_matching(c, rows, cols, lam) -> TransportPlan:
    m, n = c.shape
    keep = c[rows, cols] < 2.0 * lam
    rows, cols = rows[keep], cols[keep]
    order = np.argsort(rows, kind="stable")
    rows, cols = rows[order], cols[order]
    matched = len(rows)
    unmatched = (m - matched) + (n - matched)
    total = math.fsum(c[rows, cols].tolist()) + lam * unmatched
    pairs = tuple((int(i), int(j), 1.0) for i, j in zip(rows, cols))
    return TransportPlan(pairs, float(m - matched), float(n - matched), total, (m, n))


def solve_opt(cost, lam: float, *, method: str = "compact") -> TransportPlan:
    """Exact optimal partial transport with creation/destruction penalty ``lam``.

    ``method="compact"`` solves a rectangular assignment on
    ``min(c - 2 lam, 0)``: any pair assigned at weight 0 is treated as
    unmatched. ``method="augmented"`` builds the square ``(M+N) x (M+N)``
    problem with one dummy per point (real-dummy cost ``lam``, dummy-dummy
    cost 0). Both return the same optimal value.
    """
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lambda must be a finite real > 0, got {lam}")
    c = check_cost(cost)
    m, n = c.shape
    if m == 0 or n == 0:
        return TransportPlan((), float(m), float(n), lam * (m + n), (m, n))
    if method == "compact":
        rows, cols = linear_sum_assignment(np.minimum(c - 2.0 * lam, 0.0))
    elif method == "augmented":
        big = np.zeros((m + n, n + m))
        big[:m, :n] = np.minimum(c, 2.0 * lam)
        big[:m, n:] = lam
        big[m:, :n] = lam
        r, s = linear_sum_assignment(big)
        real = (r < m) & (s < n)
        rows, cols = r[real], s[real]
    else:
        raise ValueError(f"unknown method {method!r}")
    return _plan_from_matching(c, rows, cols, lam)


def brute_force_opt(cost, lam: float) -> float:
    """Minimum OPT objective by enumerating every partial one-to-one matching.

    Test oracle only; sizes are capped at 6 x 6.
    """
    c = check_cost(cost)
    m, n = c.shape
    if m > BRUTE_FORCE_CAP or n > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force is capped at {BRUTE_FORCE_CAP} points per side")
    best = math.inf
    used = [False] * n

    def visit(i: int, acc: float, matched: int) -> None:
        nonlocal best
        if i == m:
            best = min(best, acc + lam * (m + n - 2 * matched))
            return
        visit(i + 1, acc, matched)
        for j in range(n):
            if not used[j]:
                used[j] = True
                visit(i + 1, acc + c[i, j], matched + 1)
                used[j] = False

    visit(0, 0.0, 0)
    return best
