"""Discrete multi-channel signals, the lifting map and the ground cost.

A signal is a finite set of sample positions ``x_i`` in R^d carrying channel
values ``f_i`` in R^k, each sample with unit mass. Distances between signals
are transport problems between the *lifted* clouds ``[x_i * beta^(-1/p), f_i]``
in R^(d+k), with ground cost

    c(x, f; y, g) = (1/beta) * ||x - y||_p^p + ||f - g||_p^p

which is exactly ``||lift(x, f) - lift(y, g)||_p^p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DiscreteSignal",
    "GroundCostParams",
    "TransportPlan",
    "time_grid",
    "lift",
    "ground_cost",
    "cost_matrix",
    "value_cost_matrix",
]


def _as_points(arr, name: str) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    if out.ndim == 1:
        out = out.reshape(-1, 1)
    if out.ndim != 2:
        raise ValueError(f"{name} must be a 1D or 2D array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    out.setflags(write=False)
    return out


def time_grid(length: int) -> np.ndarray:
    """Uniform grid ``i / (length - 1)`` on [0, 1]; a single sample sits at 0."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if length == 1:
        return np.zeros(1)
    return np.arange(length, dtype=np.float64) / (length - 1)


@dataclass(frozen=True, eq=False)
class DiscreteSignal:
    """Samples ``(positions[i], values[i])`` of a k-channel signal on R^d.

    1D inputs are read as ``M`` samples of a one-dimensional quantity, so
    ``DiscreteSignal([0, 1], [3, 4])`` has ``d = k = 1`` and ``M = 2``.
    """

    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pos = _as_points(self.positions, "positions")
        val = _as_points(self.values, "values")
        if pos.shape[0] != val.shape[0]:
            raise ValueError(
                f"positions and values differ in length ({pos.shape[0]} vs {val.shape[0]})"
            )
        if pos.shape[0] < 1:
            raise ValueError("a signal needs at least one sample")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_series(cls, values, positions=None) -> "DiscreteSignal":
        """Time series on the normalized grid ``time_grid(len(values))``."""
        values = np.asarray(values, dtype=np.float64)
        if positions is None:
            positions = time_grid(values.shape[0])
        return cls(positions, values)

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.size

    def same_measure(self, other: "DiscreteSignal") -> bool:
        """True when both describe the same (f, mu) pair, i.e. equal up to sample order."""
        if self.positions.shape != other.positions.shape or self.values.shape != other.values.shape:
            return False
        a = np.hstack([self.positions, self.values])
        b = np.hstack([other.positions, other.values])
        a = a[np.lexsort(a.T[::-1])]
        b = b[np.lexsort(b.T[::-1])]
        return bool(np.array_equal(a, b))

    def __repr__(self) -> str:
        return f"DiscreteSignal(M={self.size}, d={self.dim}, k={self.channels})"


@dataclass(frozen=True)
class GroundCostParams:
    """Order ``p``, position weight ``beta`` and mass penalty ``lam``.

    ``beta = 0.0`` and ``beta = math.inf`` are the symbolic limits; metric
    functions dispatch them to their closed-form limit solvers.
    ``lam`` may be left as ``None`` for balanced problems.
    """

    p: float = 2.0
    beta: float = 1.0
    lam: float | None = None

    def __post_init__(self):
        if not (self.p >= 1 and math.isfinite(self.p)):
            raise ValueError(f"p must be a finite real >= 1, got {self.p}")
        if math.isnan(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be > 0 (or the symbolic 0 / inf), got {self.beta}")
        if self.lam is not None and not (self.lam > 0 and math.isfinite(self.lam)):
            # lam = 0 makes the empty plan optimal and the distance identically 0
            raise ValueError(f"lambda must be a finite real > 0, got {self.lam}")

    @property
    def beta_is_symbolic(self) -> bool:
        return self.beta == 0 or math.isinf(self.beta)

    def require_lambda(self) -> float:
        if self.lam is None:
            raise ValueError("this distance needs a mass penalty lambda > 0")
        return self.lam

    def replace(self, **changes) -> "GroundCostParams":
        kw = {"p": self.p, "beta": self.beta, "lam": self.lam}
        kw.update(changes)
        return GroundCostParams(**kw)

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            if math.isinf(v):
                return "inf"
            return v

        return {"p": self.p, "beta": enc(self.beta), "lambda": enc(self.lam)}


@dataclass(frozen=True)
class TransportPlan:
    """Sparse partial matching: ``pairs`` holds ``(i, j, mass)`` triples."""

    pairs: tuple[tuple[int, int, float], ...]
    destroyed_mass: float
    created_mass: float
    total_cost: float
    shape: tuple[int, int] = field(default=(0, 0))

    @property
    def matched_mass(self) -> float:
        return float(sum(m for _, _, m in self.pairs))

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for i, j, m in self.pairs:
            out[i, j] += m
        return out

    def is_one_to_one(self) -> bool:
        """Masses in {0, 1} and at most one nonzero entry per row and column."""
        rows = [i for i, _, m in self.pairs if m != 0]
        cols = [j for _, j, m in self.pairs if m != 0]
        return (
            all(m in (0.0, 1.0) for _, _, m in self.pairs)
            and len(rows) == len(set(rows))
            and len(cols) == len(set(cols))
        )


def _beta_scale(params: GroundCostParams) -> float:
    if params.beta_is_symbolic:
        raise ValueError("the lifting map is undefined for symbolic beta (0 or inf)")
    return params.beta ** (-1.0 / params.p)


def lift(signal: DiscreteSignal, params: GroundCostParams) -> np.ndarray:
    """Lifted cloud of shape ``(M, d + k)``: rows ``[x_i * beta^(-1/p), f_i]``."""
    scale = _beta_scale(params)
    pos = signal.positions if params.beta == 1 else signal.positions * scale
    return np.hstack([pos, signal.values])


def ground_cost(a, b, params: GroundCostParams) -> float:
    """Cost between two samples given as ``(position, value)`` pairs."""
    xa, fa = (np.atleast_1d(np.asarray(t, dtype=np.float64)) for t in a)
    xb, fb = (np.atleast_1d(np.asarray(t, dtype=np.float64)) for t in b)
    if xa.shape != xb.shape or fa.shape != fb.shape:
        raise ValueError("dimension mismatch between the two samples")
    p = params.p
    value_part = float(np.sum(np.abs(fa - fb) ** p))
    if math.isinf(params.beta):
        return value_part
    if params.beta == 0:
        raise ValueError("ground cost is unbounded at beta = 0; use the beta-zero limit")
    return float(np.sum(np.abs(xa - xb) ** p)) / params.beta + value_part


def _pow_dist(u: np.ndarray, v: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(u[:, None, :] - v[None, :, :])
    if p == 1:
        return diff.sum(axis=-1)
    if p == 2:
        return (diff * diff).sum(axis=-1)
    return (diff**p).sum(axis=-1)


def _check_compatible(a: DiscreteSignal, b: DiscreteSignal) -> None:
    if a.dim != b.dim:
        raise ValueError(f"position dimensions differ ({a.dim} vs {b.dim})")
    if a.channels != b.channels:
        raise ValueError(f"channel counts differ ({a.channels} vs {b.channels})")


def value_cost_matrix(a: DiscreteSignal, b: DiscreteSignal, p: float) -> np.ndarray:
    """``||f_i - g_j||_p^p`` for all sample pairs (positions ignored)."""
    _check_compatible(a, b)
    return _pow_dist(a.values, b.values, p)


def cost_matrix(a: DiscreteSignal, b: DiscreteSignal, params: GroundCostParams) -> np.ndarray:
    """Dense ``M x N`` ground-cost matrix; ``beta = inf`` drops the position term."""
    _check_compatible(a, b)
    values = _pow_dist(a.values, b.values, params.p)
    if math.isinf(params.beta):
        return values
    if params.beta == 0:
        raise ValueError("ground cost is unbounded at beta = 0; use the beta-zero limit")
    return _pow_dist(a.positions, b.positions, params.p) / params.beta + values
