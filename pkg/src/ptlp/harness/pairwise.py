"""Pairwise distance tables over signal collections."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..baselines import dtw, lp_distance, ot_distance
from ..metrics import ptlp, ptlp_beta_infinity, ptlp_beta_zero, tlp
from ..signal import DiscreteSignal, GroundCostParams
from ..sliced import DEFAULT_SLICES, SliceSet, per_slice_sptlp, sample_slices, stlp
from .datasets import LabeledDataset

__all__ = [
    "METHODS",
    "MethodError",
    "DistanceMatrix",
    "DistanceConfig",
    "pair_distance",
    "pairwise_matrix",
    "cross_distances",
]

METHODS = ("lp", "dtw", "ot", "tlp", "stlp", "ptlp", "sptlp", "ptlp_beta0", "ptlp_betainf")
LAMBDA_METHODS = ("ptlp", "sptlp", "ptlp_beta0", "ptlp_betainf")
SLICED_METHODS = ("stlp", "sptlp")


class MethodError(ValueError):
    """A distance's precondition failed for a particular pair of signals."""


@dataclass(frozen=True)
class DistanceConfig:
    """Method name plus everything it needs to evaluate one pair."""

    method: str
    params: GroundCostParams = field(default_factory=GroundCostParams)
    slices: SliceSet | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.method in LAMBDA_METHODS and self.method != "sptlp":
            self.params.require_lambda()

    def resolved(self, dim: int, seed: int | None = 0) -> "DistanceConfig":
        """Fill in default slices (and uniform lambdas) for sliced methods."""
        if self.method not in SLICED_METHODS:
            return self
        slices = self.slices or sample_slices(DEFAULT_SLICES, dim, seed)
        if self.method == "sptlp" and slices.lambdas is None:
            slices = slices.with_lambdas(self.params.require_lambda())
        return DistanceConfig(self.method, self.params, slices)

    def describe(self) -> dict:
        out = {"method": self.method, "params": self.params.to_dict()}
        if self.slices is not None:
            out["slices"] = {
                "count": self.slices.count,
                "seed": self.slices.seed,
                "lambdas": None if self.slices.lambdas is None else self.slices.lambdas.tolist(),
            }
        return out


def pair_distance(a: DiscreteSignal, b: DiscreteSignal, config: DistanceConfig) -> float:
    """Distance between two signals; transport methods report the p-th root."""
    m, prm = config.method, config.params
    root = 1.0 / prm.p
    if m == "lp":
        return lp_distance(a, b, prm.p)
    if m == "dtw":
        return dtw(a, b)
    if m == "ot":
        return ot_distance(a, b, prm.p)
    if m == "tlp":
        return tlp(a, b, prm).root_value
    if m == "ptlp":
        return ptlp(a, b, prm).root_value
    if m == "ptlp_beta0":
        return ptlp_beta_zero(a, b, prm) ** root
    if m == "ptlp_betainf":
        return ptlp_beta_infinity(a, b, prm) ** root
    if config.slices is None:
        config = config.resolved(a.dim + a.channels)
    if m == "stlp":
        return stlp(a, b, prm, config.slices) ** root
    return float(np.mean(per_slice_sptlp(a, b, prm, config.slices))) ** root


def _checked(i, j, a, b, config) -> float:
    try:
        d = pair_distance(a, b, config)
    except ValueError as exc:
        raise MethodError(f"{config.method} failed on pair ({i}, {j}): {exc}") from exc
    if not math.isfinite(d):
        raise MethodError(f"{config.method} is infinite on pair ({i}, {j})")
    return d


def _run(tasks, fn, threads: int):
    if threads <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    method: str
    params: dict
    dataset_hash: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(v) != 0):
            raise ValueError("distance matrix must have a zero diagonal")
        if not np.all(np.isfinite(v)):
            raise ValueError("distance matrix has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def metadata(self) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "dataset_hash": self.dataset_hash,
            "size": int(self.values.shape[0]),
        }

    def save(self, path) -> tuple[Path, Path]:
        """Write the matrix as CSV and its metadata to ``<path>.json``."""
        path = Path(path)
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")
        sidecar = path.with_suffix(path.suffix + ".json")
        sidecar.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return path, sidecar

    @classmethod
    def load(cls, path) -> "DistanceMatrix":
        path = Path(path)
        values = np.loadtxt(path, delimiter=",", ndmin=2)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        return cls(values, meta["method"], meta["params"], meta["dataset_hash"])


def pairwise_matrix(
    dataset: LabeledDataset,
    config: DistanceConfig,
    threads: int = 1,
    seed: int | None = 0,
) -> DistanceMatrix:
    """All pairwise distances; the upper triangle is computed and mirrored."""
    sig = dataset.signals
    config = config.resolved(sig[0].dim + sig[0].channels, seed)
    n = len(sig)
    tasks = [(i, j, sig[i], sig[j], config) for i in range(n) for j in range(i + 1, n)]
    out = np.zeros((n, n))
    for (i, j, *_), d in zip(tasks, _run(tasks, _checked, threads)):
        out[i, j] = out[j, i] = d
    return DistanceMatrix(out, config.method, config.describe(), dataset.digest())


def cross_distances(
    test: LabeledDataset | list,
    train: LabeledDataset | list,
    config: DistanceConfig,
    threads: int = 1,
    seed: int | None = 0,
) -> np.ndarray:
    """``(n_test, n_train)`` table of distances from each test to each train signal."""
    test_sig = test.signals if isinstance(test, LabeledDataset) else list(test)
    train_sig = train.signals if isinstance(train, LabeledDataset) else list(train)
    config = config.resolved(train_sig[0].dim + train_sig[0].channels, seed)
    tasks = [
        (i, j, test_sig[i], train_sig[j], config)
        for i in range(len(test_sig))
        for j in range(len(train_sig))
    ]
    vals = _run(tasks, _checked, threads)
    return np.array(vals, dtype=np.float64).reshape(len(test_sig), len(train_sig))
