"""1NN classification, cross-validated (beta, lambda) search and the slice reference direction."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.model_selection import StratifiedKFold

from ..signal import GroundCostParams, lift
from ..sliced import DEFAULT_SLICES, sample_slices, slice_lambda_schedule
from .datasets import LabeledDataset
from .pairwise import LAMBDA_METHODS, DistanceConfig, pairwise_matrix

__all__ = [
    "DEFAULT_BETA_GRID",
    "GridSearchReport",
    "knn_1",
    "accuracy",
    "leave_one_out_accuracy",
    "lifted_radius",
    "default_lambda_grid",
    "principal_direction",
    "grid_search",
]

DEFAULT_BETA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4)
BETA_METHODS = ("tlp", "stlp", "ptlp", "sptlp")


def knn_1(distances, train_labels) -> list:
    """Label of the nearest training item for each row; ties go to the lowest index."""
    d = np.atleast_2d(np.asarray(distances, dtype=np.float64))
    if d.shape[1] == 0:
        raise ValueError("empty training set")
    if d.shape[1] != len(train_labels):
        raise ValueError("distance columns and training labels differ in length")
    return [train_labels[k] for k in np.argmin(d, axis=1)]


def accuracy(predicted, truth) -> float:
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth) or not truth:
        raise ValueError("need equally long, non-empty label lists")
    return sum(p == t for p, t in zip(predicted, truth)) / len(truth)


def leave_one_out_accuracy(matrix, labels) -> float:
    """1NN accuracy where each item is classified by all the others."""
    d = np.array(matrix, dtype=np.float64)
    np.fill_diagonal(d, np.inf)
    return accuracy(knn_1(d, list(labels)), labels)


def _pooled_lift(dataset: LabeledDataset, params: GroundCostParams) -> np.ndarray:
    return np.vstack([lift(s, params) for s in dataset.signals])


def lifted_radius(dataset: LabeledDataset, params: GroundCostParams) -> float:
    """Largest distance from the centroid of all lifted samples."""
    pts = _pooled_lift(dataset, params)
    return float(np.max(np.linalg.norm(pts - pts.mean(axis=0), axis=1)))


def default_lambda_grid(dataset: LabeledDataset, params: GroundCostParams, size: int = 10) -> list:
    """``size`` evenly spaced penalties from 0.1 up to the lifted-cloud radius."""
    return np.linspace(0.1, lifted_radius(dataset, params), size).tolist()


def principal_direction(
    dataset: LabeledDataset,
    params: GroundCostParams,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Leading principal axis of the pooled lifted samples, restricted to the value block.

    Power iteration on the centred covariance; the position coordinates are
    then zeroed, the vector renormalized, and the sign chosen so that the
    largest-magnitude coordinate is positive.
    """
    if len(dataset) < 2:
        raise ValueError("need at least two signals")
    pts = _pooled_lift(dataset, params)
    centred = pts - pts.mean(axis=0)
    cov = centred.T @ centred / pts.shape[0]
    scale = np.trace(cov)
    if not scale > 0:
        raise ValueError("lifted samples have zero variance")
    v = np.random.default_rng(0).standard_normal(cov.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            raise ValueError("power iteration hit the null space")
        w /= norm
        if np.linalg.norm(w - v) <= tol:
            v = w
            break
        v = w
    d = dataset.signals[0].dim
    v = v.copy()
    v[:d] = 0.0
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ValueError("principal direction lies entirely in the position block")
    v /= norm
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


@dataclass(frozen=True)
class GridSearchReport:
    method: str
    beta_grid: list
    lambda_grid: list  # one row of candidate lambdas per beta
    cv_scores: list  # mean fold accuracy, indexed [beta][lambda]
    best_beta: float | None
    best_lambda: float | None
    best_score: float
    folds: int
    seed: int | None
    theta0: list | None = None

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            if isinstance(x, list):
                return [enc(y) for y in x]
            return x

        return {k: enc(v) for k, v in asdict(self).items()}


def _cv_accuracy(matrix: np.ndarray, labels: list, splits) -> float:
    scores = []
    for train, test in splits:
        pred = knn_1(matrix[np.ix_(test, train)], [labels[i] for i in train])
        scores.append(accuracy(pred, [labels[i] for i in test]))
    return float(np.mean(scores))


def grid_search(
    dataset: LabeledDataset,
    method: str = "ptlp",
    beta_grid=None,
    lambda_grid=None,
    folds: int = 5,
    seed: int | None = 0,
    p: float = 2.0,
    slices: int = DEFAULT_SLICES,
    threads: int = 1,
) -> GridSearchReport:
    """Stratified k-fold 1NN accuracy over a (beta, lambda) grid.

    The default lambda row for each beta is ``default_lambda_grid``; a given
    ``lambda_grid`` is shared by every beta. For ``sptlp`` the lambda is the
    penalty of the reference slice (the principal direction) and is spread
    over the random slices by ``slice_lambda_schedule``. Methods without a
    beta or lambda get a single ``None`` entry on that axis. Ties keep the
    first (beta, lambda) in grid order.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    labels = list(dataset.labels)
    counts = {c: labels.count(c) for c in set(labels)}
    small = [c for c, n in counts.items() if n < folds]
    if small:
        raise ValueError(f"classes {small} have fewer than {folds} members")
    if len(counts) < 2:
        raise ValueError("grid search needs at least two classes")
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    splits = list(splitter.split(np.zeros(len(labels)), labels))

    uses_beta = method in BETA_METHODS
    uses_lambda = method in LAMBDA_METHODS
    betas = list(beta_grid if beta_grid is not None else DEFAULT_BETA_GRID) if uses_beta else [None]
    lam_rows, scores = [], []
    best = (-1.0, None, None)
    theta_best = None
    dim = dataset.signals[0].dim + dataset.signals[0].channels
    for beta in betas:
        base = GroundCostParams(p=p, beta=1.0 if beta is None else beta)
        if not uses_lambda:
            lams = [None]
        elif lambda_grid is not None:
            lams = list(lambda_grid)
        elif base.beta_is_symbolic:
            raise ValueError("the default lambda grid needs a finite beta")
        else:
            lams = default_lambda_grid(dataset, base)
        theta0 = principal_direction(dataset, base) if method == "sptlp" else None
        row = []
        for lam in lams:
            params = base if lam is None else base.replace(lam=lam)
            slice_set = None
            if method in ("stlp", "sptlp"):
                slice_set = sample_slices(slices, dim, seed)
                if method == "sptlp":
                    slice_set = slice_lambda_schedule(theta0, lam, slice_set)
            config = DistanceConfig(method, params, slice_set)
            matrix = pairwise_matrix(dataset, config, threads=threads, seed=seed).values
            score = _cv_accuracy(matrix, labels, splits)
            row.append(score)
            if score > best[0]:
                best = (score, beta, lam)
                theta_best = theta0
        lam_rows.append(lams)
        scores.append(row)
    return GridSearchReport(
        method=method,
        beta_grid=betas,
        lambda_grid=lam_rows,
        cv_scores=scores,
        best_beta=best[1],
        best_lambda=best[2],
        best_score=best[0],
        folds=folds,
        seed=seed,
        theta0=None if theta_best is None else theta_best.tolist(),
    )
