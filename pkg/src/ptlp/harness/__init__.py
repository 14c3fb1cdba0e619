"""Experiment machinery: datasets, distance tables, 1NN and grid search."""

from .datasets import LabeledDataset, gen_separability_data, load_ucr_tsv, save_ucr_tsv
from .pairwise import (
    METHODS,
    DistanceConfig,
    DistanceMatrix,
    MethodError,
    cross_distances,
    pair_distance,
    pairwise_matrix,
)
from .protocol import (
    DEFAULT_BETA_GRID,
    GridSearchReport,
    accuracy,
    default_lambda_grid,
    grid_search,
    knn_1,
    leave_one_out_accuracy,
    lifted_radius,
    principal_direction,
)
