"""Partial transport Lp distances between multi-channel signals."""

from .baselines import dtw, lp_distance, ot_distance
from .metrics import MetricResult, ptlp, ptlp_beta_infinity, ptlp_beta_zero, tlp
from .signal import (
    DiscreteSignal,
    GroundCostParams,
    TransportPlan,
    cost_matrix,
    ground_cost,
    lift,
    time_grid,
)
from .sliced import (
    SliceSet,
    opt_1d,
    ot_1d,
    sample_slices,
    slice_lambda_schedule,
    sptlp,
    stlp,
)
from .solvers import brute_force_opt, solve_opt, solve_ot

__version__ = "0.1.0"
