"""Purely uniformly random trees and forests for one-dimensional regression."""

from .estimators import (
    ForestEstimator,
    OracleTree,
    StepFunction,
    TreeEstimator,
    fit_forest,
    fit_tree,
    oracle_tree,
    predict_forest,
    predict_tree,
)
from .model import LearningSample, RegressionModel, catalog_model, sample
from .partition import (
    MergedPartition,
    TieError,
    UniformPartition,
    count_m12,
    crossing_probability,
    expected_m12,
    expected_m12_by_sum,
    locate,
    merge,
    sample_partition,
    spacing_moment,
)
from .experiments import m12_monte_carlo
from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSettings
from .risk import (
    CovarianceReport,
    Estimate,
    RiskReport,
    conditional_variance_eq9,
    estimate_decomposition,
    estimate_forest_decomposition,
    estimate_tree_covariance,
    expected_inverse_positive_binomial,
    fixed_partition_variance_mc,
    ise,
)
from .streams import substream
from .theory import BoundSet, bounds, expected_n12, minimax_k, rate_fit

__version__ = "0.1.0"
