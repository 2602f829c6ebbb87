"""Closed-form risk bounds for uniform random trees and forests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RegressionModel
from .partition import expected_m12

RATE_EXPONENT = -2.0 / 3.0
FOREST_VARIANCE_FACTOR = 0.75


@dataclass(frozen=True)
class BoundSet:
    tree_variance_leading: float
    bias_bound: float
    tree_risk_bound: float
    forest_variance_leading: float
    forest_risk_bound: float
    minimax_k: int
    rate_exponent: float = RATE_EXPONENT


def minimax_k(n: int) -> int:
    """Cut count balancing variance and bias: ``k + 1 = round(n^(1/3))``."""
    return max(int(round(n ** (1.0 / 3.0))) - 1, 0)


def bounds(model: RegressionModel, n: int, k: int) -> BoundSet:
    """Leading variance terms and the bias bound ``6 M C^2 / (k+1)^2``.

    The variance entries are leading orders (``sigma^2 (k+1) / n`` for a
    tree, three quarters of it for a forest); the bias bound holds exactly
    for every ``k``.
    """
    if n < 1 or k < 0:
        raise ValueError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    tree_var = model.noise_sd ** 2 * (k + 1) / n
    bias = 6.0 * model.density_max * model.lipschitz_const ** 2 / (k + 1) ** 2
    forest_var = FOREST_VARIANCE_FACTOR * tree_var
    return BoundSet(
        tree_variance_leading=tree_var,
        bias_bound=bias,
        tree_risk_bound=tree_var + bias,
        forest_variance_leading=forest_var,
        forest_risk_bound=forest_var + bias,
        minimax_k=minimax_k(n),
    )


def rate_fit(points):
    """Least-squares fit of ``log(risk) = slope * log(n) + intercept``.

    Returns ``(slope, intercept)``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("need at least 3 (n, risk) pairs")
    if np.any(arr <= 0):
        raise ValueError("n and risk must be positive")
    slope, intercept = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)
    return float(slope), float(intercept)


def expected_n12(k: int) -> float:
    """``E[N12] = k + 1 - E[M12]``, the expected number of variance-sized
    terms bounding the covariance of two trees."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return k + 1 - expected_m12(k)
