"""Regressogram trees on uniform partitions, their oracle counterparts, and
forests averaging trees fitted on a common learning sample."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .model import LearningSample, RegressionModel
from .partition import UniformPartition, locate, sample_partitions
from .quadrature import DEFAULT_QUAD, QuadratureSettings, integrate_cells


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on ``[0, 1]``, value ``values[j]`` on
    ``(edges[j], edges[j+1]]``."""

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.edges.size != self.values.size + 1:
            raise ValueError("need one more edge than values")

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        j = np.searchsorted(self.edges[1:-1], xa, side="left")
        return self.values[j]

    @property
    def breakpoints(self) -> np.ndarray:
        return self.edges[1:-1]


@dataclass(frozen=True)
class TreeEstimator:
    partition: UniformPartition
    beta_hat: np.ndarray
    counts: np.ndarray

    def predict(self, x):
        return predict_tree(self, x)

    def step(self) -> StepFunction:
        return StepFunction(self.partition.edges, self.beta_hat)


@dataclass(frozen=True)
class OracleTree:
    """Best regressogram on a partition: exact cell means ``beta``, cell
    masses ``cell_probs`` and within-cell variances of ``s``."""

    partition: UniformPartition
    beta: np.ndarray
    cell_probs: np.ndarray
    cell_approx_var: np.ndarray

    def predict(self, x):
        return self.beta[locate(self.partition, x)]

    def step(self) -> StepFunction:
        return StepFunction(self.partition.edges, self.beta)


@dataclass(frozen=True)
class ForestEstimator:
    trees: List[TreeEstimator] = field(repr=False)

    def __post_init__(self):
        if not self.trees:
            raise ValueError("a forest needs at least one tree")

    @property
    def q(self) -> int:
        return len(self.trees)

    def predict(self, x):
        return predict_forest(self, x)

    def step(self) -> StepFunction:
        return average_steps([t.step() for t in self.trees])


def _cell_sums(xs, ys, cuts):
    """Per-cell counts and sums of ``ys`` for each row of ``cuts``.

    Sorting the sample once turns every cell aggregate into a difference of
    prefix sums, so ``q`` trees cost ``O(n log n + q k log n)``.
    """
    order = np.argsort(xs, kind="stable")
    xs_sorted = xs[order]
    prefix = np.concatenate(([0.0], np.cumsum(ys[order])))
    n = xs.size
    q = cuts.shape[0]
    # number of points <= cut, i.e. points in cells left of and including it
    upto = np.searchsorted(xs_sorted, cuts.ravel(), side="right").reshape(cuts.shape)
    bounds = np.concatenate(
        (np.zeros((q, 1), dtype=np.int64), upto, np.full((q, 1), n, dtype=np.int64)), axis=1
    )
    counts = np.diff(bounds, axis=1)
    sums = np.diff(prefix[bounds], axis=1)
    return counts, sums


def fit_cells(sample: LearningSample, cuts: np.ndarray):
    """Fit one tree per row of a ``(q, k)`` cut array.

    Returns ``(beta_hat, counts)``, both ``(q, k + 1)``; empty cells get 0.
    """
    cuts = np.atleast_2d(np.asarray(cuts, dtype=float))
    counts, sums = _cell_sums(sample.xs, sample.ys, cuts)
    beta_hat = np.zeros(counts.shape)
    np.divide(sums, counts, out=beta_hat, where=counts > 0)
    return beta_hat, counts


def fit_tree(sample: LearningSample, partition: UniformPartition) -> TreeEstimator:
    """Regressogram on ``partition``: the sample mean of ``ys`` in each cell."""
    if len(sample) == 0:
        raise ValueError("cannot fit on an empty sample")
    cells = locate(partition, sample.xs)
    size = partition.k + 1
    counts = np.bincount(cells, minlength=size)
    sums = np.bincount(cells, weights=sample.ys, minlength=size)
    beta_hat = np.zeros(size)
    np.divide(sums, counts, out=beta_hat, where=counts > 0)
    return TreeEstimator(partition, beta_hat, counts)


def predict_tree(tree: TreeEstimator, x):
    return tree.beta_hat[locate(tree.partition, x)]


def oracle_cells(model: RegressionModel, lo, hi, quad: QuadratureSettings = DEFAULT_QUAD):
    """Mass, conditional mean and conditional variance of ``s(X)`` on cells
    ``(lo[i], hi[i]]``.

    Returns ``(probs, beta, approx_var)``. Cells of zero mass get
    ``beta = 0`` and ``approx_var = 0``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    s, mu = model.regression_fn, model.design_density
    if model.design_cdf is not None:
        probs = model.design_cdf(hi) - model.design_cdf(lo)
    else:
        probs = integrate_cells(lambda x, _: mu(x), lo, hi, quad)
    first = integrate_cells(lambda x, _: s(x) * mu(x), lo, hi, quad)
    beta = np.zeros(lo.size)
    np.divide(first, probs, out=beta, where=probs > 0)
    second = integrate_cells(
        lambda x, ids: (s(x) - beta[ids][:, None]) ** 2 * mu(x), lo, hi, quad
    )
    approx_var = np.zeros(lo.size)
    np.divide(second, probs, out=approx_var, where=probs > 0)
    return probs, beta, approx_var


def oracle_tree(
    model: RegressionModel, partition: UniformPartition, quad: QuadratureSettings = DEFAULT_QUAD
) -> OracleTree:
    edges = partition.edges
    probs, beta, approx_var = oracle_cells(model, edges[:-1], edges[1:], quad)
    return OracleTree(partition, beta, probs, approx_var)


def fit_forest_partitions(
    sample: LearningSample, partitions: Sequence[UniformPartition]
) -> ForestEstimator:
    """Forest of trees on the given partitions, all fitted on ``sample``."""
    if len(sample) == 0:
        raise ValueError("cannot fit on an empty sample")
    cuts = np.stack([p.cuts for p in partitions])
    beta_hat, counts = fit_cells(sample, cuts)
    trees = [
        TreeEstimator(p, b, c) for p, b, c in zip(partitions, beta_hat, counts)
    ]
    return ForestEstimator(trees)


def fit_forest(sample: LearningSample, k: int, q: int, rng: np.random.Generator) -> ForestEstimator:
    """Forest of ``q`` trees on independent ``k``-cut partitions.

    No bootstrap: every tree sees the full sample; the trees differ only
    through their partitions, drawn as one ``(q, k)`` block from ``rng``.
    """
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    cuts = sample_partitions(k, q, rng)
    return fit_forest_partitions(sample, [UniformPartition(c) for c in cuts])


def predict_forest(forest: ForestEstimator, x):
    preds = [predict_tree(t, x) for t in forest.trees]
    return np.mean(preds, axis=0)


def average_steps(steps: Sequence[StepFunction]) -> StepFunction:
    """Pointwise mean of step functions, on the union of their breakpoints.

    The mean jumps by ``(values[j] - values[j-1]) / q`` at each breakpoint of
    each member, so the merged values are a cumulative sum of sorted jumps.
    """
    q = len(steps)
    if q == 1:
        return steps[0]
    cuts = np.concatenate([st.breakpoints for st in steps])
    jumps = np.concatenate([np.diff(st.values) for st in steps]) / q
    order = np.argsort(cuts, kind="stable")
    start = sum(st.values[0] for st in steps) / q
    values = start + np.concatenate(([0.0], np.cumsum(jumps[order])))
    edges = np.concatenate(([0.0], cuts[order], [1.0]))
    return StepFunction(edges, values)
