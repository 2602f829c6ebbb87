"""Monte Carlo estimation of risk, variance and bias terms for trees and
forests, the covariance between two trees sharing a sample, and the exact
conditional variance of a tree given its partition.

Every estimator runs independent replicates. Replicate ``i`` draws its
learning sample from ``substream(seed, i, 0)`` and the partition of tree
``l`` from ``substream(seed, i, l + 1)``, so results do not depend on the
number of worker threads or on the replicate count of earlier runs.
Reported means reduce the per-replicate array with numpy's pairwise sum in
replicate order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import stats

from .estimators import (
    StepFunction,
    average_steps,
    fit_cells,
    oracle_cells,
    oracle_tree,
)
from .model import RegressionModel, draw_design, draw_noise, sample
from .partition import UniformPartition, sample_partition
from .quadrature import DEFAULT_QUAD, QuadratureSettings, integrate_cells
from .streams import SAMPLE_SLOT, substream, tree_slot


class Estimate(NamedTuple):
    mean: float
    se: float

    @classmethod
    def from_values(cls, values) -> "Estimate":
        values = np.asarray(values, dtype=float)
        se = values.std(ddof=1) / np.sqrt(values.size) if values.size > 1 else float("nan")
        return cls(float(values.mean()), float(se))


@dataclass(frozen=True)
class RiskReport:
    """Replicate means (with standard errors) of the three squared-error
    integrals; ``values`` holds the per-replicate columns
    ``(risk, variance_term, bias_term)``."""

    risk: Estimate
    variance_term: Estimate
    bias_term: Estimate
    replicates: int
    config: dict
    values: np.ndarray = field(repr=False, compare=False)

    @property
    def decomposition_gap(self) -> Estimate:
        """Paired ``risk - variance - bias``; zero in expectation."""
        v = self.values
        return Estimate.from_values(v[:, 0] - v[:, 1] - v[:, 2])


@dataclass(frozen=True)
class CovarianceReport:
    covariance: Estimate
    tree_variance: Estimate
    ratio: float
    ratio_se: float
    replicates: int
    config: dict
    values: np.ndarray = field(repr=False, compare=False)


def _as_cell_values(f, lo, hi):
    """Per-cell constants of a step function, or None for a general callable."""
    if isinstance(f, StepFunction):
        # cells are (lo, hi]; the right end picks the containing step
        return f(hi)
    return None


def ise(
    f,
    g,
    density: Callable,
    quad: QuadratureSettings = DEFAULT_QUAD,
    cdf: Optional[Callable] = None,
) -> float:
    """``int_0^1 (f - g)^2 density``.

    ``f`` and ``g`` are :class:`StepFunction` instances or vectorised
    callables. The integral is split on the union of all step breakpoints;
    when both are steps each piece is exact (a mass times a squared
    constant, the mass taken from ``cdf`` when given), otherwise each piece
    goes through adaptive quadrature.
    """
    breaks = [h.breakpoints for h in (f, g) if isinstance(h, StepFunction)]
    inner = np.unique(np.concatenate(breaks)) if breaks else np.empty(0)
    edges = np.concatenate(([0.0], inner, [1.0]))
    lo, hi = edges[:-1], edges[1:]
    fv = _as_cell_values(f, lo, hi)
    gv = _as_cell_values(g, lo, hi)
    if fv is not None and gv is not None:
        if cdf is not None:
            mass = cdf(hi) - cdf(lo)
        else:
            mass = integrate_cells(lambda x, _: density(x), lo, hi, quad)
        return float(np.sum(mass * (fv - gv) ** 2))

    def pick(vals, fn, x, ids):
        return vals[ids][:, None] if vals is not None else fn(x)

    def integrand(x, ids):
        return (pick(fv, f, x, ids) - pick(gv, g, x, ids)) ** 2 * density(x)

    return float(np.sum(integrate_cells(integrand, lo, hi, quad)))


def _run(fn, replicates: int, threads: int) -> np.ndarray:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(fn, range(replicates)))
    else:
        rows = [fn(i) for i in range(replicates)]
    return np.asarray(rows, dtype=float)


def _forest_replicate(model, n, k, q, seed, rep, quad):
    data = sample(model, n, substream(seed, rep, SAMPLE_SLOT))
    cuts = np.stack(
        [sample_partition(k, substream(seed, rep, tree_slot(l))).cuts for l in range(q)]
    )
    beta_hat, _ = fit_cells(data, cuts)
    edges = np.concatenate((np.zeros((q, 1)), cuts, np.ones((q, 1))), axis=1)
    _, beta, _ = oracle_cells(model, edges[:, :-1].ravel(), edges[:, 1:].ravel(), quad)
    beta = beta.reshape(beta_hat.shape)
    fitted = average_steps([StepFunction(e, b) for e, b in zip(edges, beta_hat)])
    oracle = average_steps([StepFunction(e, b) for e, b in zip(edges, beta)])
    mu, cdf, s = model.design_density, model.design_cdf, model.regression_fn
    return (
        ise(fitted, s, mu, quad, cdf),
        ise(fitted, oracle, mu, quad, cdf),
        ise(oracle, s, mu, quad, cdf),
    )


def _config(model, **kw):
    return dict(model=model.name, sigma=model.noise_sd, **kw)


def estimate_forest_decomposition(
    model: RegressionModel,
    n: int,
    k: int,
    q: int,
    replicates: int,
    seed: int,
    threads: int = 1,
    quad: QuadratureSettings = DEFAULT_QUAD,
) -> RiskReport:
    """Risk, variance and bias of a ``q``-tree forest, averaged over
    replicates of (learning sample, partitions)."""
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    if replicates < 2:
        raise ValueError("need at least 2 replicates for a standard error")
    values = _run(
        lambda rep: _forest_replicate(model, n, k, q, seed, rep, quad), replicates, threads
    )
    risk, var, bias = (Estimate.from_values(values[:, c]) for c in range(3))
    cfg = _config(model, n=n, k=k, q=q, seed=seed, replicates=replicates)
    return RiskReport(risk, var, bias, replicates, cfg, values)


def estimate_decomposition(
    model: RegressionModel,
    n: int,
    k: int,
    replicates: int,
    seed: int,
    threads: int = 1,
    quad: QuadratureSettings = DEFAULT_QUAD,
) -> RiskReport:
    """Single-tree decomposition; identical to the one-tree forest."""
    return estimate_forest_decomposition(model, n, k, 1, replicates, seed, threads, quad)


def _covariance_replicate(model, n, k, seed, rep, quad):
    data = sample(model, n, substream(seed, rep, SAMPLE_SLOT))
    cuts = np.stack([sample_partition(k, substream(seed, rep, tree_slot(l))).cuts for l in (0, 1)])
    beta_hat, _ = fit_cells(data, cuts)
    edges = np.concatenate((np.zeros((2, 1)), cuts, np.ones((2, 1))), axis=1)
    probs, beta, _ = oracle_cells(model, edges[:, :-1].ravel(), edges[:, 1:].ravel(), quad)
    dev = beta_hat - beta.reshape(beta_hat.shape)
    merged = np.concatenate(([0.0], np.sort(cuts.ravel()), [1.0]))
    mass = model.cdf(merged[1:]) - model.cdf(merged[:-1])
    right = merged[1:]
    d1 = dev[0][np.searchsorted(cuts[0], right, side="left")]
    d2 = dev[1][np.searchsorted(cuts[1], right, side="left")]
    p1 = probs[: k + 1]
    return float(np.sum(mass * d1 * d2)), float(np.sum(p1 * dev[0] ** 2))


def estimate_tree_covariance(
    model: RegressionModel,
    n: int,
    k: int,
    replicates: int,
    seed: int,
    threads: int = 1,
    quad: QuadratureSettings = DEFAULT_QUAD,
) -> CovarianceReport:
    """``E[int (s1_hat - s1_tilde)(s2_hat - s2_tilde) mu]`` for two trees on
    independent partitions sharing one sample, next to the single-tree
    variance term; ``ratio`` is their quotient of means with a delta-method
    standard error."""
    if replicates < 2:
        raise ValueError("need at least 2 replicates for a standard error")
    values = _run(lambda rep: _covariance_replicate(model, n, k, seed, rep, quad), replicates, threads)
    cov = Estimate.from_values(values[:, 0])
    var = Estimate.from_values(values[:, 1])
    ratio = cov.mean / var.mean if var.mean > 0 else float("nan")
    if var.mean > 0:
        resid = (values[:, 0] - ratio * values[:, 1]) / var.mean
        ratio_se = Estimate.from_values(resid).se
    else:
        ratio_se = float("nan")
    cfg = _config(model, n=n, k=k, seed=seed, replicates=replicates)
    return CovarianceReport(cov, var, float(ratio), float(ratio_se), replicates, cfg, values)


def expected_inverse_positive_binomial(n: int, p: float) -> float:
    """``E[1{N > 0} / N]`` for ``N ~ Binomial(n, p)``.

    The empty event contributes nothing, mirroring the zero value given to
    empty cells. Terms beyond 40 standard deviations of the mean are
    dropped; they are below double precision.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    mean = n * p
    spread = 40.0 * np.sqrt(mean * (1.0 - p)) + 40.0
    lo = max(1, int(np.floor(mean - spread)))
    hi = min(n, int(np.ceil(mean + spread)))
    m = np.arange(lo, hi + 1)
    pmf = np.exp(stats.binom.logpmf(m, n, p))
    return float(np.sum(pmf / m))


def conditional_variance_eq9(
    model: RegressionModel,
    partition: UniformPartition,
    n: int,
    quad: QuadratureSettings = DEFAULT_QUAD,
    empty_cells: str = "exact",
) -> float:
    """``E[(s_hat(X) - s_tilde(X))^2 | partition]`` for a tree fitted on ``n``
    points, ``sum_j p_j E[1/(n p_hat_j)] (sigma^2 + var_j)``.

    ``1/(n p_hat_j)`` is undefined when cell ``j`` is empty. There the fitted
    value is 0, so the squared error on the cell is ``beta_j^2``:
    ``empty_cells="exact"`` adds ``p_j (1 - p_j)^n beta_j^2`` and the result
    is the exact conditional variance term. ``empty_cells="zero"`` drops the
    empty event altogether.
    """
    if empty_cells not in ("exact", "zero"):
        raise ValueError(f"empty_cells must be 'exact' or 'zero', got {empty_cells!r}")
    tree = oracle_tree(model, partition, quad)
    sigma2 = model.noise_sd ** 2
    probs = np.clip(tree.cell_probs, 0.0, 1.0)
    inv = np.array([expected_inverse_positive_binomial(n, float(p)) for p in probs])
    total = np.sum(probs * inv * (sigma2 + tree.cell_approx_var))
    if empty_cells == "exact":
        total += np.sum(probs * (1.0 - probs) ** n * tree.beta ** 2)
    return float(total)


def _cell_sums_direct(model, cuts, n, b, rng):
    cells = cuts.size + 1
    xs = draw_design(model, (b, n), rng)
    ys = model.regression_fn(xs)
    if model.noise_sd > 0:
        ys = ys + draw_noise(model, (b, n), rng)
    idx = np.searchsorted(cuts, xs, side="left")
    idx += (np.arange(b) * cells)[:, None]
    counts = np.bincount(idx.ravel(), minlength=b * cells).reshape(b, cells)
    sums = np.bincount(idx.ravel(), weights=ys.ravel(), minlength=b * cells).reshape(b, cells)
    return counts, sums


def _cell_sums_stratified(model, edges, probs, n, b, rng):
    """Same law as i.i.d. sampling, drawn cell by cell.

    Cell counts are multinomial; given the counts, points in cell ``j`` are
    i.i.d. from the design restricted to the cell, i.e. inverse-CDF images
    of uniforms on ``[F(lo_j), F(hi_j)]``. Gaussian noise sums are drawn
    directly as ``N(0, count * sigma^2)``.
    """
    cells = probs.size
    counts = rng.multinomial(n, probs / probs.sum(), size=b)
    reps = counts.ravel()
    base = np.repeat(np.tile(model.cdf(edges[:-1]), b), reps)
    width = np.repeat(np.tile(probs, b), reps)
    u = rng.random(b * n)
    u *= width
    u += base
    np.minimum(u, 1.0, out=u)
    vals = model.regression_fn(model.design_ppf(u)).reshape(b, n)
    if model.noise_sd > 0 and model.noise != "gaussian":
        vals = vals + draw_noise(model, (b, n), rng)
    prefix = np.concatenate((np.zeros((b, 1)), np.cumsum(vals, axis=1)), axis=1)
    bounds = np.concatenate((np.zeros((b, 1), dtype=np.int64), np.cumsum(counts, axis=1)), axis=1)
    sums = np.diff(np.take_along_axis(prefix, bounds, axis=1), axis=1)
    if model.noise_sd > 0 and model.noise == "gaussian":
        sums = sums + model.noise_sd * np.sqrt(counts) * rng.standard_normal((b, cells))
    return counts, sums


def fixed_partition_variance_mc(
    model: RegressionModel,
    partition: UniformPartition,
    n: int,
    samples: int,
    rng: np.random.Generator,
    batch: int = 100,
    quad: QuadratureSettings = DEFAULT_QUAD,
) -> Estimate:
    """Monte Carlo of the tree variance term with the partition held fixed.

    Each of ``samples`` fresh learning sets gives
    ``sum_j p_j (beta_hat_j - beta_j)^2``, the variance integral over ``X``
    for that fit. Models with an inverse CDF are sampled cell by cell (see
    :func:`_cell_sums_stratified`); others draw and bin every point.
    """
    tree = oracle_tree(model, partition, quad)
    out = np.empty(samples)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        if model.design_ppf is not None:
            counts, sums = _cell_sums_stratified(
                model, partition.edges, tree.cell_probs, n, b, rng
            )
        else:
            counts, sums = _cell_sums_direct(model, partition.cuts, n, b, rng)
        beta_hat = np.zeros(counts.shape)
        np.divide(sums, counts, out=beta_hat, where=counts > 0)
        out[done:done + b] = ((beta_hat - tree.beta) ** 2) @ tree.cell_probs
        done += b
    return Estimate.from_values(out)
