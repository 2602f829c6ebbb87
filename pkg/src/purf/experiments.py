"""Named experiments producing one result row per grid point.

Each runner takes a resolved :class:`~purf.cli.ExperimentConfig` and
returns ``(rows, hard_failures)`` where ``rows`` is a list of ordered dicts
with the columns listed in ``COLUMNS`` and ``hard_failures`` counts rows
whose empirical bias exceeded the exact bias bound.
"""

from __future__ import annotations

import numpy as np

from .model import catalog_model
from .partition import (
    count_m12_batch,
    expected_m12,
    expected_m12_by_sum,
    sample_partition,
    sample_partitions,
)
from .risk import (
    Estimate,
    conditional_variance_eq9,
    estimate_decomposition,
    estimate_forest_decomposition,
    estimate_tree_covariance,
    fixed_partition_variance_mc,
)
from .streams import substream
from .theory import bounds, expected_n12, minimax_k, rate_fit

COLUMNS = {
    "tree-decomposition": [
        "n", "k", "replicates", "risk", "risk_se", "variance", "variance_se",
        "bias", "bias_se", "variance_leading", "variance_ratio", "bias_bound", "bias_ok",
    ],
    "forest-decomposition": [
        "n", "k", "q", "replicates", "risk", "risk_se", "variance", "variance_se",
        "bias", "bias_se", "tree_variance", "tree_variance_se", "tree_bias", "tree_bias_se",
        "variance_ratio", "variance_ratio_se", "forest_variance_leading", "bias_bound", "bias_ok",
    ],
    "covariance-ratio": [
        "n", "k", "replicates", "covariance", "covariance_se", "tree_variance",
        "tree_variance_se", "ratio", "ratio_se", "n12_ratio", "covariance_bound",
    ],
    "m12": ["k", "pairs", "mc_mean", "mc_se", "closed_form", "z", "crossing_sum"],
    "rate": [
        "n", "k", "q", "replicates", "tree_risk", "tree_risk_se", "tree_bias",
        "forest_risk", "forest_risk_se", "forest_bias", "tree_risk_bound",
        "forest_risk_bound", "bias_bound", "bias_ok", "tree_slope", "forest_slope",
    ],
    "eq9-check": [
        "n", "k", "partition", "min_cell_prob", "eq9", "eq9_zero_empty", "mc_mean", "mc_se", "z",
    ],
}

# m12 pairs are drawn in fixed-size chunks, each from its own keyed stream
M12_CHUNK = 10_000


def _model(cfg):
    return catalog_model(cfg.model, cfg.sigma, cfg.noise)


def _paired_ratio(num, den):
    """Ratio of means of paired replicate columns with a delta-method SE."""
    r = num.mean() / den.mean()
    return float(r), Estimate.from_values((num - r * den) / den.mean()).se


def tree_decomposition(cfg):
    model = _model(cfg)
    rows, failures = [], 0
    for n in cfg.n:
        for k in cfg.k:
            rep = estimate_decomposition(model, n, k, cfg.replicates, cfg.seed, cfg.threads)
            b = bounds(model, n, k)
            ok = rep.bias_term.mean <= b.bias_bound
            failures += not ok
            lead = b.tree_variance_leading
            rows.append(dict(
                n=n, k=k, replicates=cfg.replicates,
                risk=rep.risk.mean, risk_se=rep.risk.se,
                variance=rep.variance_term.mean, variance_se=rep.variance_term.se,
                bias=rep.bias_term.mean, bias_se=rep.bias_term.se,
                variance_leading=lead,
                variance_ratio=rep.variance_term.mean / lead if lead > 0 else float("nan"),
                bias_bound=b.bias_bound, bias_ok=int(ok),
            ))
    return rows, failures


def forest_decomposition(cfg):
    model = _model(cfg)
    rows, failures = [], 0
    for n in cfg.n:
        for k in cfg.k:
            tree = estimate_decomposition(model, n, k, cfg.replicates, cfg.seed, cfg.threads)
            for q in cfg.q:
                rep = estimate_forest_decomposition(
                    model, n, k, q, cfg.replicates, cfg.seed, cfg.threads
                )
                b = bounds(model, n, k)
                ok = rep.bias_term.mean <= b.bias_bound
                failures += not ok
                ratio, ratio_se = _paired_ratio(rep.values[:, 1], tree.values[:, 1])
                rows.append(dict(
                    n=n, k=k, q=q, replicates=cfg.replicates,
                    risk=rep.risk.mean, risk_se=rep.risk.se,
                    variance=rep.variance_term.mean, variance_se=rep.variance_term.se,
                    bias=rep.bias_term.mean, bias_se=rep.bias_term.se,
                    tree_variance=tree.variance_term.mean, tree_variance_se=tree.variance_term.se,
                    tree_bias=tree.bias_term.mean, tree_bias_se=tree.bias_term.se,
                    variance_ratio=ratio, variance_ratio_se=ratio_se,
                    forest_variance_leading=b.forest_variance_leading,
                    bias_bound=b.bias_bound, bias_ok=int(ok),
                ))
    return rows, failures


def covariance_ratio(cfg):
    model = _model(cfg)
    rows = []
    for n in cfg.n:
        for k in cfg.k:
            rep = estimate_tree_covariance(model, n, k, cfg.replicates, cfg.seed, cfg.threads)
            n12 = expected_n12(k)
            rows.append(dict(
                n=n, k=k, replicates=cfg.replicates,
                covariance=rep.covariance.mean, covariance_se=rep.covariance.se,
                tree_variance=rep.tree_variance.mean, tree_variance_se=rep.tree_variance.se,
                ratio=rep.ratio, ratio_se=rep.ratio_se,
                n12_ratio=n12 / (k + 1),
                covariance_bound=model.noise_sd ** 2 * n12 / n,
            ))
    return rows, 0


def m12_monte_carlo(k: int, pairs: int, seed: int) -> Estimate:
    """Mean and SE of ``M12`` over ``pairs`` independent partition pairs."""
    counts = []
    for chunk, start in enumerate(range(0, pairs, M12_CHUNK)):
        size = min(M12_CHUNK, pairs - start)
        rng = substream(seed, k, chunk)
        a = sample_partitions(k, size, rng)
        b = sample_partitions(k, size, rng)
        counts.append(count_m12_batch(a, b))
    return Estimate.from_values(np.concatenate(counts))


def m12(cfg):
    rows = []
    for k in cfg.k:
        est = m12_monte_carlo(k, cfg.replicates, cfg.seed)
        closed = expected_m12(k)
        z = (est.mean - closed) / est.se if est.se > 0 else 0.0
        rows.append(dict(
            k=k, pairs=cfg.replicates, mc_mean=est.mean, mc_se=est.se,
            closed_form=closed, z=z, crossing_sum=expected_m12_by_sum(k),
        ))
    return rows, 0


def rate(cfg):
    model = _model(cfg)
    q = cfg.q[0]
    rows, failures = [], 0
    for n in cfg.n:
        k = minimax_k(n)
        tree = estimate_decomposition(model, n, k, cfg.replicates, cfg.seed, cfg.threads)
        forest = estimate_forest_decomposition(model, n, k, q, cfg.replicates, cfg.seed, cfg.threads)
        b = bounds(model, n, k)
        ok = max(tree.bias_term.mean, forest.bias_term.mean) <= b.bias_bound
        failures += not ok
        rows.append(dict(
            n=n, k=k, q=q, replicates=cfg.replicates,
            tree_risk=tree.risk.mean, tree_risk_se=tree.risk.se, tree_bias=tree.bias_term.mean,
            forest_risk=forest.risk.mean, forest_risk_se=forest.risk.se,
            forest_bias=forest.bias_term.mean,
            tree_risk_bound=b.tree_risk_bound, forest_risk_bound=b.forest_risk_bound,
            bias_bound=b.bias_bound, bias_ok=int(ok),
        ))
    if len(rows) >= 3:
        tree_slope, _ = rate_fit([(r["n"], r["tree_risk"]) for r in rows])
        forest_slope, _ = rate_fit([(r["n"], r["forest_risk"]) for r in rows])
    else:
        tree_slope = forest_slope = float("nan")
    for r in rows:
        r["tree_slope"], r["forest_slope"] = tree_slope, forest_slope
    return rows, failures


def eq9_check(cfg):
    model = _model(cfg)
    rows = []
    for n in cfg.n:
        for k in cfg.k:
            for idx in range(cfg.partitions):
                part = sample_partition(k, substream(cfg.seed, n, k, idx))
                exact = conditional_variance_eq9(model, part, n)
                zero = conditional_variance_eq9(model, part, n, empty_cells="zero")
                mc = fixed_partition_variance_mc(
                    model, part, n, cfg.mc_samples, substream(cfg.seed, n, k, idx, 1)
                )
                rows.append(dict(
                    n=n, k=k, partition=idx, min_cell_prob=float(np.min(np.diff(model.cdf(part.edges)))),
                    eq9=exact, eq9_zero_empty=zero, mc_mean=mc.mean, mc_se=mc.se,
                    z=(mc.mean - exact) / mc.se,
                ))
    return rows, 0


RUNNERS = {
    "tree-decomposition": tree_decomposition,
    "forest-decomposition": forest_decomposition,
    "covariance-ratio": covariance_ratio,
    "m12": m12,
    "rate": rate,
    "eq9-check": eq9_check,
}

EXPERIMENTS = tuple(RUNNERS)
