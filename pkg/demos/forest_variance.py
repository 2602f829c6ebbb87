"""
How much variance does averaging remove?
========================================

A forest averages q trees grown on the same sample with independent
partitions. The trees are correlated through the shared sample, so the
forest variance does not fall like 1/q. It levels off at the covariance of
two trees.
"""

from purf import (catalog_model, estimate_decomposition, estimate_forest_decomposition,
                  estimate_tree_covariance, expected_n12)

model = catalog_model("linear-uniform", noise_sd=1.0)
n, k = 20_000, 100

tree = estimate_decomposition(model, n, k, replicates=100, seed=3)
print(f"tree variance {tree.variance_term.mean:.3e}")
for q in (2, 5, 20, 100):
    forest = estimate_forest_decomposition(model, n, k, q, replicates=100, seed=3)
    ratio = forest.variance_term.mean / tree.variance_term.mean
    print(f"q = {q:3d}: forest / tree variance = {ratio:.3f}")

cov = estimate_tree_covariance(model, n, k, replicates=300, seed=3)
print(f"covariance / tree variance = {cov.ratio:.3f} +/- {cov.ratio_se:.3f}")

# the count-based bound on the covariance is much looser than what we measure
print(f"E[N12]/(k+1) = {expected_n12(k) / (k + 1):.3f}")
