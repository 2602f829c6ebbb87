"""
Risk against sample size at the balanced cut count
==================================================

With k + 1 = n^(1/3) cells the variance and bias bounds are of the same
order and the risk bound decays like n^(-2/3). We fit the log-log slope of
the measured risk for a tree and a forest.
"""

from purf import (bounds, catalog_model, estimate_decomposition,
                  estimate_forest_decomposition, minimax_k, rate_fit)

model = catalog_model("sine-uniform", noise_sd=1.0)
tree_pts, forest_pts = [], []
for n in (512, 1448, 4096, 11585, 32768):
    k = minimax_k(n)
    tree = estimate_decomposition(model, n, k, replicates=100, seed=4)
    forest = estimate_forest_decomposition(model, n, k, 50, replicates=100, seed=4)
    b = bounds(model, n, k)
    tree_pts.append((n, tree.risk.mean))
    forest_pts.append((n, forest.risk.mean))
    print(f"n = {n:5d}, k = {k:2d}: tree {tree.risk.mean:.3e}, forest {forest.risk.mean:.3e}, "
          f"tree bound {b.tree_risk_bound:.3e}")

print("tree slope   %.3f" % rate_fit(tree_pts)[0])
# the forest bias shrinks faster than the tree bias, so its slope is steeper
print("forest slope %.3f" % rate_fit(forest_pts)[0])
