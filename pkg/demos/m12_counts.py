"""
Counting runs of cuts between two partitions
============================================

For two independent partitions with k cuts each, M12 counts the triples of
consecutive cuts of the first partition that sit in one cell of the second.
Its expectation has a closed form and tends to (k+1)/4.
"""

from purf import (UniformPartition, count_m12, expected_m12, expected_m12_by_sum,
                  m12_monte_carlo)

# a hand-made pair: 0.30, 0.35, 0.40 all fall in (0.1, 0.9]
p1 = UniformPartition([0.30, 0.35, 0.40])
p2 = UniformPartition([0.1, 0.9, 0.95])
print("M12 =", count_m12(p1, p2), " M21 =", count_m12(p2, p1))

print(f"{'k':>6} {'closed':>10} {'double sum':>12} {'monte carlo':>20} {'/(k+1)':>8}")
for k in (3, 10, 50, 200):
    mc = m12_monte_carlo(k, 50_000, seed=2)
    print(f"{k:6d} {expected_m12(k):10.4f} {expected_m12_by_sum(k):12.4f} "
          f"{mc.mean:11.4f} +/- {mc.se:.4f} {expected_m12(k) / (k + 1):8.4f}")

for k in (10 ** 3, 10 ** 5, 10 ** 7):
    print(f"k = {k:>8}: E[M12]/(k+1) = {expected_m12(k) / (k + 1):.6f}")
