from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purf.partition import (
    TieError,
    UniformPartition,
    count_m12,
    count_m12_batch,
    crossing_probability,
    expected_m12,
    expected_m12_by_sum,
    locate,
    merge,
    sample_partition,
    sample_partitions,
    spacing_moment,
)


def brute_m12(c1, c2):
    """The literal double sum over r = 1..k-2, s = 1..k-1 (1-based)."""
    k = len(c1)
    total = 0
    for r in range(1, k - 1):
        for s in range(1, k):
            if c2[s - 1] < c1[r - 1] < c1[r] < c1[r + 1] < c2[s]:
                total += 1
    return total


def exact_m12_by_interleavings(k):
    """E[M12] by enumerating all C(2k, k) equally likely label orders."""
    total = 0
    for ones in combinations(range(2 * k), k):
        labels = [2] * (2 * k)
        for i in ones:
            labels[i] = 1
        twos = [i for i, lab in enumerate(labels) if lab == 2]
        total += sum(max(b - a - 1 - 2, 0) for a, b in zip(twos, twos[1:]))
    return Fraction(total, comb(2 * k, k))


# cuts on a 1e-6 grid so that cell midpoints are distinct from the edges
sorted_cuts = st.lists(st.integers(1, 999_999), max_size=40, unique=True).map(
    lambda ints: [i / 1e6 for i in sorted(ints)]
)


def test_empty_partition_has_one_cell(rng):
    p = sample_partition(0, rng)
    assert p.k == 0
    assert locate(p, 0.3) == 0
    np.testing.assert_array_equal(p.edges, [0.0, 1.0])


def test_sample_partition_is_sorted_in_open_interval(rng):
    p = sample_partition(3, rng)
    assert p.k == 3
    assert np.all(np.diff(p.cuts) > 0)
    assert 0 < p.cuts[0] and p.cuts[-1] < 1


def test_first_spacing_mean(rng):
    k, reps = 10_000, 2000
    first = np.array([sample_partition(k, rng).cuts[0] for _ in range(reps)])
    se = first.std(ddof=1) / np.sqrt(reps)
    assert abs(first.mean() - 1 / (k + 1)) < 3 * se


def test_partition_rejects_ties():
    with pytest.raises(TieError):
        UniformPartition([0.2, 0.2])


@pytest.mark.parametrize(
    "cuts, x, cell",
    [([0.5], 0.5, 0), ([0.5], 0.7, 1), ([0.2, 0.8], 1.0, 2), ([0.2, 0.8], 0.0, 0)],
)
def test_locate_examples(cuts, x, cell):
    assert locate(UniformPartition(cuts), x) == cell


def test_locate_rejects_outside_points():
    with pytest.raises(ValueError):
        locate(UniformPartition([0.5]), 1.2)
    with pytest.raises(ValueError):
        locate(UniformPartition([0.5]), -0.1)


@given(sorted_cuts)
def test_locate_midpoints(cuts):
    p = UniformPartition(cuts)
    mids = 0.5 * (p.edges[:-1] + p.edges[1:])
    np.testing.assert_array_equal(locate(p, mids), np.arange(p.k + 1))


def test_merge_examples():
    m = merge(UniformPartition([0.3]), UniformPartition([0.6]))
    np.testing.assert_array_equal(m.cuts, [0.3, 0.6])
    np.testing.assert_array_equal(m.origin, [1, 2])
    m = merge(UniformPartition([0.2, 0.9]), UniformPartition([0.4, 0.5]))
    np.testing.assert_array_equal(m.cuts, [0.2, 0.4, 0.5, 0.9])
    np.testing.assert_array_equal(m.origin, [1, 2, 2, 1])


def test_merge_random_pair(rng):
    m = merge(sample_partition(100, rng), sample_partition(100, rng))
    assert m.cuts.size == 200
    assert np.all(np.diff(m.cuts) > 0)
    assert np.sum(m.origin == 1) == 100


def test_merge_tie_and_size_mismatch():
    with pytest.raises(TieError):
        merge(UniformPartition([0.3, 0.5]), UniformPartition([0.5, 0.7]))
    with pytest.raises(ValueError):
        merge(UniformPartition([0.3]), UniformPartition([0.5, 0.7]))


def test_count_m12_examples(rng):
    assert count_m12(sample_partition(2, rng), sample_partition(2, rng)) == 0
    p1 = UniformPartition([0.30, 0.35, 0.40])
    p2 = UniformPartition([0.1, 0.9, 0.95])
    assert count_m12(p1, p2) == 1
    # the run sits in the boundary cell (0.95, 1] of p2 and does not count
    assert count_m12(UniformPartition([0.96, 0.97, 0.98]), p2) == 0


def test_count_m12_matches_double_sum_k50(rng):
    for _ in range(20):
        p1, p2 = sample_partition(50, rng), sample_partition(50, rng)
        assert count_m12(p1, p2) == brute_m12(p1.cuts, p2.cuts)


@settings(max_examples=200)
@given(st.integers(3, 12), st.data())
def test_count_m12_matches_double_sum(k, data):
    vals = data.draw(
        st.lists(st.floats(1e-6, 1 - 1e-6), min_size=2 * k, max_size=2 * k, unique=True)
    )
    c1, c2 = sorted(vals[:k]), sorted(vals[k:])
    got = count_m12(UniformPartition(c1), UniformPartition(c2))
    assert got == brute_m12(c1, c2)
    assert 0 <= got <= k - 2


def test_count_m12_is_not_symmetric():
    p1 = UniformPartition([0.30, 0.35, 0.40])
    p2 = UniformPartition([0.1, 0.9, 0.95])
    assert count_m12(p1, p2) == 1
    assert count_m12(p2, p1) == 0


def test_batch_matches_scalar(rng):
    a = sample_partitions(30, 200, rng)
    b = sample_partitions(30, 200, rng)
    expected = [count_m12(UniformPartition(x), UniformPartition(y)) for x, y in zip(a, b)]
    np.testing.assert_array_equal(count_m12_batch(a, b), expected)


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7, 8])
def test_expected_m12_equals_enumeration(k):
    assert expected_m12(k) == pytest.approx(float(exact_m12_by_interleavings(k)), rel=1e-14)


def test_expected_m12_examples():
    assert expected_m12(2) == 0.0
    assert expected_m12(0) == 0.0
    assert expected_m12(3) == pytest.approx(1 / 10, rel=1e-15)
    assert expected_m12(4) == pytest.approx(9 / 35, rel=1e-15)


def test_expected_m12_matches_product_form_for_k_ge_4():
    for k in range(4, 200):
        product = (k - 2) * (k - 3) / (2 * (2 * k - 1)) * (1 + 4 / ((k + 1) * (k - 3)))
        assert expected_m12(k) == pytest.approx(product, rel=1e-13)


@pytest.mark.parametrize("k", [3, 4, 10, 50])
def test_expected_m12_monte_carlo(k):
    rng = np.random.default_rng(k)
    counts = count_m12_batch(sample_partitions(k, 40_000, rng), sample_partitions(k, 40_000, rng))
    se = counts.std(ddof=1) / np.sqrt(counts.size)
    assert abs(counts.mean() - expected_m12(k)) < 3 * se


def test_expected_m12_quarter_limit():
    k = 1000
    assert abs(expected_m12(k) / (k + 1) - 0.25) < 0.002


@pytest.mark.parametrize("k, tol", [(4, 1e-10), (20, 1e-9)])
def test_crossing_probability_sums_to_expectation(k, tol):
    assert expected_m12_by_sum(k) == pytest.approx(expected_m12(k), abs=tol)


def test_crossing_probability_k4_exact():
    assert expected_m12_by_sum(4) == pytest.approx(9 / 35, abs=1e-10)


@given(st.integers(3, 60), st.data())
def test_crossing_probability_is_probability(k, data):
    r = data.draw(st.integers(1, k - 2))
    s = data.draw(st.integers(1, k - 1))
    assert 0.0 <= crossing_probability(k, r, s) <= 1.0


def test_crossing_probability_monte_carlo():
    k, r, s, reps = 6, 2, 3, 200_000
    rng = np.random.default_rng(7)
    u = sample_partitions(k, reps, rng)
    v = sample_partitions(k, reps, rng)
    hit = (v[:, s - 1] < u[:, r - 1]) & (u[:, r + 1] < v[:, s])
    se = hit.std(ddof=1) / np.sqrt(reps)
    assert abs(hit.mean() - crossing_probability(k, r, s)) < 3 * se


def test_crossing_probability_domain():
    with pytest.raises(ValueError):
        crossing_probability(5, 0, 1)
    with pytest.raises(ValueError):
        crossing_probability(5, 1, 5)
    with pytest.raises(ValueError):
        crossing_probability(2, 1, 1)


def test_spacing_moments():
    assert spacing_moment(1, 2) == pytest.approx(1 / 3, rel=1e-14)
    assert spacing_moment(0, 4) == pytest.approx(1.0, rel=1e-14)
    for k in range(0, 60):
        assert spacing_moment(k, 1) * (k + 1) == pytest.approx(1.0, rel=1e-13)
        assert spacing_moment(k, 2) == pytest.approx(2 / ((k + 1) * (k + 2)), rel=1e-13)
        assert (k + 1) * spacing_moment(k, 3) == pytest.approx(6 / ((k + 2) * (k + 3)), rel=1e-13)


def test_spacing_moment_monte_carlo(rng):
    k = 7
    cuts = sample_partitions(k, 100_000, rng)
    d = cuts[:, 3] - cuts[:, 2]
    se = (d ** 3).std(ddof=1) / np.sqrt(d.size)
    assert abs((d ** 3).mean() - spacing_moment(k, 3)) < 3 * se
