"""Uniform random partitions of the unit interval and their combinatorics.

A partition with ``k`` cuts ``0 < u_1 < ... < u_k < 1`` has ``k + 1`` cells
``(u_j, u_{j+1}]`` with sentinels ``u_0 = 0`` and ``u_{k+1} = 1``; the point
``x = 0`` is assigned to cell 0 so that every ``x`` in ``[0, 1]`` has a cell.

Two partitions with the same ``k`` overlap in a way measured by ``M12``,
the number of pairs ``(r, s)`` with three consecutive cuts of the first
partition strictly inside the interior cell ``(v_s, v_{s+1})`` of the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln


class TieError(ValueError):
    """Two cuts coincide; a probability-zero event that callers resample."""


@dataclass(frozen=True)
class UniformPartition:
    """Sorted cut points strictly inside ``(0, 1)``."""

    cuts: np.ndarray

    def __post_init__(self):
        cuts = np.asarray(self.cuts, dtype=float).ravel()
        if cuts.size and (cuts[0] <= 0.0 or cuts[-1] >= 1.0):
            raise ValueError("cuts must lie strictly inside (0, 1)")
        if np.any(np.diff(cuts) <= 0):
            raise TieError("cuts must be strictly increasing")
        cuts.setflags(write=False)
        object.__setattr__(self, "cuts", cuts)

    @property
    def k(self) -> int:
        return self.cuts.size

    @property
    def edges(self) -> np.ndarray:
        """Cell boundaries including the sentinels 0 and 1 (length ``k + 2``)."""
        return np.concatenate(([0.0], self.cuts, [1.0]))

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.edges)


@dataclass(frozen=True)
class MergedPartition:
    """Sorted union of two partitions' cuts with origin labels 1 and 2."""

    cuts: np.ndarray
    origin: np.ndarray = field(repr=False)


def sample_partition(k: int, rng: np.random.Generator) -> UniformPartition:
    """Draw ``k`` i.i.d. Uniform(0, 1) cuts, resampling on a tie or an exact 0."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    while True:
        cuts = np.sort(rng.random(k))
        if k == 0 or (cuts[0] > 0.0 and np.all(np.diff(cuts) > 0)):
            return UniformPartition(cuts)


def sample_partitions(k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent sorted cut vectors as a ``(count, k)`` array."""
    while True:
        cuts = np.sort(rng.random((count, k)), axis=1)
        if k == 0 or (np.all(cuts[:, 0] > 0.0) and np.all(np.diff(cuts, axis=1) > 0)):
            return cuts


def locate(p: UniformPartition, x):
    """Index ``j`` of the cell ``(u_j, u_{j+1}]`` containing ``x``.

    Accepts a scalar or an array; ``x = 0`` maps to cell 0.
    """
    xa = np.asarray(x, dtype=float)
    if xa.size and (np.min(xa) < 0.0 or np.max(xa) > 1.0 or np.isnan(xa).any()):
        raise ValueError("x must lie in [0, 1]")
    j = np.searchsorted(p.cuts, xa, side="left")
    return int(j) if j.ndim == 0 else j


def merge(p1: UniformPartition, p2: UniformPartition) -> MergedPartition:
    if p1.k != p2.k:
        raise ValueError(f"partitions differ in size: {p1.k} vs {p2.k}")
    allcuts = np.concatenate((p1.cuts, p2.cuts))
    labels = np.repeat(np.array([1, 2], dtype=np.int8), p1.k)
    order = np.argsort(allcuts, kind="stable")
    cuts = allcuts[order]
    if np.any(np.diff(cuts) <= 0):
        raise TieError("partitions share a cut point")
    return MergedPartition(cuts, labels[order])


def _m12_from_origins(origin: np.ndarray) -> np.ndarray:
    """Row-wise M12 from origin labels of merged cuts, shape ``(..., 2k)``."""
    k = origin.shape[-1] // 2
    if k < 3:
        return np.zeros(origin.shape[:-1], dtype=np.int64)
    # column positions of the second partition's cuts, k per row
    pos = np.nonzero(origin == 2)[-1].reshape(origin.shape[:-1] + (k,))
    runs = np.diff(pos, axis=-1) - 1
    return np.maximum(runs - 2, 0).sum(axis=-1)


def count_m12(p1: UniformPartition, p2: UniformPartition) -> int:
    """Number of pairs ``(r, s)``, ``1 <= r <= k-2``, ``1 <= s <= k-1``, with
    ``v_s < u_r < u_{r+1} < u_{r+2} < v_{s+1}``.

    A run of ``l`` consecutive first-partition cuts between two adjacent
    second-partition cuts contributes ``max(l - 2, 0)``; runs before the first
    or after the last second-partition cut lie in boundary cells and do not
    count.
    """
    return int(_m12_from_origins(merge(p1, p2).origin))


def count_m12_batch(cuts1: np.ndarray, cuts2: np.ndarray) -> np.ndarray:
    """Vectorised :func:`count_m12` over rows of two ``(N, k)`` sorted arrays."""
    cuts1 = np.atleast_2d(cuts1)
    cuts2 = np.atleast_2d(cuts2)
    if cuts1.shape != cuts2.shape:
        raise ValueError("cut arrays must have equal shape")
    allcuts = np.concatenate((cuts1, cuts2), axis=1)
    labels = np.repeat(np.array([1, 2], dtype=np.int8), cuts1.shape[1])
    order = np.argsort(allcuts, axis=1, kind="stable")
    return _m12_from_origins(labels[order])


def expected_m12(k: int) -> float:
    """Exact ``E[M12]`` for two independent uniform partitions with ``k`` cuts.

    Uses ``(k-2) / (2(2k-1)) * (k - 3 + 4/(k+1))``, which is finite at
    ``k = 3`` where the product form ``(k-2)(k-3)/(2(2k-1)) *
    (1 + 4/((k+1)(k-3)))`` is ``0 * inf``. Zero for ``k <= 2``.
    """
    if k <= 2:
        return 0.0
    return (k - 2) / (2.0 * (2 * k - 1)) * (k - 3 + 4.0 / (k + 1))


def _logfact(x):
    return gammaln(np.asarray(x, dtype=float) + 1.0)


def crossing_probability(k: int, r: int, s: int) -> float:
    """``P(v_s < u_r < u_{r+1} < u_{r+2} < v_{s+1})`` for independent uniform
    partitions ``u`` and ``v`` with ``k`` cuts each.

    Conditioning on ``v``, the event says at most ``r - 1`` of the ``u``'s
    fall below ``v_s`` and at least ``r + 2`` fall below ``v_{s+1}``; summing
    the multinomial over those counts and integrating against the joint law
    of ``(v_s, v_{s+1})`` gives a double sum of factorial ratios, evaluated
    here in log space.
    """
    if k < 3 or not (1 <= r <= k - 2) or not (1 <= s <= k - 1):
        raise ValueError(f"need k >= 3, 1 <= r <= k-2, 1 <= s <= k-1; got k={k}, r={r}, s={s}")
    i = np.arange(0, r)[:, None]
    j = np.arange(r + 2, k + 1)[None, :]
    log_terms = (
        2 * _logfact(k)
        - _logfact(i)
        - _logfact(k - j)
        - _logfact(s - 1)
        - _logfact(k - s - 1)
        + _logfact(i + s - 1)
        + _logfact(2 * k - j - s - 1)
        - _logfact(2 * k)
    )
    return float(np.exp(log_terms).sum())


def expected_m12_by_sum(k: int) -> float:
    """``E[M12]`` as the sum of :func:`crossing_probability` over all ``(r, s)``."""
    if k < 3:
        return 0.0
    return float(
        sum(crossing_probability(k, r, s) for r in range(1, k - 1) for s in range(1, k))
    )


def spacing_moment(k: int, m: int) -> float:
    """``E[d^m]`` for a spacing ``d`` of ``k`` uniform cuts, i.e. the ``m``-th
    moment of Beta(1, k): ``m! k! / (k + m)!``."""
    if k < 0 or m < 1:
        raise ValueError(f"need k >= 0 and m >= 1, got k={k}, m={m}")
    return float(np.exp(_logfact(m) + _logfact(k) - _logfact(k + m)))
