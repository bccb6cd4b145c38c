"""Multiway cut matrix sets and their l1-Hausdorff comparison.

For part masses a, the cut set of a kernel consists of all q x q matrices of
rectangle integrals over partitions with those part masses.  The set is a
continuum; this module ships a sampler (corner-rule vertices, per-entry
extreme points, seeded scaling interior points) and documents the Hausdorff
output as an estimate from below.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import PartitionSpec, edge_density
from .errors import (
    DimensionMismatch,
    MarginalMismatch,
    ScalingDiverged,
    StepGraphonError,
)
from .metrics import dyadic_intervals, hausdorff_from_matrix

VERTEX_ENUM_CAP = 10_000


class MultiwayMatrixSet:
    """Finite sample of cut matrices with the partitions that produced them."""

    def __init__(self, a, matrices, provenance):
        self.a = np.asarray(a, dtype=float)
        self.matrices = [np.asarray(m, dtype=float) for m in matrices]
        self.provenance = list(provenance)
        q = len(self.a)
        bound = np.outer(self.a, self.a)
        for m in self.matrices:
            if m.shape != (q, q):
                raise DimensionMismatch(f"matrix shape {m.shape} != ({q}, {q})")
            if (m < -1e-9).any() or (m > bound + 1e-9).any():
                raise StepGraphonError("cut matrix entry outside [0, a_l*a_m]")

    @property
    def q(self):
        return len(self.a)

    def to_dict(self):
        return {
            "a": self.a.tolist(),
            "matrices": [m.tolist() for m in self.matrices],
            "provenance": [p.to_dict() for p in self.provenance],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["a"], d["matrices"],
                   [PartitionSpec.from_dict(p) for p in d["provenance"]])

    def __len__(self):
        return len(self.matrices)


def multiway_matrix(W, R):
    """The q x q matrix of rectangle integrals under the partition R."""
    r = R.assignment
    if r.shape[0] != W.k:
        raise MarginalMismatch(
            f"partition has {r.shape[0]} source blocks, graphon has {W.k}")
    if np.abs(R.source_weights - W.weights).max() > 1e-9:
        raise MarginalMismatch("partition row sums do not match block weights")
    return r.T @ W.values @ r


def _northwest(row, col, row_order, col_order):
    """Corner-rule vertex of the transport polytope under the given orders."""
    r = row.copy()
    c = col.copy()
    m = np.zeros((len(row), len(col)))
    ri, ci = 0, 0
    while ri < len(row_order) and ci < len(col_order):
        i, j = row_order[ri], col_order[ci]
        t = min(r[i], c[j])
        m[i, j] = t
        r[i] -= t
        c[j] -= t
        if r[i] <= c[j]:
            ri += 1
        else:
            ci += 1
    return m


def _safe_ratio(target, current):
    return np.divide(target, current, out=np.zeros_like(target),
                     where=current > 0)


def _scaled_random(rng, row, col, cap=500, residual_tol=1e-10):
    m = rng.random((len(row), len(col))) + 0.05
    res = np.inf
    for _ in range(cap):
        m *= _safe_ratio(row, m.sum(axis=1))[:, None]
        m *= _safe_ratio(col, m.sum(axis=0))
        res = max(np.abs(m.sum(axis=1) - row).max(),
                  np.abs(m.sum(axis=0) - col).max())
        if res < residual_tol:
            return m
    raise ScalingDiverged(res, cap)


def sample_multiway_set(W, a, count, seed=0, dedup_tol=1e-9):
    """Sampled cut matrices for part masses a.

    Deterministic generation first: the full corner-rule vertex family when
    q! * k! is at most 10^4, otherwise the per-entry max/min extreme points;
    then `count` seeded interior points of the transport polytope (count may
    be 0 for deterministic-only generation).  Matrices are deduplicated at
    l1 distance 1e-9.
    """
    a = np.asarray(a, dtype=float)
    if count < 0:
        raise ValueError("count must be >= 0")
    if abs(a.sum() - 1.0) > 1e-9 or (a < 0).any():
        raise MarginalMismatch("part masses must be nonnegative and sum to 1")
    w = W.weights
    k, q = len(w), len(a)
    plans = []

    if math.factorial(q) * math.factorial(k) <= VERTEX_ENUM_CAP:
        for row_order in itertools.permutations(range(k)):
            for col_order in itertools.permutations(range(q)):
                plans.append(_northwest(w, a, row_order, col_order))
    else:
        base_rows = list(range(k))
        base_cols = list(range(q))
        for i in range(k):
            for l in range(q):
                rows = [i] + [r for r in base_rows if r != i]
                cols_max = [l] + [c for c in base_cols if c != l]
                cols_min = [c for c in base_cols if c != l] + [l]
                plans.append(_northwest(w, a, rows, cols_max))
                plans.append(_northwest(w, a, rows, cols_min))

    for idx in range(count):
        rng = np.random.default_rng((seed, idx))
        plans.append(_scaled_random(rng, w, a))

    matrices, provenance = [], []
    for plan in plans:
        spec = PartitionSpec(plan)
        m = multiway_matrix(W, spec)
        if any(np.abs(m - prev).sum() <= dedup_tol for prev in matrices):
            continue
        matrices.append(m)
        provenance.append(spec)

    density = edge_density(W)
    for m in matrices:
        if abs(m.sum() - density) > 1e-10:
            raise StepGraphonError("cut matrix total drifted from the edge density")
    return MultiwayMatrixSet(a, matrices, provenance)


def multiway_hausdorff(su, sw):
    """Hausdorff distance of two sampled cut sets under entrywise l1."""
    if su.q != sw.q:
        raise DimensionMismatch(f"part counts differ: {su.q} != {sw.q}")
    na, nb = len(su), len(sw)
    if na == 0 or nb == 0:
        raise DimensionMismatch("cut sets must be nonempty")
    d = np.zeros((na, nb))
    for i, m in enumerate(su.matrices):
        for j, npr in enumerate(sw.matrices):
            d[i, j] = np.abs(m - npr).sum()
    return hausdorff_from_matrix(d)


def part_index_bound(a, depth):
    """Largest dyadic-enumeration index representing the parts exactly.

    The canonical parts are the consecutive intervals with masses a; each
    must coincide with one interval of the breadth-first dyadic family up to
    the given depth.  The returned bound enters the quantitative transfer
    from envelope distance to cut-set distance.
    """
    a = np.asarray(a, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(a)))
    cum[-1] = 1.0
    family = dyadic_intervals(depth)
    indices = []
    for lo, hi in zip(cum[:-1], cum[1:]):
        found = None
        for idx, (x, y) in enumerate(family, start=1):
            if abs(x - lo) <= 1e-12 and abs(y - hi) <= 1e-12:
                found = idx
                break
        if found is None:
            raise StepGraphonError(
                f"part [{lo}, {hi}) is not a dyadic interval at depth {depth}")
        indices.append(found)
    return max(indices)
