"""Structuredness-order probes.

The order itself has no finite certificate, so the comparison API is
one-sided: it refutes "U at most as structured as W" through necessary
conditions (density, range-frequency flatness, degree-frequency flatness) or
reports the pair consistent.  Envelopes are approximated by finite clouds of
rearrangement signatures at a fixed dyadic depth.
"""

from __future__ import annotations

import numpy as np

from .core import (
    PartitionSpec,
    StepGraphon,
    edge_density,
    grid_version,
    interlace_version,
    stepping,
)
from .errors import NoInteriorValues
from .measures import check_flatter, degree_frequencies, range_frequencies
from .metrics import (
    hausdorff_from_matrix,
    rectangle_signature,
    signature_weights,
)


class OrderVerdict:
    """refuted | consistent, with one record per necessary condition."""

    def __init__(self, status, reasons):
        self.status = status
        self.reasons = reasons

    @property
    def refuted(self):
        return self.status == "refuted"

    def failed_conditions(self):
        return [r["condition"] for r in self.reasons if not r["passed"]]

    def to_dict(self):
        return {"status": self.status, "reasons": self.reasons}

    def __repr__(self):
        return f"OrderVerdict({self.status}, failed={self.failed_conditions()})"


def order_check(U, W, tol=1e-9):
    """Run the necessary conditions for U being at most as structured as W.

    Returns refuted with the failing certificates, or consistent.  A
    consistent verdict is not a proof of the order relation; the conditions
    are necessary only.
    """
    reasons = []
    du, dw = edge_density(U), edge_density(W)
    reasons.append({
        "condition": "edge-density",
        "passed": bool(abs(du - dw) <= tol),
        "detail": {"density_u": du, "density_w": dw},
    })
    wit_range = check_flatter(range_frequencies(U), range_frequencies(W), tol=tol)
    reasons.append({
        "condition": "range-frequency-flatness",
        "passed": wit_range.feasible,
        "detail": {"residual": wit_range.residual, "reason": wit_range.reason},
    })
    wit_deg = check_flatter(degree_frequencies(U), degree_frequencies(W), tol=tol)
    reasons.append({
        "condition": "degree-frequency-flatness",
        "passed": wit_deg.feasible,
        "detail": {"residual": wit_deg.residual, "reason": wit_deg.reason},
    })
    status = "consistent" if all(r["passed"] for r in reasons) else "refuted"
    return OrderVerdict(status, reasons)


def classify_extremal(W, tol=1e-9):
    """minimal | maximal | neither | both, from the positive-mass block values.

    Constants are the order minimum, 0/1-valued kernels the maxima; the
    all-0 and all-1 kernels are both.
    """
    keep = W.weights > 0
    vals = W.values[np.ix_(keep, keep)].ravel()
    if len(vals) == 0:
        return "both"
    minimal = bool(vals.max() - vals.min() <= tol)
    maximal = bool(np.minimum(vals, 1.0 - vals).max() <= tol)
    if minimal and maximal:
        return "both"
    if minimal:
        return "minimal"
    if maximal:
        return "maximal"
    return "neither"


def strictify(W, eps):
    """Doubled rearrangement with a +/- eps checker perturbation.

    The input is rearranged so the square holds four half-scale copies of
    itself; on the sub-blocks whose value lies in [eps, 1-eps] the two
    diagonal quadrants gain eps and the off-diagonal quadrants lose eps.
    Degrees and the edge density are unchanged, while any strictly convex
    value functional strictly increases, so the result sits strictly above
    the input in the structuredness order.
    """
    if eps <= 0:
        raise NoInteriorValues("eps must be positive")
    a = W.weights
    interior = ((W.values >= eps) & (W.values <= 1.0 - eps)
                & (np.outer(a, a) > 0))
    if not interior.any():
        raise NoInteriorValues(
            "no block value lies in [eps, 1-eps] on positive pair mass")
    k = W.k
    weights = np.concatenate((a, a)) / 2.0
    vals = np.zeros((2 * k, 2 * k))
    for c in (0, 1):
        for d in (0, 1):
            block = W.values.copy()
            delta = eps if c == d else -eps
            block[interior] += delta
            vals[c * k:(c + 1) * k, d * k:(d + 1) * k] = block
    return StepGraphon(weights, np.clip(vals, 0.0, 1.0))


def _rank(keys):
    lookup = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [lookup[k] for k in keys]


def _canonical_cell_order(values):
    """Deterministic cell ordering by iterated neighborhood refinement.

    Cells of rearranged copies carry bitwise-identical values, so refining
    colors by (own color, multiset of (neighbor color, value)) yields the
    same class ordering for any two cell-permuted versions of one kernel.
    Classes that survive refinement are treated as interchangeable; for
    value-homogeneous classes (constants, chessboards, generic random
    kernels) any within-class order yields the same canonical matrix.
    """
    rows = [tuple(row) for row in values]
    n = len(rows)
    colors = _rank([tuple(sorted(row)) for row in rows])
    for _ in range(n):
        keys = [(colors[c], tuple(sorted(zip(colors, rows[c])))) for c in range(n)]
        new_colors = _rank(keys)
        stable = len(set(new_colors)) == len(set(colors))
        colors = new_colors
        if stable or len(set(colors)) == n:
            break
    order = sorted(range(n), key=lambda c: colors[c])
    return np.asarray(order, dtype=int)


def canonicalize(W, n):
    """Refine W to n equal cells and reorder them canonically."""
    base = grid_version(W, n)
    order = _canonical_cell_order(base.values)
    return grid_version(base, n, order)


class EnvelopeSample:
    """Finite cloud of weak*-coordinate signatures of rearrangements."""

    def __init__(self, resolution, depth, signatures):
        self.resolution = int(resolution)
        self.depth = int(depth)
        self.signatures = np.asarray(signatures, dtype=float)

    def to_dict(self):
        return {
            "resolution": self.resolution,
            "depth": self.depth,
            "signatures": self.signatures.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["resolution"], d["depth"], d["signatures"])

    def __len__(self):
        return len(self.signatures)


def _signature(V, depth):
    return rectangle_signature(V, depth).ravel()


def sample_envelope(W, n, count, depth, seed=0):
    """Sampled rearrangement signatures plus the deterministic family.

    Includes `count` seeded uniform cell permutations, the interlacing
    versions at every level dividing the grid, and all dyadic steppings up
    to the signature depth.  The input is canonicalized first so that
    cell-permuted inputs produce identical clouds.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    base = canonicalize(W, n)
    sigs = []
    for idx in range(count):
        rng = np.random.default_rng((seed, idx))
        perm = rng.permutation(n)
        sigs.append(_signature(grid_version(base, n, perm), depth))
    for level in range(1, n + 1):
        if 2 * level > n:
            break
        if n % (2 * level) == 0:
            sigs.append(_signature(interlace_version(base, level), depth))
    for d in range(depth + 1):
        sigs.append(_signature(stepping(base, PartitionSpec.dyadic(base.weights, d)),
                               depth))
    return EnvelopeSample(n, depth, np.array(sigs))


def signature_distance(sig_a, sig_b, depth):
    """Weighted l1 distance of signatures; equals the truncated weak* metric."""
    w = signature_weights(depth).ravel()
    return float(np.abs(np.asarray(sig_a) - np.asarray(sig_b)) @ w)


def chi_estimate(U, W, n, count, depth, seed=0):
    """Hausdorff distance between sampled envelope signature clouds.

    Estimates the hyperspace distance between the two envelopes; both clouds
    are subsamples, so the value is neither an upper nor a lower bound.
    """
    eu = sample_envelope(U, n, count, depth, seed)
    ew = sample_envelope(W, n, count, depth, seed)
    w = signature_weights(depth).ravel()
    a = eu.signatures
    b = ew.signatures
    d = np.zeros((len(a), len(b)))
    for i in range(len(a)):
        d[i] = np.abs(b - a[i]) @ w
    return hausdorff_from_matrix(d)
