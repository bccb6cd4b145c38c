import itertools

import numpy as np
import pytest

from stepgraphon import (
    Coupling,
    EmptySet,
    MarginalMismatch,
    SignedStepKernel,
    StepGraphon,
    TooManyBlocksForExact,
    aligned_cut_norm_distance,
    cut_distance,
    cut_norm,
    cut_norm_distance,
    grid_version,
    hausdorff_distance,
    l1_distance,
    interlace_version,
    overlap_coupling,
    weak_star_distance,
)
from stepgraphon.metrics import dyadic_intervals
from stepgraphon.named import bipartite_graphon

from conftest import random_graphon, random_kernel

HALF = StepGraphon([1.0], [[0.5]])


def brute_force_cut_norm(kernel):
    """Independent oracle: enumerate every 0/1 box on both sides."""
    keep = kernel.weights > 0
    a = kernel.weights[keep]
    v = kernel.values[np.ix_(keep, keep)]
    k = len(a)
    best = 0.0
    for s_bits in itertools.product((0, 1), repeat=k):
        for t_bits in itertools.product((0, 1), repeat=k):
            s = np.array(s_bits, dtype=float)
            t = np.array(t_bits, dtype=float)
            best = max(best, abs((a * s) @ v @ (a * t)))
    return best


# ------------------------------------------------------------------- coupling

def test_coupling_validation():
    Coupling([[0.5, 0.0], [0.0, 0.5]])
    with pytest.raises(MarginalMismatch):
        Coupling([[0.5, 0.0], [0.0, 0.5]], [0.4, 0.6], [0.5, 0.5])
    with pytest.raises(MarginalMismatch):
        Coupling([[-0.1, 0.6], [0.5, 0.0]])


def test_northwest_aligns_interval_partitions():
    c = Coupling.northwest([0.25, 0.75], [0.5, 0.5])
    assert np.allclose(c.matrix, [[0.25, 0.0], [0.25, 0.5]])


# ------------------------------------------------------------------- cut norm

def test_cut_norm_zero_kernel():
    z = SignedStepKernel([0.5, 0.5], [[0.0, 0.0], [0.0, 0.0]])
    assert cut_norm(z, mode="exact").value == 0.0


def test_cut_norm_two_block_difference():
    # all sixteen 0/1 boxes peak at |1/2 * 1/2 * 1/2| = 0.125
    y = SignedStepKernel([0.5, 0.5], [[-0.5, 0.5], [0.5, -0.5]])
    assert brute_force_cut_norm(y) == 0.125
    res = cut_norm(y, mode="exact")
    assert res.value == 0.125
    a = y.weights
    achieved = abs((a * res.witness_s) @ y.values @ (a * res.witness_t))
    assert abs(achieved - res.value) <= 1e-12


def test_cut_norm_witness_invariant(rng):
    for _ in range(20):
        kernel = random_kernel(rng)
        res = cut_norm(kernel, mode="exact")
        a = kernel.weights
        achieved = abs((a * res.witness_s) @ kernel.values @ (a * res.witness_t))
        assert abs(achieved - res.value) <= 1e-12
        assert res.value == pytest.approx(brute_force_cut_norm(kernel), abs=1e-12)


def test_cut_norm_heuristic_never_exceeds_exact(rng):
    hits = 0
    trials = 1000
    for trial in range(trials):
        kernel = random_kernel(rng, k=6)
        exact = cut_norm(kernel, mode="exact").value
        heur = cut_norm(kernel, mode="heuristic", seed=trial).value
        assert heur <= exact + 1e-12
        hits += abs(heur - exact) <= 1e-9
    assert hits >= 0.95 * trials


def test_cut_norm_exact_cap():
    k = 25
    w = np.full(k, 1.0 / k)
    with pytest.raises(TooManyBlocksForExact):
        cut_norm(SignedStepKernel(w, np.zeros((k, k))), mode="exact")


def test_cut_norm_rearrangement_invariance(rng):
    for _ in range(10):
        v = rng.uniform(-1, 1, (4, 4))
        kernel = SignedStepKernel(np.full(4, 0.25), (v + v.T) / 2)
        refined = grid_version(kernel, 8)
        perm = rng.permutation(8)
        shuffled = grid_version(refined, 8, perm)
        v1 = cut_norm(refined, mode="exact").value
        v2 = cut_norm(shuffled, mode="exact").value
        assert abs(v1 - v2) <= 1e-10


def test_cut_norm_drops_zero_weight_blocks():
    y = SignedStepKernel([0.5, 0.0, 0.5], [[-0.5, 1, 0.5], [1, 1, 1], [0.5, 1, -0.5]])
    assert cut_norm(y, mode="exact").value == 0.125


# --------------------------------------------------------------- cut norm dist

def test_cut_norm_distance_basic():
    g = random_graphon(np.random.default_rng(7))
    assert cut_norm_distance(g, g, Coupling.diagonal(g.weights)) == 0.0
    zero = StepGraphon([1.0], [[0.0]])
    one = StepGraphon([1.0], [[1.0]])
    assert cut_norm_distance(zero, one, Coupling.diagonal([1.0])) == 1.0
    bip = bipartite_graphon()
    c = Coupling(np.full((2, 1), 0.5), bip.weights, HALF.weights)
    assert cut_norm_distance(bip, HALF, c) == 0.125


def test_metric_ordering_chain(rng):
    # weak* <= cut norm <= L1 on a shared ground space
    for _ in range(20):
        u = random_graphon(rng)
        w = random_graphon(rng)
        dcut = aligned_cut_norm_distance(u, w)
        dl1 = l1_distance(u, w)
        dws = weak_star_distance(u, w, 4)
        assert dws <= dcut + 1e-10
        assert dcut <= dl1 + 1e-10


# ----------------------------------------------------------------- cut distance

def test_cut_distance_version_is_zero(rng):
    g = random_graphon(rng, k=3, equal_mass=True)
    v = grid_version(g, 6, rng.permutation(6))
    val, coupling = cut_distance(g, v, budget={"restarts": 2, "max_iters": 5})
    assert val <= 1e-9
    coupling.require_marginals(g.weights, v.weights)


def test_cut_distance_constants():
    p = StepGraphon([1.0], [[0.2]])
    q = StepGraphon([1.0], [[0.7]])
    val, _ = cut_distance(p, q, budget={"restarts": 1, "max_iters": 2})
    assert val == pytest.approx(0.5, abs=1e-12)


def test_cut_distance_bipartite_vs_half_is_an_eighth():
    # every rearrangement of the two-block kernel keeps a box of value
    # (1/2)(a_S - b_S)(a_T - b_T), so the distance is exactly 1/8 at every
    # resolution: the pair converges in weak* but never in cut norm
    bip = bipartite_graphon()
    vals = []
    for n in (2, 4, 8):
        val, _ = cut_distance(grid_version(bip, n), grid_version(HALF, n),
                              budget={"restarts": 2, "max_iters": 4}, seed=1)
        vals.append(val)
    for val in vals:
        assert val == pytest.approx(0.125, abs=1e-9)
    assert weak_star_distance(interlace_version(bip, 4), HALF, 6) < vals[2]


def test_cut_distance_symmetry(rng):
    u = random_graphon(rng, k=3)
    w = random_graphon(rng, k=4)
    budget = {"restarts": 2, "max_iters": 5}
    d1, c1 = cut_distance(u, w, budget=budget, seed=3)
    d2, c2 = cut_distance(w, u, budget=budget, seed=3)
    assert abs(d1 - d2) <= 1e-9
    assert np.allclose(c1.matrix, c2.matrix.T, atol=1e-12)


def test_cut_distance_upper_bound_contract(rng):
    # never above the value of any deterministic coupling the optimizer sees
    for _ in range(5):
        u = random_graphon(rng, k=4, equal_mass=True)
        w = random_graphon(rng, k=4, equal_mass=True)
        val, _ = cut_distance(u, w, budget={"restarts": 2, "max_iters": 5})
        for c in (Coupling.diagonal(u.weights),
                  Coupling.product(u.weights, w.weights),
                  Coupling.northwest(u.weights, w.weights)):
            assert val <= cut_norm_distance(u, w, c) + 1e-12


def test_cut_distance_triangle_inequality(rng):
    # equal-mass four-block triples are covered by the exact permutation
    # sweep, for which the triangle inequality holds up to float noise
    for _ in range(5):
        u = random_graphon(rng, k=4, equal_mass=True)
        v = random_graphon(rng, k=4, equal_mass=True)
        w = random_graphon(rng, k=4, equal_mass=True)
        budget = {"restarts": 1, "max_iters": 3}
        duw, _ = cut_distance(u, w, budget=budget)
        duv, _ = cut_distance(u, v, budget=budget)
        dvw, _ = cut_distance(v, w, budget=budget)
        assert duw <= duv + dvw + 2e-6


# -------------------------------------------------------------------- weak*

def test_weak_star_zero_and_constants():
    g = random_graphon(np.random.default_rng(11))
    assert weak_star_distance(g, g, 5) == 0.0
    # independent oracle: enumerate the dyadic family and sum the series
    p, q = 0.2, 0.9
    for depth in (2, 4):
        intervals = [(i / 2 ** lv, (i + 1) / 2 ** lv)
                     for lv in range(depth + 1) for i in range(2 ** lv)]
        total = 0.0
        for n, (a1, b1) in enumerate(intervals, start=1):
            for m, (a2, b2) in enumerate(intervals, start=1):
                total += 2.0 ** -(n + m) * abs(p - q) * (b1 - a1) * (b2 - a2)
        got = weak_star_distance(StepGraphon([1.0], [[p]]),
                                 StepGraphon([1.0], [[q]]), depth)
        assert got == pytest.approx(total, rel=1e-12)


def test_weak_star_enumeration_order():
    fam = dyadic_intervals(2)
    assert fam[0] == (0.0, 1.0)
    assert fam[1] == (0.0, 0.5) and fam[2] == (0.5, 1.0)
    assert len(fam) == 7


def test_weak_star_interlacing_collapse():
    bip = bipartite_graphon()
    values = [weak_star_distance(interlace_version(bip, n), HALF, 6)
              for n in (1, 2, 4, 8, 16, 32, 64)]
    assert all(values[i + 1] < values[i] for i in range(len(values) - 1))
    assert values[-1] < 0.01


# ------------------------------------------------------------------ hausdorff

def test_hausdorff_examples():
    d = lambda x, y: abs(x - y)
    assert hausdorff_distance([0.0, 1.0], [0.0, 1.0], d) == 0.0
    assert hausdorff_distance([0.0], [1.0], d) == 1.0
    # four pairwise distances: 0.4, 0.6 -> directed sups 0.6 and 0.4
    assert hausdorff_distance([0.0, 1.0], [0.4], d) == pytest.approx(0.6)
    with pytest.raises(EmptySet):
        hausdorff_distance([], [0.0], d)


def test_hausdorff_symmetry_and_triangle(rng):
    d = lambda x, y: abs(x - y)
    for _ in range(30):
        a = rng.random(int(rng.integers(1, 6))).tolist()
        b = rng.random(int(rng.integers(1, 6))).tolist()
        c = rng.random(int(rng.integers(1, 6))).tolist()
        dab = hausdorff_distance(a, b, d)
        assert dab == hausdorff_distance(b, a, d)
        assert dab <= hausdorff_distance(a, c, d) + hausdorff_distance(c, b, d) + 1e-12


def test_overlap_coupling_matches_shared_geometry():
    u = StepGraphon([0.25, 0.75], [[0.1, 0.6], [0.6, 0.9]])
    w = bipartite_graphon()
    c = overlap_coupling(u, w)
    c.require_marginals(u.weights, w.weights)
    assert np.allclose(c.matrix, [[0.25, 0.0], [0.25, 0.5]])
