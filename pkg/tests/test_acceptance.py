"""End-to-end acceptance checks.

Each test appends one PASS/FAIL line to the terminal summary.  Run them alone
with ``pytest -m acceptance`` or skip them with ``-m "not acceptance"``.
"""

import time

import numpy as np
import pytest

from triperc import combmap
from triperc.combmap import BLUE, RED
from triperc.matebij import peel, peel_z, phi, phi_inverse, space_filling_exploration
from triperc.nested import decompose, walk_bubble_tree
from triperc.observables import (
    _Arcs,
    _blue_inner,
    cardy_probabilities,
    crossing_event_exhaustive,
    flip_and_diff,
    loop_ensemble,
)
from triperc.sampler import (
    SamplerConfig,
    acceptance_rate,
    iter_walks,
    partition_check,
    sample_map,
    sample_walk_in_window,
    sample_walk_peeling,
    substream,
)
from triperc.scaling import (
    diameter_experiment,
    hill_estimator,
    jumps_experiment,
    markov_experiment,
    moments_experiment,
    windowed_tail_index,
)
from triperc.walkcore import Walk, ancestor_free_times, matching_step

from conftest import ACCEPTANCE_LINES, check_bubble_tree, small_walks, tree_summary

pytestmark = pytest.mark.acceptance


def report(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def exhaustive():
    return small_walks(13)


def random_small_walks(count, seed, max_ell=5, max_steps=400):
    """Member walks over random small splits, skipping truncated draws."""
    rng = substream(seed)
    out = []
    while len(out) < count:
        lL, lR = (int(x) for x in rng.integers(0, max_ell + 1, 2))
        w = sample_walk_peeling(SamplerConfig((lL, lR), max_steps=max_steps, max_attempts=1), rng)
        if isinstance(w, Walk):
            out.append(w)
    return out


def walks_near(n_steps, count, seed, split=(20, 20)):
    return [sample_walk_in_window(split, int(0.8 * n_steps), int(1.2 * n_steps), substream(seed, i))
            for i in range(count)]


def test_01_exhaustive_round_trip():
    t0 = time.perf_counter()
    walks = small_walks(13)
    seen = set()
    bad = 0
    for w in walks:
        p = phi_inverse(w)
        bad += phi(p) != w
        seen.add(combmap.canonical_form(p.triangulation))
    dt = time.perf_counter() - t0
    n = len(walks)
    ok = bad == 0 and len(seen) == n and dt < 60
    report(1, "exhaustive round trip N <= 13", ok,
           f"{n} walks, {bad} mismatches, {len(seen)} distinct maps, {dt:.1f} s")


def test_02_edge_count_law(exhaustive):
    def holds(w):
        p = phi_inverse(w)
        lL, lR = w.start
        return p.n_edges == len(w) == 3 * p.n_inner + 2 * lL + 2 * lR + 1 and p.n_inner == w.inner_count()

    sampled = random_small_walks(10_000, 1)
    bad = sum(not holds(w) for w in exhaustive) + sum(not holds(w) for w in sampled)
    report(2, "edge count law", bad == 0,
           f"{len(exhaustive)} exhaustive + {len(sampled)} random, {bad} violations")


def test_03_interface_times_are_ancestor_free(exhaustive):
    def holds(w):
        rec = space_filling_exploration(phi_inverse(w))
        return np.array_equal(rec.interface_times, ancestor_free_times(w, len(w) - 1))

    bad = sum(not holds(w) for w in exhaustive)
    sizes = []
    for w in walks_near(10_000, 1000, 3):
        sizes.append(len(w))
        bad += not holds(w)
    report(3, "interface times = ancestor-free times", bad == 0,
           f"{len(exhaustive)} exhaustive + 1000 walks of median length {int(np.median(sizes))}, {bad} violations")


def boundary_counts_hold(w):
    p = phi_inverse(w)
    t = p.triangulation
    tm = space_filling_exploration(p).time_of_edge()
    c = t.colors
    left = {int(tm[t.edge_of[h]]) for h in t.boundary if c[t.origin[h]] == RED and c[t.head(h)] == RED}
    right = {int(tm[t.edge_of[h]]) for h in t.boundary if c[t.origin[h]] == BLUE and c[t.head(h)] == BLUE}
    N = len(w)
    cs = [i for i in range(1, N) if w.step(i) == 2]
    no_a = {i - 1 for i in cs if matching_step(w, i, "L") is None}
    no_b = {i - 1 for i in cs if matching_step(w, i, "R") is None}
    lL, lR = w.start
    return len(no_a) == lL and len(no_b) == lR and no_a == left and no_b == right


def test_04_boundary_counts(exhaustive):
    sampled = random_small_walks(1000, 4, max_ell=12, max_steps=600)
    bad = sum(not boundary_counts_hold(w) for w in exhaustive + sampled)
    report(4, "unmatched c-steps are the boundary edges", bad == 0,
           f"{len(exhaustive)} exhaustive + {len(sampled)} random, {bad} violations")


def test_05_sampler_normalization():
    t0 = time.perf_counter()
    r00, _ = acceptance_rate(0, 0, 100_000, seed=51)
    r10, _ = acceptance_rate(1, 0, 100_000, seed=52)
    pc = partition_check(0, 4)
    sums = pc.partial_sums
    increasing = all(b > a for a, b in zip(sums, sums[1:]))
    dt = time.perf_counter() - t0
    ok = abs(r00 - 3 / 8) <= 0.01 and abs(r10 - 1 / 16) <= 0.005 and increasing \
        and sums[-1] < 9 / 8 and dt < 300
    report(5, "sampler normalization", ok,
           f"rate(0,0)={r00:.4f} (3/8), rate(1,0)={r10:.4f} (1/16), "
           f"partial sums {[round(s, 6) for s in sums]} < 9/8, {dt:.0f} s")


def test_06_peel_commutation(exhaustive):
    def holds(w):
        r = peel(phi_inverse(w))
        zp, zs = peel_z(w)
        if phi(r.primary) != zp or (zs is None) != (r.split_off is None):
            return False
        return zs is None or phi(r.split_off) == zs

    sampled = random_small_walks(1000, 6, max_steps=2000)
    bad = sum(not holds(w) for w in exhaustive + sampled)
    report(6, "peeling commutes with the encoding", bad == 0,
           f"{len(exhaustive)} exhaustive + {len(sampled)} random, {bad} violations")


def test_07_nested_consistency():
    bad = 0
    nodes = 0
    for i in range(1000):
        w = sample_walk_in_window((20, 0), 8000, 12_000, substream(7, i))
        t = combmap.restore_monochromatic(phi_inverse(w), RED)
        # no width cap: a capped tree drops children and cannot tile
        a = decompose(t, 8, 10 ** 9)
        b = walk_bubble_tree(a.walk, 8, 10 ** 9)
        nodes += len(b.nodes)
        try:
            assert tree_summary(a) == tree_summary(b)
            check_bubble_tree(b)
        except AssertionError:
            bad += 1
    report(7, "bubble trees from map and walk agree and tile", bad == 0,
           f"1000 maps with about 1e4 edges, depth <= 8, {nodes} nodes, {bad} failing maps")


def test_08_walk_correlation():
    t0 = time.perf_counter()
    m, rec = moments_experiment(200, 300_000, seed=8)
    dt = time.perf_counter() - t0
    N = rec.column("N")
    ok = 0.47 <= m.correlation <= 0.53 and N.min() >= 300_000 and dt < 600
    report(8, "increment correlation", ok,
           f"rho={m.correlation:.4f} +- {m.stderr['correlation']:.4f}, var_L={m.var_L:.3f}, "
           f"var_R={m.var_R:.3f} over 200 walks with N >= {int(N.min())}, {dt:.0f} s")


def test_09_interface_jump_tail():
    rng = np.random.default_rng(9)
    x = rng.pareto(1.5, 200_000) + 1.0
    hill = hill_estimator(x).index
    windowed = windowed_tail_index(np.floor(x), 8, 64).index
    calibrated = abs(hill - 1.5) <= 0.05 and abs(windowed - 1.5) <= 0.05
    est, rec = jumps_experiment(500, 100_000, seed=9)
    ok = calibrated and 1.35 <= est.index <= 1.65 and rec.column("N").min() >= 100_000
    report(9, "interface jump tail", ok,
           f"calibration hill={hill:.3f} windowed={windowed:.3f}; "
           f"beta={est.index:.3f} +- {est.stderr:.3f} from {est.used} of {est.pooled} jumps")


def test_10_diameter_exponent():
    t0 = time.perf_counter()
    fit, _ = diameter_experiment(per_size=30, seed=10)
    dt = time.perf_counter() - t0
    ok = 0.20 <= fit.slope <= 0.30 and dt < 1800
    report(10, "diameter exponent", ok,
           f"slope={fit.slope:.3f} (95% CI {fit.ci95[0]:.3f}..{fit.ci95[1]:.3f}, "
           f"upper-bound slope {fit.slope_upper:.3f}) over 2^10..2^16 edges, {dt:.0f} s")


def test_11_markov_property():
    seeds = substream(11).integers(0, 2 ** 63, 40)
    pvals = [markov_experiment(4, seed=int(s)).pvalue for s in seeds]
    passed = sum(p > 0.01 for p in pvals)
    report(11, "split-off components are fresh samples", passed >= 0.95 * 40,
           f"{passed}/40 KS tests with p > 0.01 (min p {min(pvals):.3f})")


def _maps_up_to(n_vertices):
    """Every rooted map with at least three boundary edges and at most ``n_vertices`` vertices."""
    seen = {}
    for ell in range(3, n_vertices + 1):
        n_steps = 3 * (n_vertices - ell) + 2 * (ell - 1) + 1
        for w in iter_walks(ell - 1, 0, n_steps):
            t = phi_inverse(w).triangulation
            if t.n_vertices <= n_vertices:
                u = t.with_colors(np.zeros(t.n_vertices, dtype=np.int8))
                seen.setdefault(combmap.canonical_form(u), u)
    return list(seen.values())


def _crossing_mismatches(t, triples):
    inner = np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())
    checks = bad = 0
    for mask in range(1 << inner.shape[0]):
        col = np.full(t.n_vertices, RED, dtype=np.int8)
        col[inner[[(mask >> q) & 1 == 1 for q in range(inner.shape[0])]]] = BLUE
        tc = t.with_colors(col)
        for tr in triples:
            fast = _Arcs(tc, *tr).qualifying(_blue_inner(tc))
            for v in range(t.n_vertices):
                checks += 1
                bad += crossing_event_exhaustive(tc, *tr, v) != fast[v]
    return checks, bad


def _clockwise_triples(t):
    b = t.boundary
    ell = b.shape[0]
    return [(int(b[i]), int(b[j]), int(b[k])) for i in range(ell) for j in range(ell) for k in range(ell)
            if len({i, j, k}) == 3 and (i - j) % ell < (i - k) % ell]


def test_12_observables_exactness():
    # reroot invariance of the loop ensemble and the double flip
    reroot_bad = flip_bad = flips = 0
    rng = substream(12)
    for _ in range(1000):
        t = sample_map(int(rng.integers(3, 12)), rng, max_steps=4000)
        base = loop_ensemble(t)
        h = int(t.boundary[int(rng.integers(0, t.boundary_len))])
        reroot_bad += loop_ensemble(combmap.reroot(t, h)).edge_sets() != base.edge_sets()
        inner = np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())
        if inner.shape[0]:
            v = int(rng.choice(inner))
            once, _ = flip_and_diff(t, v, base)
            colors = np.array(t.colors)
            colors[v] ^= 1
            twice, _ = flip_and_diff(t.with_colors(colors), v, once)
            flip_bad += twice.edge_sets() != base.edge_sets()
            flips += 1

    # crossing events: every map up to 6 vertices, then random maps with 7 to 12 vertices
    checks = cross_bad = 0
    small = _maps_up_to(6)
    for t in small:
        c, b = _crossing_mismatches(t, _clockwise_triples(t))
        checks += c
        cross_bad += b
    big = 0
    rng = substream(120)
    while big < 40:
        t = sample_map(int(rng.integers(3, 7)), rng, max_steps=200)
        if not 7 <= t.n_vertices <= 12 or t.n_inner > 10 or t.boundary_len < 3:
            continue
        triples = _clockwise_triples(t)
        pick = rng.choice(len(triples), min(3, len(triples)), replace=False)
        c, b = _crossing_mismatches(t.with_colors(np.zeros(t.n_vertices, dtype=np.int8)),
                                    [triples[k] for k in pick])
        checks += c
        cross_bad += b
        big += 1

    # Cardy Monte Carlo against exhaustive enumeration
    cardy_bad = cardy_maps = 0
    rng = substream(121)
    while cardy_maps < 10:
        t = sample_map(int(rng.integers(4, 8)), rng, max_steps=5000)
        if not 2 <= t.n_inner <= 6:
            continue
        u = (0.0, 1 / 3, 2 / 3)
        v = int(np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())[0])
        exact = cardy_probabilities(t, u, v, exhaustive=True)
        mc = cardy_probabilities(t, u, v, samples=4000, seed=cardy_maps)
        se = np.sqrt(exact.p * (1 - exact.p) / mc.samples)
        cardy_bad += int(np.sum(np.abs(mc.p - exact.p) > 3 * se + 1e-12))
        cardy_maps += 1

    ok = reroot_bad == flip_bad == cross_bad == cardy_bad == 0
    report(12, "observables exactness", ok,
           f"reroot {reroot_bad}/1000 differ, double flip {flip_bad}/{flips} differ, "
           f"crossing {cross_bad}/{checks} mismatches on {len(small)} exhaustive + {big} random maps, "
           f"Cardy {cardy_bad}/{3 * cardy_maps} beyond 3 SE")
