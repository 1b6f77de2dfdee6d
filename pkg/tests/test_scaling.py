import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from triperc.errors import InsufficientData, InvalidInput
from triperc.matebij import interface, phi_inverse
from triperc.sampler import SamplerConfig, sample_walk_peeling, substream
from triperc.scaling import (
    CONSTANTS,
    EnsembleStats,
    boundary_for_edges,
    diameter_exponent,
    graph_diameter,
    hill_estimator,
    increment_moments,
    interface_jump_tail,
    interface_jumps,
    markov_experiment,
    markov_split_test,
    sample_sized_map,
    split_off_components,
    windowed_tail_index,
)


def iid_walks(count, steps, seed):
    rng = np.random.default_rng(seed)
    dx = np.array([[1, 0], [0, 1], [-1, -1]])
    out = []
    for _ in range(count):
        s = dx[rng.integers(0, 3, steps)]
        out.append(np.vstack([[0, 0], np.cumsum(s, axis=0)]))
    return out


def test_constants():
    assert CONSTANTS.a == pytest.approx((2 / 3) ** 0.25)
    assert CONSTANTS.b == 3
    assert CONSTANTS.c == pytest.approx(1.5 ** 0.5)
    assert CONSTANTS.s == pytest.approx(6 * 1.5 ** 0.75)


def test_unconditioned_step_moments():
    m = increment_moments(iid_walks(200, 2000, 1), 1.0, n=None, n_boot=50)
    assert m.var_L == pytest.approx(2 / 3, abs=0.02)
    assert m.var_R == pytest.approx(2 / 3, abs=0.02)
    assert m.cov == pytest.approx(1 / 3, abs=0.02)
    assert m.correlation == pytest.approx(0.5, abs=0.02)
    exact = {"var_L": 2 / 3, "var_R": 2 / 3, "cov": 1 / 3, "correlation": 0.5}
    for k, v in exact.items():
        assert abs(getattr(m, k) - v) < 4 * m.stderr[k]


def test_stderr_shrinks_like_root_k():
    small = increment_moments(iid_walks(100, 1000, 2), 1.0, n=None, n_boot=100)
    large = increment_moments(iid_walks(400, 1000, 3), 1.0, n=None, n_boot=100)
    ratio = small.stderr["correlation"] / large.stderr["correlation"]
    assert 1.4 < ratio < 2.9


def test_constant_velocity_has_zero_variance():
    walks = [np.stack([np.arange(501), 2 * np.arange(501)], axis=1) for _ in range(100)]
    m = increment_moments(walks, 5.0, n=None, n_boot=10)
    assert m.var_L == pytest.approx(0.0, abs=1e-12)
    assert m.var_R == pytest.approx(0.0, abs=1e-12)


def test_moments_need_enough_walks():
    with pytest.raises(InsufficientData):
        increment_moments(iid_walks(10, 100, 0), 1.0, n=None)
    with pytest.raises(InsufficientData):
        increment_moments(iid_walks(100, 50, 0), 10.0, n=None)
    with pytest.raises(InvalidInput):
        increment_moments(iid_walks(100, 50, 0), 0.0, n=None)


def test_tail_estimators_on_synthetic_pareto():
    rng = np.random.default_rng(0)
    for beta in (1.5, 1.0):
        x = rng.pareto(beta, 200_000) + 1.0
        assert hill_estimator(x).index == pytest.approx(beta, abs=0.05)
        # discretized law P(X >= j) = j^-beta on the integers
        d = np.floor(x)
        assert windowed_tail_index(d, 8, 64, 1000).index == pytest.approx(beta, abs=0.05)


def test_tail_estimators_need_data():
    with pytest.raises(InsufficientData):
        hill_estimator(np.arange(1, 100))
    with pytest.raises(InsufficientData):
        windowed_tail_index(np.arange(1, 100), 8, 64)
    with pytest.raises(InvalidInput):
        windowed_tail_index(np.arange(1, 100), 8, 8)


def test_interface_jumps_are_split_lengths():
    cfg = SamplerConfig((30, 30), max_steps=200_000)
    for i in range(10):
        w = sample_walk_peeling(cfg, substream(4, i))
        sizes, room = interface_jumps(w)
        I = interface(phi_inverse(w))
        cut = I.split_lengths[I.split_lengths > 0]
        assert sorted(sizes.tolist()) == sorted((cut - 1).astype(float).tolist())
        assert np.all(room >= sizes)
        comps = split_off_components(w)
        assert sorted(c.boundary_len for c in comps if c.boundary_len > 2) == \
            sorted(int(x) for x in cut if x > 2)


def test_jump_tail_needs_jumps():
    cfg = SamplerConfig((3, 3))
    with pytest.raises(InsufficientData):
        interface_jump_tail([sample_walk_peeling(cfg, substream(1))])


def test_slope_regression():
    sizes = 2.0 ** np.arange(10, 17)
    assert diameter_exponent(sizes, 3 * sizes ** 0.25).slope == pytest.approx(0.25)
    fit = diameter_exponent(sizes, sizes ** 0.5, upper=2 * sizes ** 0.5)
    assert fit.slope == pytest.approx(0.5) and fit.slope_upper == pytest.approx(0.5)
    assert fit.ci95[0] <= fit.slope <= fit.ci95[1]
    with pytest.raises(InsufficientData):
        diameter_exponent(sizes[:3], sizes[:3])
    with pytest.raises(InsufficientData):
        diameter_exponent([100, 110, 120, 130], [1, 2, 3, 4])


def _exact_diameter(t):
    indptr, indices = t.adjacency_csr()
    g = csr_matrix((np.ones(indices.shape[0]), indices, indptr), shape=(t.n_vertices,) * 2)
    return int(shortest_path(g, unweighted=True, directed=False).max())


def test_graph_diameter_exact_and_bounds():
    t = sample_sized_map(1000, substream(1))
    lo, hi = graph_diameter(t)
    assert lo == hi == _exact_diameter(t)
    big = sample_sized_map(6000, substream(2))
    assert big.n_edges > 4096
    lo, hi = graph_diameter(big)
    assert lo <= _exact_diameter(big) <= hi


def test_sized_maps():
    assert boundary_for_edges(3 * 1024) == round(1.5 ** 0.5 * 32)
    t = sample_sized_map(2000, substream(3))
    assert 1800 <= t.n_edges <= 2200


def test_markov_test_calibration_and_power():
    rng = np.random.default_rng(0)
    a = rng.geometric(0.3, 300)
    b = rng.geometric(0.3, 300)
    assert markov_split_test(a, b).pvalue > 0.01
    assert markov_split_test(a, rng.geometric(0.15, 300)).pvalue < 0.01
    with pytest.raises(InsufficientData):
        markov_split_test(a[:50], b)


def test_markov_experiment_is_reproducible_and_has_power():
    r1 = markov_experiment(seed=3)
    r2 = markov_experiment(seed=3)
    assert r1 == r2
    assert r1.sizes[0] >= 200
    assert markov_experiment(seed=3, fresh_ell=6).pvalue < 0.01


def test_ensemble_stats_records():
    s = EnsembleStats(seed=5)
    s.add(N=10, n=3)
    s.add(N=13, n=4)
    assert s.column("n").tolist() == [3, 4]
    assert s.to_dict()["seed"] == 5
