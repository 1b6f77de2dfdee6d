"""Rescaled observables and empirical diagnostics at desk scale.

Every estimator here is a pure function of stored per-sample records, so a
rerun with the same seeds reproduces each statistic exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize, stats
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import combmap
from .combmap import RED, Triangulation, bfs_distances
from .errors import InsufficientData, InvalidInput
from .matebij import component_walk, phi_inverse, walk_interface
from .sampler import SamplerConfig, sample_walk_in_window, sample_walk_peeling, substream
from .walkcore import SCALE_A, SCALE_B, SCALE_C, SCALE_S, Walk

EXACT_DIAMETER_EDGES = 2 ** 12
MIN_SIZE_SPAN = 64


@dataclass(frozen=True)
class ScalingConstants:
    a: float = SCALE_A
    b: float = SCALE_B
    c: float = SCALE_C
    s: float = SCALE_S


CONSTANTS = ScalingConstants()


@dataclass
class EnsembleStats:
    """Per-sample records plus the seeds that produced them."""

    seed: int
    records: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)

    def add(self, **record) -> None:
        self.records.append(record)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records])

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# increments of the exploration walk


@dataclass(frozen=True)
class Moments:
    var_L: float
    var_R: float
    cov: float
    correlation: float
    stderr: dict
    increments: int


def _moments(dL, dR, dt):
    vL = np.var(dL, ddof=1) / dt
    vR = np.var(dR, ddof=1) / dt
    c = np.cov(dL, dR, ddof=1)[0, 1] / dt
    corr = c / np.sqrt(vL * vR) if vL > 0 and vR > 0 else np.nan
    return np.array([vL, vR, c, corr])


def increment_moments(walks, window: float, n="walk", trim: float = 0.05,
                      n_boot: int = 200, seed: int = 0, min_walks: int = 100) -> Moments:
    """Per-unit-time variance, covariance and correlation of walk increments.

    ``walks`` holds :class:`Walk` objects or ``(steps + 1, 2)`` position
    arrays.  ``n`` picks the scaling: ``"walk"`` uses each walk's number of
    inner vertices (time ``k / (b n)``, space ``1 / (c sqrt n)``), a number
    applies one scale to all, and ``None`` keeps raw steps.  The first and
    last ``trim`` fraction of each walk is dropped.  Errors come from a
    bootstrap over walks.
    """
    if window <= 0:
        raise InvalidInput("window must be positive")
    if len(walks) < min_walks:
        raise InsufficientData(f"need at least {min_walks} walks, got {len(walks)}")
    per_walk = []
    for w in walks:
        pos = w.positions() if isinstance(w, Walk) else np.asarray(w)
        steps = pos.shape[0] - 1
        if n is None:
            tscale, xscale = 1.0, 1.0
        else:
            nn = max(w.inner_count(), 1) if n == "walk" else float(n)
            tscale, xscale = 1.0 / (SCALE_B * nn), 1.0 / (SCALE_C * np.sqrt(nn))
        if steps * tscale < 10 * window:
            raise InsufficientData("a walk is shorter than ten windows")
        k = max(int(round(window / tscale)), 1)
        lo, hi = int(np.floor(trim * steps)), int(np.ceil((1 - trim) * steps))
        idx = np.arange(lo, hi + 1, k)
        d = np.diff(pos[idx].astype(np.float64), axis=0) * xscale
        per_walk.append(d)
    dt = window
    all_d = np.concatenate(per_walk)
    point = _moments(all_d[:, 0], all_d[:, 1], dt)
    rng = np.random.default_rng(seed)
    boots = []
    for _ in range(n_boot):
        pick = rng.integers(0, len(per_walk), len(per_walk))
        d = np.concatenate([per_walk[i] for i in pick])
        boots.append(_moments(d[:, 0], d[:, 1], dt))
    se = np.std(boots, axis=0, ddof=1)
    names = ("var_L", "var_R", "cov", "correlation")
    return Moments(*map(float, point), {k: float(v) for k, v in zip(names, se)}, int(all_d.shape[0]))


# ---------------------------------------------------------------------------
# interface jumps


def interface_jumps(w: Walk) -> tuple[np.ndarray, np.ndarray]:
    """Downward jumps of both interface boundary-length coordinates.

    Returns ``(sizes, room)`` where ``room`` is the total boundary length
    of the interface just before each jump.
    """
    _, z = walk_interface(w)
    d = np.diff(z, axis=0)
    room = np.repeat(z[:-1].sum(axis=1)[:, None], 2, axis=1)
    down = d < 0
    return -d[down].astype(np.float64), room[down].astype(np.float64)


@dataclass(frozen=True)
class TailEstimate:
    index: float
    stderr: float
    used: int
    window: tuple
    pooled: int


def hill_estimator(x, k: int | None = None, min_pooled: int = 1000) -> TailEstimate:
    """Hill estimate of ``beta`` in ``P(X > x) ~ x^{-beta}`` from the ``k`` largest values.

    ``k`` defaults to two percent of the sample.
    """
    x = np.asarray(x, dtype=np.float64)
    x = x[x > 0]
    if x.shape[0] < min_pooled:
        raise InsufficientData(f"need at least {min_pooled} positive values, got {x.shape[0]}")
    if k is None:
        k = max(int(0.02 * x.shape[0]), 10)
    if not 1 <= k < x.shape[0]:
        raise InvalidInput("k must lie in [1, len(x))")
    top = np.sort(x)[::-1][: k + 1]
    beta = 1.0 / np.mean(np.log(top[:k] / top[k]))
    return TailEstimate(float(beta), float(beta / np.sqrt(k)), int(k), (float(top[k]), float(top[0])),
                        int(x.shape[0]))


def windowed_tail_index(x, lo: int, hi: int, min_used: int = 1000) -> TailEstimate:
    """Maximum likelihood tail index of integer data restricted to ``[lo, hi]``.

    The model is a discretized Pareto law, ``P(X >= j) = (j / lo)^{-beta}``
    for integers ``j >= lo``, conditioned on ``X <= hi``.  It equals the Hill
    estimator in the limit of continuous data and ``hi = inf``; the upper cut
    keeps the fit away from jumps comparable to the system size.
    """
    if not 1 <= lo < hi:
        raise InvalidInput("need 1 <= lo < hi")
    x = np.asarray(x, dtype=np.float64)
    pooled = int(x.shape[0])
    x = x[(x >= lo) & (x <= hi)]
    if x.shape[0] < min_used:
        raise InsufficientData(f"need at least {min_used} values in [{lo}, {hi}], got {x.shape[0]}")
    vals, cnt = np.unique(x, return_counts=True)
    total = cnt.sum()

    def nll(b):
        return -(cnt * np.log(vals ** -b - (vals + 1) ** -b)).sum() + total * np.log(lo ** -b - (hi + 1) ** -b)

    res = optimize.minimize_scalar(nll, bounds=(0.01, 10.0), method="bounded", options={"xatol": 1e-8})
    b = float(res.x)
    h = 1e-4 * max(b, 1.0)
    curv = (nll(b + h) - 2 * nll(b) + nll(b - h)) / h ** 2
    se = float(1.0 / np.sqrt(curv)) if curv > 0 else float("nan")
    return TailEstimate(b, se, int(total), (float(lo), float(hi)), pooled)


JUMP_WINDOW = (8, 64)
JUMP_HEADROOM = 10


def interface_jump_tail(samples, window=JUMP_WINDOW, headroom: float = JUMP_HEADROOM,
                        min_jumps: int = 1000) -> TailEstimate:
    """Tail index of interface jumps pooled over the given walks.

    Only jumps whose size lies in ``window`` and that happen while the
    interface boundary is at least ``headroom * window[1]`` long are fitted.
    """
    return pooled_jump_tail([interface_jumps(w) for w in samples], window, headroom, min_jumps)


def pooled_jump_tail(jumps, window=JUMP_WINDOW, headroom: float = JUMP_HEADROOM,
                     min_jumps: int = 1000) -> TailEstimate:
    """Same as :func:`interface_jump_tail` from precomputed ``(sizes, room)`` pairs."""
    jumps = list(jumps)
    if not jumps:
        raise InsufficientData("no samples")
    sizes = np.concatenate([s for s, _ in jumps])
    rooms = np.concatenate([r for _, r in jumps])
    keep = rooms >= headroom * window[1]
    est = windowed_tail_index(sizes[keep], window[0], window[1], min_jumps)
    return TailEstimate(est.index, est.stderr, est.used, est.window, int(sizes.shape[0]))


# ---------------------------------------------------------------------------
# diameters


def graph_diameter(t: Triangulation, sources: int = 8, seed: int = 0) -> tuple[int, int]:
    """``(lower, upper)`` bounds on the graph diameter.

    Maps with at most ``EXACT_DIAMETER_EDGES`` edges are solved exactly.
    Above that, repeated double sweeps give the lower bound and twice the
    smallest eccentricity seen gives the upper bound.
    """
    if t.n_edges <= EXACT_DIAMETER_EDGES:
        indptr, indices = t.adjacency_csr()
        g = csr_matrix((np.ones(indices.shape[0]), indices, indptr), shape=(t.n_vertices,) * 2)
        d = shortest_path(g, unweighted=True, directed=False)
        diam = int(d.max())
        return diam, diam
    rng = np.random.default_rng(seed)
    lower, upper = 0, np.iinfo(np.int64).max
    for s in rng.integers(0, t.n_vertices, sources):
        d0 = bfs_distances(t, int(s))
        upper = min(upper, 2 * int(d0.max()))
        far = int(np.argmax(d0))
        d1 = bfs_distances(t, far)
        lower = max(lower, int(d1.max()))
        upper = min(upper, 2 * _eccentricity_center(t, d1))
    return lower, upper


def _eccentricity_center(t, d1) -> int:
    # a vertex halfway along the second sweep usually has small eccentricity
    mid = int(np.argmin(np.abs(d1 - d1.max() / 2)))
    return int(bfs_distances(t, mid).max())


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    ci95: tuple
    slope_upper: float | None = None


def _fit(x, y):
    res = stats.linregress(np.log(x), np.log(y))
    dof = max(len(x) - 2, 1)
    q = stats.t.ppf(0.975, dof)
    return res.slope, res.intercept, res.stderr, (res.slope - q * res.stderr, res.slope + q * res.stderr)


def diameter_exponent(sizes, diameters, upper=None, min_sizes: int = 4) -> SlopeFit:
    """Least-squares slope of ``log E[diam]`` against ``log`` edge count.

    ``sizes[i]`` is an edge count and ``diameters[i]`` the mean diameter at
    that size.  ``upper`` optionally gives mean upper bounds, whose slope is
    reported alongside.
    """
    x = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(diameters, dtype=np.float64)
    if x.shape[0] < min_sizes:
        raise InsufficientData(f"need at least {min_sizes} sizes")
    if x.max() / x.min() < MIN_SIZE_SPAN:
        raise InsufficientData(f"sizes must span a factor of at least {MIN_SIZE_SPAN}")
    slope, icpt, se, ci = _fit(x, y)
    up = None if upper is None else float(_fit(x, np.asarray(upper, dtype=np.float64))[0])
    return SlopeFit(float(slope), float(icpt), float(se), tuple(map(float, ci)), up)


# ---------------------------------------------------------------------------
# Markov property of the interface


@dataclass(frozen=True)
class SplitComponent:
    boundary_len: int
    inner: int
    edges: int


def split_off_components(w: Walk) -> list[SplitComponent]:
    """Components cut off by the interface, read from the gaps between interface times."""
    T, _ = walk_interface(w)
    out = []
    for a, b in zip(T[:-1], T[1:]):
        if b - a < 2:
            continue
        c = component_walk(w, int(a) + 1, int(b))
        lL, lR = c.start
        out.append(SplitComponent(lL + lR + 2, c.inner_count(), len(c)))
    return out


@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float
    edge_statistic: float
    edge_pvalue: float
    sizes: tuple


def markov_split_test(split_inner, fresh_inner, split_edges=None, fresh_edges=None,
                      min_samples: int = 200) -> KSResult:
    """Two-sample Kolmogorov-Smirnov test of split-off against fresh samples."""
    a = np.asarray(split_inner)
    b = np.asarray(fresh_inner)
    if a.shape[0] < min_samples or b.shape[0] < min_samples:
        raise InsufficientData(f"need at least {min_samples} samples on each side")
    r = stats.ks_2samp(a, b)
    if split_edges is not None and fresh_edges is not None:
        re_ = stats.ks_2samp(np.asarray(split_edges), np.asarray(fresh_edges))
        es, ep = float(re_.statistic), float(re_.pvalue)
    else:
        es, ep = float("nan"), float("nan")
    return KSResult(float(r.statistic), float(r.pvalue), es, ep, (int(a.shape[0]), int(b.shape[0])))


# ---------------------------------------------------------------------------
# experiment protocols shared by the command line and the acceptance suite


def boundary_for_edges(edges: int) -> int:
    """Boundary length matching a disk of ``edges`` edges at unit rescaled perimeter.

    A map with ``n`` inner vertices has about ``3n`` edges; the perimeter
    ``c sqrt(n)`` then has rescaled length one.
    """
    return max(3, int(round(SCALE_C * np.sqrt(edges / 3.0))))


def sample_sized_map(edges: int, rng: np.random.Generator, tol: float = 0.1) -> Triangulation:
    """Percolated Boltzmann map with red boundary and about ``edges`` edges."""
    ell = boundary_for_edges(edges)
    w = sample_walk_in_window((ell - 2, 0), int(edges * (1 - tol)), int(edges * (1 + tol)), rng)
    return combmap.restore_monochromatic(phi_inverse(w), RED)


def moments_experiment(count: int = 200, min_edges: int = 300_000, split=(330, 330),
                       window: float = 0.01, seed: int = 0) -> tuple[Moments, EnsembleStats]:
    """Increment moments of conditioned walks with at least ``min_edges`` steps."""
    rec = EnsembleStats(seed)
    walks = []
    for i in range(count):
        w = sample_walk_in_window(split, min_edges, 50 * min_edges, substream(seed, i))
        walks.append(w)
        rec.add(N=len(w), n=w.inner_count(), ell=sum(split) + 2)
    m = increment_moments(walks, window, seed=seed)
    rec.aggregates = {"var_L": m.var_L, "var_R": m.var_R, "cov": m.cov,
                      "correlation": m.correlation, "stderr": m.stderr}
    return m, rec


def jumps_experiment(count: int = 500, min_edges: int = 100_000, split=(400, 400),
                     seed: int = 0) -> tuple[TailEstimate, EnsembleStats]:
    rec = EnsembleStats(seed)
    jumps = []
    for i in range(count):
        w = sample_walk_in_window(split, min_edges, 100 * min_edges, substream(seed, i))
        # keep only the jumps; holding hundreds of long walks exhausts memory
        jumps.append(interface_jumps(w))
        rec.add(N=len(w), n=w.inner_count(), ell=sum(split) + 2, jumps=int(jumps[-1][0].shape[0]))
    est = pooled_jump_tail(jumps)
    rec.aggregates = {"index": est.index, "stderr": est.stderr, "used": est.used, "pooled": est.pooled}
    return est, rec


def diameter_experiment(sizes=tuple(2 ** k for k in range(10, 17)), per_size: int = 30,
                        seed: int = 0) -> tuple[SlopeFit, EnsembleStats]:
    rec = EnsembleStats(seed)
    lows, highs = [], []
    for j, size in enumerate(sizes):
        lo_s, hi_s = [], []
        for i in range(per_size):
            t = sample_sized_map(size, substream(seed, j, i))
            lo, hi = graph_diameter(t, seed=i)
            lo_s.append(lo)
            hi_s.append(hi)
            rec.add(target_edges=int(size), N=t.n_edges, n=t.n_inner, ell=t.boundary_len,
                    diameter_lower=lo, diameter_upper=hi)
        lows.append(np.mean(lo_s))
        highs.append(np.mean(hi_s))
    fit = diameter_exponent(sizes, lows, highs)
    rec.aggregates = {"slope": fit.slope, "stderr": fit.stderr, "ci95": list(fit.ci95),
                      "slope_upper": fit.slope_upper, "mean_lower": lows, "mean_upper": highs}
    return fit, rec


def markov_experiment(ell: int = 4, parent_split=(10, 10), needed: int = 200,
                      seed: int = 0, fresh_ell: int | None = None) -> KSResult:
    """Split-off components of boundary ``ell`` against fresh maps of boundary ``fresh_ell``."""
    fresh_ell = ell if fresh_ell is None else fresh_ell
    inner, edges = [], []
    i = 0
    cfg = SamplerConfig(parent_split, max_steps=1_000_000)
    while len(inner) < needed:
        w = sample_walk_peeling(cfg, substream(seed, 0, i))
        i += 1
        if not isinstance(w, Walk):
            continue
        for c in split_off_components(w):
            if c.boundary_len == ell:
                inner.append(c.inner)
                edges.append(c.edges)
    fresh_cfg = SamplerConfig(fresh_ell, max_steps=1_000_000)
    fi, fe = [], []
    j = 0
    while len(fi) < len(inner):
        w = sample_walk_peeling(fresh_cfg, substream(seed, 1, j))
        j += 1
        if isinstance(w, Walk):
            fi.append(w.inner_count())
            fe.append(len(w))
    return markov_split_test(inner, fi, edges, fe, min_samples=needed)
