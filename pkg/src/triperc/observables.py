"""Percolation observables on a colored triangulation.

Clusters are the components left after deleting bichromatic edges.  Every
cluster that avoids the boundary is surrounded by a loop: the bichromatic
edges joining it to the part of the map that still sees the boundary.  The
loops are read as oriented dual cycles with the red endpoint of each crossed
edge on the left.

Crossing events ask for a path of inner blue vertices between two boundary
arcs; :func:`cardy_probabilities` averages three of them over fresh colorings.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from . import combmap
from .combmap import BLUE, RED, Triangulation
from .errors import (
    BadArcSpecification, BudgetExceeded, DegenerateArcs, InconsistentNode, InvalidInput,
    NotInnerVertex, NotMonochromaticBoundary,
)
from .matebij import space_filling_exploration
from .walkcore import SCALE_B

EXHAUSTIVE_COLORING_LIMIT = 20


# ---------------------------------------------------------------------------
# clusters


@dataclass(frozen=True)
class ClusterSet:
    labels: np.ndarray
    boundary_cluster: int
    colors: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.colors.shape[0])

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.labels == c)[0]


def _edge_ends(t: Triangulation):
    h = t.edge_halves[:, 0]
    return t.origin[h], t.origin[t.twin[h]]


def clusters(t: Triangulation) -> ClusterSet:
    """Label monochromatic components; ids follow the smallest vertex of each cluster."""
    u, w = _edge_ends(t)
    keep = t.colors[u] == t.colors[w]
    nV = t.n_vertices
    adj = coo_matrix((np.ones(int(keep.sum())), (u[keep], w[keep])), shape=(nV, nV))
    _, raw = connected_components(adj, directed=False)
    # relabel by first occurrence so ids do not depend on scipy internals
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.shape[0])
    labels = relabel[raw].astype(np.int64)
    colors = t.colors[np.sort(first)].astype(np.int8)
    bc = int(labels[t.origin[t.root]])
    return ClusterSet(labels, bc, colors)


# ---------------------------------------------------------------------------
# loops


@dataclass(frozen=True, eq=False)
class Loop:
    """Boundary of a filled cluster.

    ``half_edges`` lists the crossed edges in dual-cycle order, each oriented
    from its red to its blue endpoint, starting at the edge the exploration
    reaches first.  ``mass`` is the half-degree sum over the filled region and
    ``area`` the same mass divided by ``SCALE_B * n``.
    """

    cluster: int
    color: int
    half_edges: tuple
    edges: tuple
    faces: tuple
    first_visit: int
    region: np.ndarray
    mass: float
    area: float

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class LoopEnsemble:
    loops: list
    clusters: ClusterSet
    scale_n: float

    def __len__(self) -> int:
        return len(self.loops)

    def edge_sets(self) -> set:
        return {lp.edge_set for lp in self.loops}

    def by_edge_set(self) -> dict:
        return {lp.edge_set: lp for lp in self.loops}

    def to_rows(self) -> list[dict]:
        return [{"id": i, "cluster": lp.cluster, "length": len(lp), "mass": lp.mass, "area": lp.area}
                for i, lp in enumerate(self.loops)]


def _cluster_tree(t: Triangulation, cs: ClusterSet):
    """Parent of each cluster in the adjacency tree rooted at the boundary cluster."""
    u, w = _edge_ends(t)
    cu, cw = cs.labels[u], cs.labels[w]
    bich = cu != cw
    pairs = np.unique(np.sort(np.stack([cu[bich], cw[bich]], axis=1), axis=1), axis=0)
    k = cs.n_clusters
    if pairs.shape[0] != k - 1:
        raise InconsistentNode("cluster adjacency is not a tree")
    adj = coo_matrix((np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])), shape=(k, k))
    order, pred = breadth_first_order(adj, cs.boundary_cluster, directed=False)
    if order.shape[0] != k:
        raise InconsistentNode("cluster adjacency is not connected")
    return order, pred


def _dual_cycle(t: Triangulation, start: int, in_loop: np.ndarray):
    """Follow crossed edges from ``start`` (oriented red to blue) through left faces."""
    phi, twin, edge_of, colors, origin = t.phi, t.twin, t.edge_of, t.colors, t.origin
    hs = [start]
    faces = [int(t.face_of[start])]
    h = start
    while True:
        th = int(twin[h])
        nxt = -1
        for g in (int(phi[th]), int(phi[phi[th]])):
            if in_loop[edge_of[g]]:
                nxt = g
                break
        if nxt < 0 or colors[origin[nxt]] != RED:
            raise InconsistentNode("loop edges do not form a red-left dual cycle")
        if nxt == start:
            return hs, faces
        hs.append(nxt)
        faces.append(int(t.face_of[nxt]))
        if len(hs) > t.n_edges:
            raise InconsistentNode("dual cycle does not close")
        h = nxt


def loop_ensemble(t: Triangulation, scale_n: float | None = None) -> LoopEnsemble:
    """One loop per cluster that avoids the boundary, ordered by first exploration visit.

    ``scale_n`` sets the area normalization; it defaults to the number of
    inner vertices (at least one).
    """
    if not combmap.is_monochromatic(t):
        raise NotMonochromaticBoundary("loop ensembles need a monochromatic boundary")
    n = float(max(t.n_inner, 1) if scale_n is None else scale_n)
    cs = clusters(t)
    if cs.n_clusters == 1:
        return LoopEnsemble([], cs, n)
    order, pred = _cluster_tree(t, cs)
    k = cs.n_clusters

    # filled region of a cluster = its subtree; Euler ranges via preorder
    children = [[] for _ in range(k)]
    for c in order[1:]:
        children[pred[c]].append(int(c))
    tin = np.empty(k, dtype=np.int64)
    tout = np.empty(k, dtype=np.int64)
    clock = 0
    stack = [(cs.boundary_cluster, False)]
    while stack:
        c, done = stack.pop()
        if done:
            tout[c] = clock
            continue
        tin[c] = clock
        clock += 1
        stack.append((c, True))
        stack.extend((ch, False) for ch in reversed(children[c]))

    deg = t.vertex_degrees().astype(np.float64)
    pos_of_vertex = tin[cs.labels]
    vorder = np.argsort(pos_of_vertex, kind="stable")
    sorted_pos = pos_of_vertex[vorder]
    cum_mass = np.concatenate([[0.0], np.cumsum(deg[vorder] / 2.0)])

    # each bichromatic edge separates a cluster from its parent
    u, w = _edge_ends(t)
    cu, cw = cs.labels[u], cs.labels[w]
    bich = np.nonzero(cu != cw)[0]
    owner = np.where(pred[cu[bich]] == cw[bich], cu[bich], cw[bich])
    times = space_filling_exploration(
        combmap.identify_monochromatic_as_dichromatic(t, t.root)).time_of_edge()

    loops = []
    in_loop = np.zeros(t.n_edges, dtype=bool)
    by_owner = np.argsort(owner, kind="stable")
    bounds = np.searchsorted(owner[by_owner], np.arange(k + 1))
    for c in range(k):
        if c == cs.boundary_cluster:
            continue
        edges = bich[by_owner[bounds[c]:bounds[c + 1]]]
        first = edges[np.argmin(times[edges])]
        h0 = int(t.edge_halves[first, 0])
        if t.colors[t.origin[h0]] != RED:
            h0 = int(t.twin[h0])
        in_loop[edges] = True
        hs, faces = _dual_cycle(t, h0, in_loop)
        in_loop[edges] = False
        if len(hs) != edges.shape[0]:
            raise InconsistentNode("loop edges split into several dual cycles")
        lo, hi = np.searchsorted(sorted_pos, [tin[c], tout[c]])
        region = np.sort(vorder[lo:hi])
        mass = float(cum_mass[hi] - cum_mass[lo])
        loops.append(Loop(
            cluster=c, color=int(cs.colors[c]), half_edges=tuple(hs),
            edges=tuple(int(e) for e in t.edge_of[hs]), faces=tuple(faces),
            first_visit=int(times[first]), region=region, mass=mass,
            area=mass / (SCALE_B * n),
        ))
    loops.sort(key=lambda lp: lp.first_visit)
    return LoopEnsemble(loops, cs, n)


def loop_ensemble_reference(t: Triangulation) -> set:
    """Loop edge sets straight from the definition, one breadth-first search per cluster."""
    if not combmap.is_monochromatic(t):
        raise NotMonochromaticBoundary("loop ensembles need a monochromatic boundary")
    cs = clusters(t)
    u, w = _edge_ends(t)
    indptr, nbrs = t.adjacency_csr()
    bvert = int(t.origin[t.root])
    out = set()
    for c in range(cs.n_clusters):
        if c == cs.boundary_cluster:
            continue
        in_c = cs.labels == c
        seen = np.zeros(t.n_vertices, dtype=bool)
        seen[bvert] = True
        queue = [bvert]
        while queue:
            x = queue.pop()
            for y in nbrs[indptr[x]:indptr[x + 1]]:
                if not seen[y] and not in_c[y]:
                    seen[y] = True
                    queue.append(int(y))
        sel = (in_c[u] & seen[w]) | (in_c[w] & seen[u])
        out.add(frozenset(int(e) for e in np.nonzero(sel)[0]))
    return out


# ---------------------------------------------------------------------------
# color flips and pivotal points


def _check_inner(t: Triangulation, v: int) -> None:
    if not 0 <= v < t.n_vertices:
        raise NotInnerVertex(f"vertex {v} does not exist")
    if np.isin(v, t.boundary_vertices()):
        raise NotInnerVertex(f"vertex {v} is on the boundary")


def flip_and_diff(t: Triangulation, v: int, base: LoopEnsemble | None = None):
    """Loop ensemble after flipping ``v`` and the loops present in exactly one of the two."""
    v = int(v)
    _check_inner(t, v)
    base = loop_ensemble(t) if base is None else base
    colors = np.array(t.colors)
    colors[v] ^= 1
    flipped = loop_ensemble(t.with_colors(colors), scale_n=base.scale_n)
    before, after = base.by_edge_set(), flipped.by_edge_set()
    diff = [lp for key, lp in before.items() if key not in after]
    diff += [lp for key, lp in after.items() if key not in before]
    return flipped, diff


@dataclass(frozen=True)
class PivotalSet:
    vertices: np.ndarray
    changed_loops: np.ndarray
    mass_per_point: float

    @property
    def total_mass(self) -> float:
        return self.vertices.shape[0] * self.mass_per_point


def epsilon_pivotal(t: Triangulation, eps: float, scale_n: float | None = None) -> PivotalSet:
    """Inner vertices whose flip changes at least three loops of area at least ``eps``.

    ``changed_loops[v]`` counts those loops for every vertex (zero on the
    boundary).  Each pivotal vertex carries mass ``n^{-1/4}``.
    """
    if not eps > 0:
        raise InvalidInput("eps must be positive")
    base = loop_ensemble(t, scale_n)
    counts = np.zeros(t.n_vertices, dtype=np.int64)
    on_boundary = np.zeros(t.n_vertices, dtype=bool)
    on_boundary[t.boundary_vertices()] = True
    for v in np.nonzero(~on_boundary)[0]:
        _, diff = flip_and_diff(t, int(v), base)
        counts[v] = sum(1 for lp in diff if lp.area >= eps)
    return PivotalSet(np.nonzero(counts >= 3)[0], counts, base.scale_n ** -0.25)


# ---------------------------------------------------------------------------
# crossing events


class _Arcs:
    """Boundary arcs and face adjacency shared by every coloring of one map."""

    def __init__(self, t: Triangulation, e0: int, e1: int, e2: int):
        b = t.boundary
        ell = b.shape[0]
        index = {int(h): i for i, h in enumerate(b)}
        ks = []
        for e in (e0, e1, e2):
            if int(e) not in index:
                raise BadArcSpecification(f"half-edge {e} is not a counterclockwise boundary half-edge")
            ks.append(index[int(e)])
        k0, k1, k2 = ks
        if len({k0, k1, k2}) < 3:
            raise DegenerateArcs("arc edges must be distinct")
        if not (k0 - k1) % ell < (k0 - k2) % ell:
            raise BadArcSpecification("arc edges are not in clockwise order")
        verts = t.origin[b]
        self.t = t
        self.e2 = int(e2)
        # clockwise from e_i to e_j: verts[k_i], verts[k_i - 1], ..., verts[k_j + 1]
        arc = lambda ki, kj: verts[[(ki - s) % ell for s in range((ki - kj - 1) % ell + 1)]]
        nV = t.n_vertices
        self.side = np.full(nV, -1, dtype=np.int8)  # 0: A, 1: B, 2: C, -1: inner
        self.side[arc(k1, k2)] = 0
        self.side[arc(k2, k0)] = 1
        self.side[arc(k0, k1)] = 2

        inner = (t.face_of != t.outer_face) & (t.face_of[t.twin] != t.outer_face)
        h = t.edge_halves[:, 0]
        self.inner_edge = inner[h]
        self.fa = t.face_of[h]
        self.fb = t.face_of[t.twin[h]]
        self.eu, self.ew = t.origin[h], t.origin[t.twin[h]]
        self.nF = int(t.face_size.shape[0])
        bh = b[(self.side[t.origin[b]] == 2) | (self.side[t.origin[t.twin[b]]] == 2)]
        self.seeds = np.unique(t.face_of[t.twin[bh]])
        self.e2_face = int(t.face_of[t.twin[e2]])
        # inner faces around each vertex
        hv = np.nonzero(t.face_of != t.outer_face)[0]
        self.vf_vertex = t.origin[hv]
        self.vf_face = t.face_of[hv]

    def flood(self, allowed_edges: np.ndarray, sources) -> np.ndarray:
        sel = allowed_edges & self.inner_edge
        adj = coo_matrix((np.ones(int(sel.sum())), (self.fa[sel], self.fb[sel])), shape=(self.nF, self.nF))
        _, lab = connected_components(adj, directed=False)
        return np.isin(lab, lab[np.asarray(sources)])

    def touching(self, face_mask: np.ndarray) -> np.ndarray:
        """Vertices incident to at least one face in ``face_mask``."""
        out = np.zeros(self.t.n_vertices, dtype=bool)
        out[self.vf_vertex[face_mask[self.vf_face]]] = True
        return out

    def qualifying(self, blue_inner: np.ndarray) -> np.ndarray:
        """Vertices ``v`` for which the event holds under the given inner blue set."""
        side = self.side
        wall_vertex = blue_inner | (side == 0) | (side == 1)
        blocking = wall_vertex[self.eu] & wall_vertex[self.ew] & (blue_inner[self.eu] | blue_inner[self.ew])
        far = self.flood(~blocking, self.seeds)
        nV = self.t.n_vertices
        if far[self.e2_face]:
            return np.zeros(nV, dtype=bool)
        near = self.flood(~far[self.fa] & ~far[self.fb], [self.e2_face]) & ~far
        lowest = self.inner_edge & ((far[self.fa] & near[self.fb]) | (near[self.fa] & far[self.fb]))
        out = np.zeros(nV, dtype=bool)
        for path_edges, path_vertices in self._segments(np.nonzero(lowest)[0]):
            allowed = np.ones(self.fa.shape[0], dtype=bool)
            allowed[path_edges] = False
            far_side = self.flood(allowed, self.seeds)
            out |= self.touching(~far_side & (np.arange(self.nF) != self.t.outer_face))
            out[path_vertices] = True
        return out

    def _segments(self, edges):
        """Split the lowest wall at boundary vertices and keep the A-to-B pieces."""
        nbr: dict[int, list] = {}
        for e in edges:
            a, b = int(self.eu[e]), int(self.ew[e])
            nbr.setdefault(a, []).append((b, int(e)))
            nbr.setdefault(b, []).append((a, int(e)))
        if any(len(x) > 2 for x in nbr.values()):
            raise InconsistentNode("lowest crossing is not a simple path")
        ends = [x for x, ys in nbr.items() if len(ys) == 1]
        if len(ends) != 2:
            raise InconsistentNode("lowest crossing has no endpoints")
        walk_v, walk_e = [ends[0]], []
        prev = -1
        while len(walk_v) <= len(edges):
            x = walk_v[-1]
            step = [(y, e) for y, e in nbr[x] if e != prev]
            if not step:
                break
            y, e = step[0]
            walk_v.append(y)
            walk_e.append(e)
            prev = e
        cuts = [i for i, x in enumerate(walk_v) if self.side[x] >= 0]
        for i, j in zip(cuts, cuts[1:]):
            if j - i >= 2 and {int(self.side[walk_v[i]]), int(self.side[walk_v[j]])} == {0, 1}:
                yield walk_e[i:j], walk_v[i:j + 1]


def _blue_inner(t: Triangulation, colors=None) -> np.ndarray:
    colors = t.colors if colors is None else np.asarray(colors)
    mask = colors == BLUE
    mask[t.boundary_vertices()] = False
    return mask


def crossing_event(t: Triangulation, e0: int, e1: int, e2: int, v: int) -> bool:
    """Whether a path of inner blue vertices joins the arcs ``(e1, e2)`` and ``(e2, e0)``
    with ``v`` on it or on the same side as ``e2``.

    The arc ``(ei, ej)`` is the run of boundary vertices met clockwise from
    ``ei`` to ``ej``, including one endpoint of each.  The search looks at
    the crossing closest to the arc ``(e0, e1)``, which lies below every
    other crossing.
    """
    if not 0 <= int(v) < t.n_vertices:
        raise InvalidInput(f"vertex {v} does not exist")
    arcs = _Arcs(t, e0, e1, e2)
    return bool(arcs.qualifying(_blue_inner(t))[int(v)])


def crossing_event_exhaustive(t: Triangulation, e0: int, e1: int, e2: int, v: int) -> bool:
    """Reference check by enumerating every simple crossing path.

    Only suitable for very small maps.
    """
    arcs = _Arcs(t, e0, e1, e2)
    blue = _blue_inner(t)
    v = int(v)
    not_outer = np.arange(arcs.nF) != t.outer_face
    # parallel edges are distinct paths, so walk half-edges rather than neighbors
    out_of = [[] for _ in range(t.n_vertices)]
    for h in range(t.n_half_edges):
        out_of[int(t.origin[h])].append(h)

    def satisfied(path, path_edges):
        if v in path:
            return True
        allowed = np.ones(t.n_edges, dtype=bool)
        allowed[path_edges] = False
        near = arcs.flood(allowed, [arcs.e2_face]) & not_outer
        return bool(arcs.touching(near)[v])

    def extend(path, path_edges, on_path):
        for h in out_of[path[-1]]:
            y, e = t.head(h), int(t.edge_of[h])
            if on_path[y]:
                continue
            if blue[y]:
                on_path[y] = True
                path.append(y)
                path_edges.append(e)
                if extend(path, path_edges, on_path):
                    return True
                path.pop()
                path_edges.pop()
                on_path[y] = False
            elif arcs.side[y] == 1 and len(path) >= 2 and satisfied(path + [y], path_edges + [e]):
                return True
        return False

    for a in np.nonzero(arcs.side == 0)[0]:
        on_path = np.zeros(t.n_vertices, dtype=bool)
        on_path[a] = True
        if extend([int(a)], [], on_path):
            return True
    return False


# ---------------------------------------------------------------------------
# Cardy probabilities


@dataclass(frozen=True)
class CardyEstimate:
    """Crossing frequencies ``p`` with standard errors and their normalization."""

    p: np.ndarray
    stderr: np.ndarray
    normalized: np.ndarray
    edges: tuple
    samples: int
    exact: bool

    def to_row(self) -> dict:
        row = {"samples": self.samples, "exact": self.exact}
        for i in range(3):
            row[f"p{i + 1}"] = float(self.p[i])
            row[f"se{i + 1}"] = float(self.stderr[i])
            row[f"q{i + 1}"] = float(self.normalized[i])
        return row


def arc_edges(t: Triangulation, u) -> tuple:
    """Boundary half-edges at clockwise offsets ``ceil(u_i * ell)`` from the root."""
    b = t.boundary
    ell = b.shape[0]
    if len(u) != 3 or any(not 0 <= x <= 1 for x in u):
        raise BadArcSpecification("need three arc fractions in [0, 1]")
    offs = [ceil(x * ell) % ell for x in u]
    if len(set(offs)) < 3:
        raise DegenerateArcs(f"arc fractions {tuple(u)} select coinciding edges on a boundary of length {ell}")
    order = sorted(range(3), key=lambda i: offs[i])
    if order != [0, 1, 2]:
        raise BadArcSpecification("arc fractions must be increasing")
    return tuple(int(b[(-o) % ell]) for o in offs)


def _tally(t: Triangulation, edges, v: int, colorings) -> np.ndarray:
    """Counts of the three rotated events over an iterable of inner blue masks."""
    e = edges
    geoms = [_Arcs(t, e[i], e[(i + 1) % 3], e[(i + 2) % 3]) for i in range(3)]
    hits = np.zeros(3, dtype=np.int64)
    for blue in colorings:
        for i, g in enumerate(geoms):
            hits[i] += bool(g.qualifying(blue)[v])
    return hits


def _random_colorings(t: Triangulation, rng: np.random.Generator, count: int):
    inner = np.ones(t.n_vertices, dtype=bool)
    inner[t.boundary_vertices()] = False
    for _ in range(count):
        yield inner & (rng.random(t.n_vertices) < 0.5)


def _chunk_hits(args):
    t_dict, edges, v, seed, chunk, count = args
    from .sampler import substream

    t = combmap.from_dict(t_dict)
    return _tally(t, edges, v, _random_colorings(t, substream(seed, chunk), count))


def cardy_probabilities(t: Triangulation, u, v: int, samples: int = 1000, seed: int = 0,
                        exhaustive: bool = False, chunk: int = 256, workers: int = 1) -> CardyEstimate:
    """Crossing frequencies of ``E(e_i, e_{i+1}; e_{i+2}, v)`` for ``i = 1, 2, 3``.

    The edges are placed at clockwise offsets ``ceil(u_i * ell)`` from the
    root.  Inner vertices are recolored by fair coins; chunk ``c`` of the
    samples uses the substream ``(seed, c)``, so the result does not depend
    on ``workers``.  ``exhaustive`` averages over every inner coloring
    instead.
    """
    edges = arc_edges(t, u)
    v = int(v)
    if not 0 <= v < t.n_vertices:
        raise InvalidInput(f"vertex {v} does not exist")
    if exhaustive:
        inner = np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())
        if inner.shape[0] > EXHAUSTIVE_COLORING_LIMIT:
            raise BudgetExceeded(f"{inner.shape[0]} inner vertices are too many to enumerate")

        def every():
            for mask in range(1 << inner.shape[0]):
                blue = np.zeros(t.n_vertices, dtype=bool)
                blue[inner[[(mask >> i) & 1 == 1 for i in range(inner.shape[0])]]] = True
                yield blue

        total = 1 << inner.shape[0]
        p = _tally(t, edges, v, every()) / total
        se = np.zeros(3)
    else:
        if samples < 1:
            raise InvalidInput("samples must be at least 1")
        jobs = [(t.to_dict(), edges, v, seed, c, min(chunk, samples - c * chunk))
                for c in range((samples + chunk - 1) // chunk)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                parts = list(pool.map(_chunk_hits, jobs))
        else:
            parts = [_chunk_hits(j) for j in jobs]
        hits = np.sum(parts, axis=0)
        total = samples
        p = hits / total
        se = np.sqrt(p * (1 - p) / max(total - 1, 1))
    s = p.sum()
    normalized = p / s if s > 0 else np.full(3, np.nan)
    return CardyEstimate(p, se, normalized, edges, int(total), exhaustive)
