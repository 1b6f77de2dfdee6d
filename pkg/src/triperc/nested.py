"""Nested bubble decomposition of a percolated triangulation with monochromatic boundary.

Every bubble is identified by a multi-index (a tuple of positive integers) and
records its exploration times ``S <= T_hat <= T``: the edges of the bubble
are the ones explored during ``[S, T]`` and its target edge is explored at
``T_hat``.  A ``mono`` bubble is explored toward the boundary edge opposite
its root; a ``di`` bubble is explored toward its own dichromatic target.

:func:`decompose` builds the tree from the map (components of the bubble
minus its interface); :func:`walk_bubble_tree` rebuilds the same times from
the exploration walk alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import combmap
from .combmap import BLUE, RED, Triangulation
from .errors import InconsistentNode, InvalidInput, NodeNotFound, NotMonochromatic
from .matebij import Interface, _interface_with_colors, component_walk, phi_inverse, space_filling_exploration
from .walkcore import Walk

MONO = "mono"
DI = "di"


def parent(index: tuple) -> tuple:
    if not index:
        raise InvalidInput("the empty multi-index has no parent")
    return index[:-1]


@dataclass
class BubbleNode:
    index: tuple
    type: str
    boundary_len: int
    S: int
    T_hat: int
    T: int
    root_edge: int | None = None
    target_edge: int | None = None
    induced_monochromatic: bool | None = None
    interface: Interface | None = None
    children: list = field(default_factory=list)

    @property
    def times(self) -> tuple[int, int, int]:
        return self.S, self.T_hat, self.T

    def to_dict(self) -> dict:
        return {
            "index": list(self.index),
            "type": self.type,
            "boundary_len": self.boundary_len,
            "S": self.S,
            "T_hat": self.T_hat,
            "T": self.T,
            "children": [list(c) for c in self.children],
        }


@dataclass
class BubbleTree:
    nodes: dict
    walk: Walk
    triangulation: Triangulation | None = None

    def node(self, index) -> BubbleNode:
        try:
            return self.nodes[tuple(index)]
        except KeyError:
            raise NodeNotFound(f"no bubble with index {tuple(index)}") from None

    def children(self, index) -> list[BubbleNode]:
        return [self.nodes[c] for c in self.node(index).children]

    def times(self) -> dict:
        return {k: v.times for k, v in self.nodes.items()}

    def to_dict(self) -> dict:
        return {"nodes": [self.nodes[k].to_dict() for k in sorted(self.nodes, key=lambda k: (len(k), k))]}


# ---------------------------------------------------------------------------
# walk side


def _check_monochromatic_walk(w: Walk):
    if w.start[0] > 0 and w.start[1] > 0:
        raise InconsistentNode("walk does not encode a monochromatic boundary")


def _segment_start(w: Walk, S: int, T: int):
    """Start of the component walk of the bubble explored during ``[S, T]``."""
    return int(w.L[S] - w.L[T]), int(w.R[S] - w.R[T])


def hat_time(w: Walk, S: int, T: int) -> int:
    """Exploration time of the target of a mono bubble occupying ``[S, T]``.

    A red boundary (segment started from ``(ell - 2, 0)``) is cut after the
    first coordinate has dropped by ``floor(ell / 2)``; a blue one after the
    second coordinate has dropped by ``ceil(ell / 2)``.
    """
    sL, sR = _segment_start(w, S, T)
    if sL > 0 and sR > 0:
        raise InconsistentNode(f"segment [{S}, {T}] is not monochromatic")
    ell = sL + sR + 2
    if ell == 2:
        return T
    if sR == 0:
        coord, drop = w.L, ell // 2
    else:
        coord, drop = w.R, (ell + 1) // 2
    seg = coord[S:T + 2] - coord[S]
    hit = np.nonzero(seg == -drop)[0]
    if not hit.size:
        raise InconsistentNode("target level never reached")
    return S + int(hit[0]) - 1


def _past_runs(key: np.ndarray, S: int, t: int) -> list[tuple[int, int]]:
    """Maximal runs of ``[S, t]`` avoiding the ancestor-free times relative to ``t``."""
    n = t - S + 1
    suffix = np.empty(n, dtype=np.int64)
    suffix[-1] = np.iinfo(np.int64).max
    if n > 1:
        suffix[:-1] = np.minimum.accumulate(key[S + 1:t + 1][::-1])[::-1]
    blocked = suffix <= np.arange(S, t + 1)
    if not blocked.any():
        return []
    padded = np.concatenate([[False], blocked, [False]])
    d = np.diff(padded.astype(np.int8))
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0] - 1
    return [(S + int(a), S + int(b)) for a, b in zip(starts, ends)]


def _future_tiles(key: np.ndarray, i: int, T: int) -> list[tuple[int, int]]:
    """Tiling of ``[i, T]`` cut just before every ancestor of ``i`` in ``(i, T + 1]``."""
    js = np.arange(i + 1, T + 2)
    xi = js[key[i + 1:T + 2] <= i]
    if not xi.size or xi[-1] != T + 1:
        raise InconsistentNode(f"time {T + 1} is not an ancestor of {i}")
    cuts = [i] + [int(x) for x in xi]
    return [(cuts[j], cuts[j + 1] - 1) for j in range(len(cuts) - 1)]


def _child_intervals(w: Walk, S: int, T_hat: int, T: int, kind: str):
    key = w.ancestor_key
    out = [(a, b, MONO) for a, b in _past_runs(key, S, T_hat)]
    if kind == MONO and T_hat < T:
        out += [(a, b, DI) for a, b in _future_tiles(key, T_hat + 1, T)]
    elif T_hat < T:
        raise InconsistentNode("a di bubble ends at its target")
    return out


def _order_children(children):
    """Sort by decreasing boundary length, ties by earliest start."""
    return sorted(children, key=lambda c: (-c[0], c[1]))


def walk_bubble_tree(w: Walk, depth_max: int = 8, width_max: int = 64) -> BubbleTree:
    """Bubble times computed from the exploration walk of a monochromatic map."""
    _check_monochromatic_walk(w)
    N = len(w)
    nodes = {}
    stack = [((), MONO, 0, N - 1)]
    while stack:
        index, kind, S, T = stack.pop()
        sL, sR = _segment_start(w, S, T)
        ell = sL + sR + 2
        T_hat = hat_time(w, S, T) if kind == MONO else T
        node = BubbleNode(index, kind, ell, S, T_hat, T)
        nodes[index] = node
        if len(index) >= depth_max or S == T:
            continue
        kids = []
        for a, b, ck in _child_intervals(w, S, T_hat, T, kind):
            cL, cR = _segment_start(w, a, b)
            kids.append((cL + cR + 2, a, b, ck))
        for pos, (_, a, b, ck) in enumerate(_order_children(kids)[:width_max], start=1):
            ci = index + (pos,)
            node.children.append(ci)
            stack.append((ci, ck, a, b))
    return BubbleTree(nodes, w)


def bubble_times_from_walk(w: Walk, index=()) -> tuple[int, int, int]:
    """``(S, T_hat, T)`` of the bubble ``index`` computed from the walk alone."""
    index = tuple(index)
    tree = walk_bubble_tree(w, depth_max=len(index), width_max=10**9)
    return tree.node(index).times


# ---------------------------------------------------------------------------
# map side


class _GlobalMap:
    """Read-only helpers on the ambient map used while carving bubbles."""

    def __init__(self, t: Triangulation, time_of_edge: np.ndarray):
        self.t = t
        self.tm = time_of_edge
        self.in_node = np.zeros(t.n_edges, dtype=bool)
        self.on_path = np.zeros(t.n_edges, dtype=bool)
        inner = t.face_size == 3
        inner[t.outer_face] = False
        self.inner_face = inner
        # three edges of every face (rows of the outer face are unused)
        H = t.n_half_edges
        order = np.argsort(t.face_of, kind="stable")
        fe = np.full((t.face_size.shape[0], 3), -1, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(t.face_size)[:-1]])
        for k in range(3):
            sel = inner
            idx = starts[sel] + k
            fe[sel, k] = t.edge_of[order[idx]]
        self.face_edges = fe
        self.scratch = np.array(t.colors, dtype=np.int8)
        self._H = H

    def rotate_to(self, h: int) -> int:
        """First half-edge of the current node at or after ``h`` counterclockwise around its origin."""
        t, in_node = self.t, self.in_node
        g = h
        while not in_node[t.edge_of[g]]:
            g = int(t.next[g])
        return g

    def boundary_from(self, root: int, ell: int) -> np.ndarray:
        t = self.t
        out = np.empty(ell, dtype=np.int64)
        h = root
        for k in range(ell):
            out[k] = h
            h = self.rotate_to(int(t.next[t.twin[h]]))
        if h != root:
            raise InconsistentNode("bubble boundary is not a simple cycle")
        return out


def _orient_left_inside(g: _GlobalMap, edge: int, faces_in: set) -> int:
    t = g.t
    h0, h1 = (int(x) for x in t.edge_halves[edge])
    left0 = int(t.face_of[h1]) in faces_in
    left1 = int(t.face_of[h0]) in faces_in
    if left0 == left1:
        return -1
    return h0 if left0 else h1


def _carve(g: _GlobalMap, edges: np.ndarray, path_edges: np.ndarray):
    """Components of (node edges) minus (interface edges) as (edges, faces) pairs."""
    t = g.t
    g.in_node[edges] = True
    g.on_path[path_edges] = True
    halves = t.edge_halves[edges]
    fl = t.face_of[halves[:, 0]]
    fr = t.face_of[halves[:, 1]]
    cand = np.unique(np.concatenate([fl, fr]))
    cand = cand[g.inner_face[cand]]
    fe = g.face_edges[cand]
    inside = g.in_node[fe].all(axis=1)
    alive_faces = cand[inside & ~g.on_path[fe].any(axis=1)]
    loc = {int(f): i for i, f in enumerate(alive_faces)}
    rest = edges[~g.on_path[edges]]
    rl = t.face_of[t.edge_halves[rest, 0]]
    rr = t.face_of[t.edge_halves[rest, 1]]
    a = np.array([loc.get(int(x), -1) for x in rl], dtype=np.int64)
    b = np.array([loc.get(int(x), -1) for x in rr], dtype=np.int64)
    nF = alive_faces.shape[0]
    both = (a >= 0) & (b >= 0)
    if nF:
        adj = coo_matrix((np.ones(int(both.sum())), (a[both], b[both])), shape=(nF, nF))
        _, lab = connected_components(adj, directed=False)
    else:
        lab = np.zeros(0, dtype=np.int64)
    comp_of_edge = np.full(rest.shape[0], -1, dtype=np.int64)
    if nF:
        ca = np.where(a >= 0, lab[np.maximum(a, 0)], -1)
        cb = np.where(b >= 0, lab[np.maximum(b, 0)], -1)
        comp_of_edge = np.where(ca >= 0, ca, cb)
    n_lab = int(lab.max()) + 1 if nF else 0
    singles = np.nonzero(comp_of_edge < 0)[0]
    comp_of_edge[singles] = n_lab + np.arange(singles.shape[0])
    g.in_node[edges] = False
    g.on_path[path_edges] = False
    groups = []
    order = np.argsort(comp_of_edge, kind="stable")
    cuts = np.nonzero(np.diff(comp_of_edge[order]))[0] + 1
    for chunk in np.split(order, cuts):
        if not chunk.size:
            continue
        c = int(comp_of_edge[chunk[0]])
        faces = alive_faces[lab == c] if c < n_lab else np.zeros(0, dtype=np.int64)
        groups.append((rest[chunk], faces))
    return groups


def _node_interface(g: _GlobalMap, root: int, ell: int, target_pos: int, colors_of) -> Interface:
    """Interface inside the current node, with boundary colors supplied by ``colors_of``."""
    t = g.t
    b = g.boundary_from(root, ell)
    verts = t.origin[b]
    saved = g.scratch[verts].copy()
    g.scratch[verts] = colors_of(verts)
    try:
        return _interface_with_colors(_NodeView(g), root, int(b[target_pos]), g.scratch, boundary=b)
    finally:
        g.scratch[verts] = saved


class _NodeView:
    """Duck-typed view of the ambient map restricted to the current node for interface tracing."""

    def __init__(self, g: _GlobalMap):
        t = g.t
        self.next = t.next
        self.twin = t.twin
        self.origin = t.origin
        self.edge_of = t.edge_of
        self.n_edges = t.n_edges


def decompose(t: Triangulation, depth_max: int = 8, width_max: int = 64) -> BubbleTree:
    """Nested bubble tree of a map with monochromatic boundary, computed on the map."""
    if not combmap.is_monochromatic(t):
        raise NotMonochromatic("boundary is not monochromatic")
    p = combmap.identify_monochromatic_as_dichromatic(t, t.root)
    rec = space_filling_exploration(p)
    w = rec.walk
    tm = rec.time_of_edge()
    g = _GlobalMap(t, tm)
    nodes = {}
    all_edges = np.arange(t.n_edges)
    stack = [((), MONO, all_edges, t.root, t.boundary_len)]
    while stack:
        index, kind, edges, root, ell = stack.pop()
        times = tm[edges]
        S, T = int(times.min()), int(times.max())
        if T - S + 1 != edges.shape[0]:
            raise InconsistentNode(f"bubble {index} is not explored during an interval")
        bverts = None
        if edges.shape[0] == 1:
            e = int(edges[0])
            node = BubbleNode(index, kind, 2, S, S, S, e, e, True)
            nodes[index] = node
            continue
        g.in_node[edges] = True
        try:
            if kind == MONO:
                ell_R = (ell + 1) // 2 - 1

                def colors_of(verts, ell_R=ell_R):
                    c = np.full(verts.shape[0], RED, dtype=np.int8)
                    c[1:ell_R + 2] = BLUE
                    return c

                path = _node_interface(g, root, ell, ell_R + 1, colors_of)
            else:
                path = _di_interface(g, w, rec, S, T, root, ell)
            bverts = t.origin[g.boundary_from(root, ell)]
        finally:
            g.in_node[edges] = False
        target = int(path.edges[-1])
        T_hat = int(tm[target])
        induced = bool(np.all(t.colors[bverts] == t.colors[bverts[0]]))
        node = BubbleNode(index, kind, ell, S, T_hat, T, int(t.edge_of[root]), target, induced, path)
        nodes[index] = node
        if len(index) >= depth_max:
            continue
        kids = []
        for cedges, cfaces in _carve(g, edges, path.edges):
            cS = int(tm[cedges].min())
            first = int(rec.edge_order[cS])
            if cfaces.size:
                croot = _orient_left_inside(g, first, set(int(f) for f in cfaces))
                if croot < 0:
                    raise InconsistentNode("first explored edge of a bubble is not on its boundary")
                cell = 2 * cedges.shape[0] - 3 * cfaces.shape[0]
            else:
                croot = int(rec.edge_orientations[cS])
                cell = 2
            ckind = MONO if (kind == DI or cS < T_hat) else DI
            kids.append((cell, cS, cedges, croot, ckind))
        for pos, (cell, _, cedges, croot, ckind) in enumerate(_order_children(kids)[:width_max], start=1):
            ci = index + (pos,)
            node.children.append(ci)
            stack.append((ci, ckind, cedges, croot, cell))
    return BubbleTree(nodes, w, t)


def _di_interface(g: _GlobalMap, w: Walk, rec, S: int, T: int, root: int, ell: int) -> Interface:
    """Interface of a di bubble, colored as the exploration sees it when the bubble is entered.

    The coloring is transported from the map encoded by the bubble's walk
    segment through the exploration order.
    """
    t = g.t
    q = phi_inverse(component_walk(w, S, T + 1)).triangulation
    n = T - S + 1
    g_he = rec.edge_orientations[S:S + n]
    loc = np.arange(n) * 2
    vmap = {}
    for a, b in zip(t.origin[g_he], q.origin[loc]):
        vmap[int(a)] = int(b)
    for a, b in zip(t.origin[t.twin[g_he]], q.origin[q.twin[loc]]):
        vmap[int(a)] = int(b)
    qc = q.colors

    def colors_of(verts):
        return np.array([qc[vmap[int(v)]] for v in verts], dtype=np.int8)

    b = g.boundary_from(root, ell)
    bc = colors_of(t.origin[b])
    heads = np.roll(bc, -1)
    flips = np.nonzero((bc == BLUE) & (heads == RED))[0]
    if bc[0] != RED or flips.shape[0] != 1:
        raise InconsistentNode("di bubble is not dichromatic from its first explored edge")
    return _node_interface(g, root, ell, int(flips[0]), colors_of)


def child_boundary_processes(tree: BubbleTree, index) -> list[np.ndarray]:
    """Interface boundary-length processes of the children of ``index``."""
    node = tree.node(index)
    out = []
    for ci in node.children:
        child = tree.nodes[ci]
        if child.interface is not None:
            out.append(child.interface.process)
        else:
            out.append(_process_from_walk(tree.walk, child))
    return out


def _process_from_walk(w: Walk, node: BubbleNode) -> np.ndarray:
    seg = component_walk(w, node.S, node.T + 1)
    q = phi_inverse(seg).triangulation
    if node.type == DI:
        colors = q.colors
    else:
        ell = q.boundary_len
        colors = combmap.dichromatic_coloring(q, q.root, ell // 2 - 1, (ell + 1) // 2 - 1)
    b = q.boundary
    bc = colors[q.origin[b]]
    heads = colors[q.origin[q.twin[b]]]
    k = int(np.nonzero((bc == BLUE) & (heads == RED))[0][0])
    return _interface_with_colors(q, q.root, int(b[k]), colors).process
