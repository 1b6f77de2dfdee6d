"""Half-edge representation of rooted loopless triangulations with simple boundary.

Conventions
-----------
Every half-edge ``h`` has a ``twin`` (the opposite half-edge), a ``next``
half-edge (the next one counterclockwise around the common origin vertex) and
an ``origin`` vertex.  The face permutation is ``phi(h) = next[twin[h]]``; the
orbit of ``h`` under ``phi`` is the face lying to the right of ``h``.

The root half-edge lies on the root (outer) face, so the boundary is traced
counterclockwise by iterating ``phi`` from the root.  All left/right notions
elsewhere in the package are relative to this orientation.  The triangle
incident to the root is the face of ``twin[root]`` and its apex is the head of
``next[root]``.

Colors are ``RED = 0`` and ``BLUE = 1``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._kernels import bfs_csr, orbits
from .errors import (
    Disconnected,
    InvalidInput,
    NonInvolutionTwin,
    NonSimpleBoundary,
    NonTriangularInnerFace,
    NotBoundaryEdge,
    NotMonochromatic,
    SelfLoop,
)

RED = 0
BLUE = 1


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class Triangulation:
    """Immutable rooted triangulation with simple boundary and a vertex coloring.

    Instances are produced by :func:`build`, which validates every structural
    invariant.  ``provenance`` optionally maps each half-edge to the id of the
    half-edge it came from in a larger map.
    """

    __slots__ = (
        "twin", "next", "origin", "root", "colors", "provenance",
        "face_of", "face_size", "outer_face", "boundary", "n_vertices",
        "n_edges", "edge_of", "edge_halves", "_phi",
    )

    def __init__(self, twin, next_, origin, root, colors, provenance=None, *, _checked=None):
        self.twin = _frozen(twin, np.int64)
        self.next = _frozen(next_, np.int64)
        self.origin = _frozen(origin, np.int64)
        self.root = int(root)
        self.colors = _frozen(colors, np.int8)
        self.provenance = None if provenance is None else _frozen(provenance, np.int64)
        face_of, face_size, boundary = _checked
        self.face_of = _frozen(face_of, np.int64)
        self.face_size = _frozen(face_size, np.int64)
        self.outer_face = int(face_of[self.root])
        self.boundary = _frozen(boundary, np.int64)
        self.n_vertices = int(self.colors.shape[0])
        H = self.twin.shape[0]
        self.n_edges = H // 2
        lower = np.minimum(np.arange(H), self.twin)
        uniq = np.unique(lower)
        edge_of = np.searchsorted(uniq, lower)
        self.edge_of = _frozen(edge_of, np.int64)
        halves = np.stack([uniq, self.twin[uniq]], axis=1)
        self.edge_halves = _frozen(halves, np.int64)
        self._phi = None

    # basic navigation -------------------------------------------------
    @property
    def n_half_edges(self) -> int:
        return int(self.twin.shape[0])

    @property
    def boundary_len(self) -> int:
        return int(self.boundary.shape[0])

    @property
    def n_inner(self) -> int:
        """Number of inner vertices."""
        return self.n_vertices - self.boundary_len

    @property
    def n_inner_faces(self) -> int:
        return int(self.face_size.shape[0]) - 1

    @property
    def phi(self) -> np.ndarray:
        if self._phi is None:
            p = self.next[self.twin]
            p.setflags(write=False)
            self._phi = p
        return self._phi

    def head(self, h: int) -> int:
        return int(self.origin[self.twin[h]])

    def tail(self, h: int) -> int:
        return int(self.origin[h])

    def is_degenerate(self) -> bool:
        return self.n_edges == 1

    def is_boundary_half_edge(self, h: int) -> bool:
        """True when ``h`` is a counterclockwise-oriented boundary half-edge."""
        return int(self.face_of[h]) == self.outer_face

    def boundary_vertices(self) -> np.ndarray:
        return self.origin[self.boundary]

    def with_root(self, root: int) -> "Triangulation":
        return Triangulation(self.twin, self.next, self.origin, root, self.colors, self.provenance,
                             _checked=(self.face_of, self.face_size, self.boundary_from(root)))

    def with_colors(self, colors) -> "Triangulation":
        colors = np.asarray(colors)
        if colors.shape != (self.n_vertices,) or not np.isin(colors, (RED, BLUE)).all():
            raise InvalidInput("colors must hold one entry in {0, 1} per vertex")
        return Triangulation(self.twin, self.next, self.origin, self.root, colors, self.provenance,
                             _checked=(self.face_of, self.face_size, self.boundary))

    def boundary_from(self, h: int) -> np.ndarray:
        return _orbit_from(self.phi, int(h), int(self.face_size[self.face_of[h]]))

    def vertex_degrees(self) -> np.ndarray:
        return np.bincount(self.origin, minlength=self.n_vertices)

    def adjacency_csr(self):
        """Return ``(indptr, indices)`` of the vertex adjacency (with multiplicity)."""
        order = np.argsort(self.origin, kind="stable")
        heads = self.origin[self.twin][order]
        counts = np.bincount(self.origin, minlength=self.n_vertices)
        indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, heads.astype(np.int64)

    def inner_faces(self) -> list[list[int]]:
        """Half-edge orbits of all triangles (faces other than the root face)."""
        seen = np.zeros(self.n_half_edges, dtype=bool)
        faces = []
        phi = self.phi
        for h in range(self.n_half_edges):
            if seen[h] or self.face_of[h] == self.outer_face:
                continue
            orbit = [h]
            seen[h] = True
            g = int(phi[h])
            while g != h:
                orbit.append(g)
                seen[g] = True
                g = int(phi[g])
            faces.append(orbit)
        return faces

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "half_edges": [
                {"twin": int(t), "next": int(n), "origin": int(o)}
                for t, n, o in zip(self.twin, self.next, self.origin)
            ],
            "root": self.root,
            "colors": [int(c) for c in self.colors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triangulation):
            return NotImplemented
        return (
            self.root == other.root
            and np.array_equal(self.twin, other.twin)
            and np.array_equal(self.next, other.next)
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.colors, other.colors)
        )

    def __hash__(self):
        return hash((self.root, self.twin.tobytes(), self.next.tobytes(), self.colors.tobytes()))

    def __repr__(self) -> str:
        return (f"Triangulation(edges={self.n_edges}, vertices={self.n_vertices}, "
                f"boundary_len={self.boundary_len}, inner={self.n_inner})")


def _orbit_from(perm, h, length):
    out = np.empty(length, dtype=np.int64)
    g = h
    for k in range(length):
        out[k] = g
        g = perm[g]
    return out


def _face_orbits(twin, next_):
    face_of, sizes, k = orbits(next_[twin])
    if k < 0:
        raise InvalidInput("face permutation is not well defined")
    return face_of, sizes


def build(twin, next_, origin, root, colors, provenance=None) -> Triangulation:
    """Validate half-edge arrays and return a :class:`Triangulation`.

    Raises the specific :mod:`triperc.errors` subclass describing the first
    violated invariant.
    """
    twin = np.asarray(twin, dtype=np.int64)
    next_ = np.asarray(next_, dtype=np.int64)
    origin = np.asarray(origin, dtype=np.int64)
    colors = np.asarray(colors, dtype=np.int64)
    H = twin.shape[0]
    if twin.ndim != 1 or next_.shape != (H,) or origin.shape != (H,):
        raise InvalidInput("twin, next and origin must be 1-d arrays of equal length")
    if H == 0 or H % 2:
        raise InvalidInput("the number of half-edges must be positive and even")
    if twin.min() < 0 or twin.max() >= H or next_.min() < 0 or next_.max() >= H:
        raise InvalidInput("half-edge references out of range")
    idx = np.arange(H)
    if np.any(twin == idx) or np.any(twin[twin] != idx):
        raise NonInvolutionTwin("twin must be a fixed-point-free involution")
    if np.unique(next_).shape[0] != H:
        raise InvalidInput("next must be a permutation")
    if np.any(origin[next_] != origin):
        raise InvalidInput("next must rotate around a single origin vertex")
    if origin.min() < 0:
        raise InvalidInput("negative vertex id")
    V = int(origin.max()) + 1
    # each vertex label must correspond to exactly one next-orbit
    _, _, n_orbits = orbits(next_)
    if n_orbits != V or np.unique(origin).shape[0] != V:
        raise InvalidInput("vertex ids must be dense and match the rotation orbits")
    if np.any(origin[twin] == origin):
        raise SelfLoop("an edge joins a vertex to itself")
    if not 0 <= int(root) < H:
        raise InvalidInput("root half-edge out of range")
    if colors.shape != (V,) or not np.isin(colors, (RED, BLUE)).all():
        raise InvalidInput("colors must hold one entry in {0, 1} per vertex")
    # connectivity over vertices
    order = np.argsort(origin, kind="stable")
    indptr = np.zeros(V + 1, dtype=np.int64)
    np.cumsum(np.bincount(origin, minlength=V), out=indptr[1:])
    if np.any(bfs_csr(indptr, origin[twin][order], 0) < 0):
        raise Disconnected("the underlying graph is not connected")
    face_of, face_size = _face_orbits(twin, next_)
    outer = int(face_of[root])
    ell = int(face_size[outer])
    if ell < 2:
        raise NonTriangularInnerFace("root face must have degree at least 2")
    inner = np.delete(face_size, outer)
    if np.any(inner != 3):
        raise NonTriangularInnerFace("every face other than the root face must be a triangle")
    boundary = _orbit_from(next_[twin], int(root), ell)
    bverts = origin[boundary]
    if np.unique(bverts).shape[0] != ell:
        raise NonSimpleBoundary("the root face boundary visits a vertex twice")
    E = H // 2
    F = face_size.shape[0]
    if V - E + F != 2:
        raise InvalidInput(f"Euler relation fails: V-E+F = {V - E + F}")
    return Triangulation(twin, next_, origin, root, colors, provenance,
                         _checked=(face_of, face_size, boundary))


def from_dict(d: dict) -> Triangulation:
    try:
        hes = d["half_edges"]
        twin = [int(h["twin"]) for h in hes]
        nxt = [int(h["next"]) for h in hes]
        org = [int(h["origin"]) for h in hes]
        return build(twin, nxt, org, int(d["root"]), [int(c) for c in d["colors"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed map document: {exc}") from exc


def from_json(text: str) -> Triangulation:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc
    return from_dict(d)


def degenerate() -> Triangulation:
    """The single-edge map: red tail, blue head, rooted red to blue."""
    return build([1, 0], [0, 1], [0, 1], 0, [RED, BLUE])


def from_simple_faces(inner_faces, outer_face, colors, root=None) -> Triangulation:
    """Build a map without multiple edges from vertex cycles.

    ``inner_faces`` are triangles listed counterclockwise in the plane;
    ``outer_face`` is the boundary cycle listed counterclockwise (interior on
    the left).  ``root`` is a directed boundary pair ``(u, v)`` that must be a
    consecutive pair of ``outer_face``; it defaults to the first pair.
    """
    succ = {}
    for tri in inner_faces:
        a, b, c = tri
        # the face lies to the right of a->c->b->a
        for u, v, w in ((a, c, b), (c, b, a), (b, a, c)):
            succ[(u, v)] = (v, w)
    k = len(outer_face)
    for i in range(k):
        u, v, w = outer_face[i], outer_face[(i + 1) % k], outer_face[(i + 2) % k]
        if (u, v) in succ:
            raise InvalidInput(f"directed edge {(u, v)} used twice")
        succ[(u, v)] = (v, w)
    keys = sorted(succ)
    ids = {p: i for i, p in enumerate(keys)}
    H = len(keys)
    twin = np.empty(H, dtype=np.int64)
    phi = np.empty(H, dtype=np.int64)
    origin = np.empty(H, dtype=np.int64)
    for (u, v), i in ids.items():
        if (v, u) not in ids:
            raise InvalidInput(f"edge {(u, v)} lacks its reverse")
        twin[i] = ids[(v, u)]
        phi[i] = ids[succ[(u, v)]]
        origin[i] = u
    # phi = next o twin, hence next = phi o twin
    nxt = phi[twin]
    if root is None:
        root = (outer_face[0], outer_face[1])
    return build(twin, nxt, origin, ids[tuple(root)], colors)


# ---------------------------------------------------------------------------
# boundary utilities


def boundary_walk(t: Triangulation) -> list[int]:
    """Boundary half-edges in counterclockwise order, starting at the root."""
    return [int(h) for h in t.boundary]


def _as_boundary_half_edge(t: Triangulation, h: int) -> int:
    if not 0 <= h < t.n_half_edges:
        raise NotBoundaryEdge(f"half-edge {h} does not exist")
    if t.is_boundary_half_edge(h):
        return int(h)
    raise NotBoundaryEdge(f"half-edge {h} is not a counterclockwise boundary half-edge")


def reroot(t: Triangulation, new_root: int) -> Triangulation:
    """Same map and colors, rooted at another boundary half-edge."""
    return t.with_root(_as_boundary_half_edge(t, int(new_root)))


def bfs_distances(t: Triangulation, source: int) -> np.ndarray:
    """Exact graph distances from ``source`` to every vertex."""
    indptr, indices = t.adjacency_csr()
    return bfs_csr(indptr, indices, int(source))


# ---------------------------------------------------------------------------
# dichromatic boundary conditions


@dataclass(frozen=True)
class DichromaticBoundaryMap:
    """A triangulation whose boundary reads red, blue, ..., blue, red, ..., red.

    The root runs red to blue; ``target`` is the unique counterclockwise
    boundary half-edge running blue to red.
    """

    triangulation: Triangulation
    target: int
    ell_L: int = field(default=0)
    ell_R: int = field(default=0)

    @property
    def n_inner(self) -> int:
        return self.triangulation.n_inner

    @property
    def n_edges(self) -> int:
        return self.triangulation.n_edges

    @property
    def root(self) -> int:
        return self.triangulation.root

    def is_degenerate(self) -> bool:
        return self.triangulation.is_degenerate()


def boundary_condition(t: Triangulation):
    """Return ``(target, ell_L, ell_R)`` if ``t`` has dichromatic boundary, else ``None``."""
    b = t.boundary
    cols = t.colors[t.origin[b]]
    heads = t.colors[t.origin[t.twin[b]]]
    if cols[0] != RED or heads[0] != BLUE:
        return None
    flips = np.nonzero((cols == BLUE) & (heads == RED))[0]
    if flips.shape[0] != 1:
        return None
    # counterclockwise: root, blue run, target, red run
    k = int(flips[0])
    if np.any(cols[1:k + 1] != BLUE) or np.any(cols[k + 1:] != RED):
        return None
    ell_R = k - 1
    ell_L = len(b) - k - 1
    if t.is_degenerate():
        ell_L = ell_R = 0
    return int(b[k]), ell_L, ell_R


def as_dichromatic(t: Triangulation) -> DichromaticBoundaryMap:
    bc = boundary_condition(t)
    if bc is None:
        raise InvalidInput("boundary coloring is not dichromatic with respect to the root")
    target, ell_L, ell_R = bc
    return DichromaticBoundaryMap(t, target, ell_L, ell_R)


def dichromatic_coloring(t: Triangulation, root: int, ell_L: int, ell_R: int) -> np.ndarray:
    """Colors agreeing with ``t`` on inner vertices and giving an ``(ell_L, ell_R)`` boundary."""
    from .errors import BadBoundarySplit

    root = _as_boundary_half_edge(t, root)
    b = t.boundary_from(root)
    if t.is_degenerate():
        if ell_L or ell_R:
            raise BadBoundarySplit("the single-edge map only admits the (0, 0) split")
    elif ell_L < 0 or ell_R < 0 or ell_L + ell_R + 2 != len(b):
        raise BadBoundarySplit(f"ell_L + ell_R + 2 must equal the boundary length {len(b)}")
    colors = np.array(t.colors, dtype=np.int8)
    verts = t.origin[b]
    colors[verts[0]] = RED
    colors[verts[1:ell_R + 2]] = BLUE
    colors[verts[ell_R + 2:]] = RED
    return colors


def is_monochromatic(t: Triangulation) -> bool:
    cols = t.colors[t.boundary_vertices()]
    return bool(np.all(cols == cols[0]))


def identify_monochromatic_as_dichromatic(t: Triangulation, e: int) -> DichromaticBoundaryMap:
    """Root at boundary half-edge ``e`` and recolor one endpoint.

    Red boundary: the head of ``e`` becomes blue, giving an ``(ell-2, 0)``
    boundary.  Blue boundary: the tail of ``e`` becomes red, giving
    ``(0, ell-2)``.
    """
    e = _as_boundary_half_edge(t, int(e))
    if not is_monochromatic(t):
        raise NotMonochromatic("boundary is not monochromatic")
    colors = np.array(t.colors, dtype=np.int8)
    boundary_color = int(colors[t.origin[e]])
    if boundary_color == RED:
        colors[t.head(e)] = BLUE
    else:
        colors[t.origin[e]] = RED
    return as_dichromatic(t.with_root(e).with_colors(colors))


def restore_monochromatic(p: DichromaticBoundaryMap, color: int | None = None) -> Triangulation:
    """Inverse of :func:`identify_monochromatic_as_dichromatic`.

    ``color`` selects the boundary color when the boundary split is ``(0, 0)``
    and is ignored otherwise.
    """
    t = p.triangulation
    if p.ell_L > 0 and p.ell_R > 0:
        raise NotMonochromatic("both boundary arcs are nonempty")
    if p.ell_L > 0:
        color = RED
    elif p.ell_R > 0:
        color = BLUE
    elif color is None:
        color = RED
    colors = np.array(t.colors, dtype=np.int8)
    if color == RED:
        colors[t.head(t.root)] = RED
    else:
        colors[t.origin[t.root]] = BLUE
    return t.with_colors(colors)


# ---------------------------------------------------------------------------
# sub-maps and 2-connected components


def extract_submap(t: Triangulation, edge_ids, root: int | None = None, colors=None) -> Triangulation:
    """Induced sub-map on a set of edges that forms a triangulation with simple boundary.

    ``root`` is a half-edge id of ``t``; it defaults to the lowest-id half-edge
    on the boundary of the sub-map.  The result records ``provenance``.
    """
    edge_ids = np.unique(np.asarray(list(edge_ids), dtype=np.int64))
    halves = t.edge_halves[edge_ids].ravel()
    halves.sort()
    keep = np.zeros(t.n_half_edges, dtype=bool)
    keep[halves] = True
    new_id = np.full(t.n_half_edges, -1, dtype=np.int64)
    new_id[halves] = np.arange(halves.shape[0])
    twin = new_id[t.twin[halves]]
    nxt = np.empty(halves.shape[0], dtype=np.int64)
    for i, h in enumerate(halves):
        g = int(t.next[h])
        while not keep[g]:
            g = int(t.next[g])
        nxt[i] = new_id[g]
    verts = np.unique(t.origin[halves])
    vmap = np.full(t.n_vertices, -1, dtype=np.int64)
    vmap[verts] = np.arange(verts.shape[0])
    origin = vmap[t.origin[halves]]
    base_colors = t.colors if colors is None else np.asarray(colors)
    sub_colors = base_colors[verts]
    face_of, face_size = _face_orbits(twin, nxt)
    # faces that are triangles of t are inner; the remaining face is the root face
    phi_t = t.phi
    inner_faces = set()
    for f in range(face_size.shape[0]):
        members = np.nonzero(face_of == f)[0]
        if members.shape[0] != 3:
            continue
        h0 = halves[members[0]]
        orbit = {int(h0), int(phi_t[h0]), int(phi_t[phi_t[h0]])}
        if int(t.face_of[h0]) != t.outer_face and orbit == set(int(x) for x in halves[members]):
            inner_faces.add(f)
    outer = [f for f in range(face_size.shape[0]) if f not in inner_faces]
    if len(outer) != 1:
        raise NonTriangularInnerFace("edge set does not induce a triangulation with one root face")
    if root is None:
        cand = np.nonzero(face_of == outer[0])[0]
        new_root = int(cand.min())
    else:
        new_root = int(new_id[root])
        if new_root < 0 or face_of[new_root] != outer[0]:
            raise NotBoundaryEdge("requested root is not a boundary half-edge of the sub-map")
    prov = halves if t.provenance is None else t.provenance[halves]
    return build(twin, nxt, origin, new_root, sub_colors, provenance=prov)


def _blocks(n_vertices, ends, alive):
    """Edge partition into biconnected blocks (iterative Tarjan on edge ids)."""
    E = ends.shape[0]
    adj = [[] for _ in range(n_vertices)]
    for e in range(E):
        if alive[e]:
            u, v = int(ends[e, 0]), int(ends[e, 1])
            adj[u].append((v, e))
            adj[v].append((u, e))
    disc = [-1] * n_vertices
    low = [0] * n_vertices
    timer = 0
    blocks = []
    for s in range(n_vertices):
        if disc[s] >= 0 or not adj[s]:
            continue
        disc[s] = low[s] = timer
        timer += 1
        edge_stack = []
        stack = [(s, -1, 0)]
        while stack:
            u, pe, i = stack[-1]
            if i < len(adj[u]):
                stack[-1] = (u, pe, i + 1)
                w, e = adj[u][i]
                if e == pe:
                    continue
                if disc[w] < 0:
                    edge_stack.append(e)
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, e, 0))
                elif disc[w] < disc[u]:
                    edge_stack.append(e)
                    low[u] = min(low[u], disc[w])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] >= disc[p]:
                        blk = []
                        while True:
                            e = edge_stack.pop()
                            blk.append(e)
                            if e == pe:
                                break
                        blocks.append(sorted(blk))
    return blocks


def two_connected_components(t: Triangulation, removed=(), roots=None) -> list[Triangulation]:
    """2-connected components of ``t`` minus the edges ``removed``.

    Each component is returned as a standalone :class:`Triangulation` whose
    ``provenance`` maps back to half-edges of ``t``.  A bridge counts as a
    single-edge component.  ``roots`` may supply, per component, a half-edge
    id of ``t`` to use as root; otherwise the lowest-id boundary half-edge is
    used.  Components are ordered by their smallest edge id.
    """
    alive = np.ones(t.n_edges, dtype=bool)
    removed = list(removed)
    if removed:
        alive[np.asarray(removed, dtype=np.int64)] = False
    if not removed:
        return [t]
    ends = t.origin[t.edge_halves]
    blocks = _blocks(t.n_vertices, ends, alive)
    blocks.sort(key=lambda b: b[0])
    out = []
    for blk in blocks:
        r = None
        if roots is not None:
            hs = set(int(x) for x in t.edge_halves[blk].ravel())
            for cand in roots:
                if int(cand) in hs:
                    r = int(cand)
                    break
        if len(blk) == 1 and r is None:
            h0 = int(t.edge_halves[blk[0], 0])
            c = t.colors
            r = h0 if not (c[t.origin[h0]] == BLUE and c[t.head(h0)] == RED) else int(t.twin[h0])
        out.append(extract_submap(t, blk, root=r))
    return out


# ---------------------------------------------------------------------------
# canonical form


def canonical_form(t: Triangulation) -> tuple:
    """Isomorphism invariant of the rooted colored map (relabeling from the root)."""
    H = t.n_half_edges
    label = np.full(H, -1, dtype=np.int64)
    order = []
    q = deque([t.root])
    label[t.root] = 0
    order.append(t.root)
    while q:
        h = q.popleft()
        for g in (int(t.next[h]), int(t.twin[h])):
            if label[g] < 0:
                label[g] = len(order)
                order.append(g)
                q.append(g)
    order = np.array(order)
    vlabel = {}
    for h in order:
        o = int(t.origin[h])
        if o not in vlabel:
            vlabel[o] = len(vlabel)
    twin = tuple(int(x) for x in label[t.twin[order]])
    nxt = tuple(int(x) for x in label[t.next[order]])
    org = tuple(vlabel[int(t.origin[h])] for h in order)
    inv = sorted(vlabel, key=vlabel.get)
    cols = tuple(int(t.colors[v]) for v in inv)
    return twin, nxt, org, cols
