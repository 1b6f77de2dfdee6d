"""The bijection between dichromatic-boundary percolated triangulations and walks.

Map side conventions follow :mod:`triperc.combmap`: the root half-edge runs
from a red to a blue vertex with the unexplored region on its left, so the
triangle peeled from root ``r`` is the face of ``twin[r]`` and its apex is the
head of ``next[r]``.  After peeling, the edge ``x -> v`` is ``next[r]`` and
``v -> y`` is ``next[twin[next[r]]]``.

Step letters produced by a peel:

* apex not on the boundary: ``a`` if it is red (new root ``v -> y``), ``b``
  if it is blue (new root ``x -> v``);
* apex on the boundary: the map splits.  A red apex gives ``b`` and a blue
  apex gives ``a``; the piece cut off is explored first with the apex color
  flipped, then the piece holding the target;
* single-edge map: ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import combmap
from ._kernels import phi_inverse_kernel, phi_kernel
from .combmap import RED, DichromaticBoundaryMap, Triangulation
from .errors import BadBoundarySplit, IndexOutOfRange, InvalidInput, NotAMember
from .walkcore import C_STEP, Walk, ancestor_free_times, cone_points, first_ancestor, is_member



# ---------------------------------------------------------------------------
# single peeling step on the map


@dataclass(frozen=True)
class PeelResult:
    primary: DichromaticBoundaryMap
    split_off: DichromaticBoundaryMap | None
    peeled_vertex_color: int | None
    step: str


def _check_dichromatic(p: DichromaticBoundaryMap) -> None:
    bc = combmap.boundary_condition(p.triangulation)
    if bc is None or bc[0] != p.target or bc[1:] != (p.ell_L, p.ell_R):
        raise InvalidInput("map does not carry the stated dichromatic boundary condition")


def peel(p: DichromaticBoundaryMap) -> PeelResult:
    """Remove the root edge and re-root the remaining piece(s)."""
    _check_dichromatic(p)
    t = p.triangulation
    if t.is_degenerate():
        return PeelResult(p, None, None, "c")
    r = t.root
    h2 = int(t.next[r])
    h3 = int(t.next[t.twin[h2]])
    v = int(t.origin[h3])
    color = int(t.colors[v])
    root_edge = int(t.edge_of[r])
    if v not in set(int(x) for x in t.boundary_vertices()):
        new_root = h3 if color == RED else h2
        keep = [e for e in range(t.n_edges) if e != root_edge]
        sub = combmap.extract_submap(t, keep, root=new_root)
        return PeelResult(combmap.as_dichromatic(sub), None, color, "a" if color == RED else "b")
    inner_root, outer_root = (h2, h3) if color == RED else (h3, h2)
    comps = combmap.two_connected_components(t, removed=[root_edge], roots=[h2, h3])
    if len(comps) != 2:
        raise InvalidInput("peeling a boundary apex must split the map in two")
    prov = np.arange(t.n_half_edges) if t.provenance is None else t.provenance
    primary = split = None
    for c in comps:
        if np.isin(prov[p.target], c.provenance):
            primary = c
        else:
            split = c
    if primary is None or split is None:
        raise InvalidInput("target edge not found in exactly one component")
    if (int(primary.provenance[primary.root]) != prov[outer_root]
            or int(split.provenance[split.root]) != prov[inner_root]):
        raise InvalidInput("re-rooting rule violated while peeling")
    colors = np.array(split.colors, dtype=np.int8)
    v_local = split.head(split.root) if color == RED else split.tail(split.root)
    colors[v_local] = 1 - colors[v_local]
    split = split.with_colors(colors)
    return PeelResult(combmap.as_dichromatic(primary), combmap.as_dichromatic(split), color,
                      "b" if color == RED else "a")


# ---------------------------------------------------------------------------
# single peeling step on the walk


def upsilon(w: Walk) -> int:
    """First ancestor of time 1 in ``[2, N]`` (``N`` itself for a one-step walk)."""
    N = len(w)
    if N == 1:
        return 1
    j = first_ancestor(w, 1, lo=2, hi=N)
    if j is None:
        raise NotAMember("time 1 has no ancestor")
    return j


def _sub_walk(w: Walk, first_pos: int, last_pos: int, shift) -> Walk:
    """Positions ``first_pos..last_pos`` of ``w`` translated by ``-shift``."""
    start = (int(w.L[first_pos] - shift[0]), int(w.R[first_pos] - shift[1]))
    return Walk(start, w.codes[first_pos:last_pos])


def component_walk(w: Walk, j: int, k: int) -> Walk:
    """The segment on positions ``[j, k]`` translated so that it ends at ``(-1, -1)``."""
    return _sub_walk(w, j, k, (w.L[k - 1], w.R[k - 1]))


def peel_z(w: Walk):
    """Walk counterpart of the peeling step: ``(primary, split_off or None)``."""
    if not is_member(w):
        raise NotAMember(f"{w!r} is not a member walk")
    N = len(w)
    if N == 1:
        return w, None
    ups = upsilon(w)
    if ups == N:
        return _sub_walk(w, 1, N, (0, 0)), None
    split = component_walk(w, 1, ups)
    primary = _sub_walk(w, ups, N, (0, 0))
    return primary, split


# ---------------------------------------------------------------------------
# the bijection


@dataclass(frozen=True)
class ExplorationRecord:
    """Space-filling exploration of a map.

    ``edge_order[i]`` is the edge explored at time ``i`` and
    ``edge_orientations[i]`` the half-edge it is explored along.
    """

    edge_order: np.ndarray
    edge_orientations: np.ndarray
    walk: Walk
    interface_times: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return self.walk.positions()

    @property
    def interface_process(self) -> np.ndarray:
        return self.positions[self.interface_times]

    def time_of_edge(self) -> np.ndarray:
        inv = np.empty_like(self.edge_order)
        inv[self.edge_order] = np.arange(self.edge_order.shape[0])
        return inv

    def to_dict(self) -> dict:
        return {
            "start": list(self.walk.start),
            "word": self.walk.word,
            "edge_order": [int(e) for e in self.edge_order],
            "edge_orientations": [int(h) for h in self.edge_orientations],
        }


def _explore(p: DichromaticBoundaryMap):
    _check_dichromatic(p)
    t = p.triangulation
    on_boundary = np.zeros(t.n_vertices, dtype=np.bool_)
    on_boundary[t.boundary_vertices()] = True
    codes, order, status = phi_kernel(
        t.twin, t.next, t.origin, t.face_of, t.outer_face, on_boundary,
        t.colors.astype(np.int8), t.root, int(t.face_size.shape[0]),
    )
    if status != 0:
        raise InvalidInput(f"exploration did not cover the map (status {status})")
    return Walk((p.ell_L, p.ell_R), codes), order


def phi(p: DichromaticBoundaryMap) -> Walk:
    """Boundary length process of the space-filling exploration."""
    return _explore(p)[0]


def space_filling_exploration(p: DichromaticBoundaryMap) -> ExplorationRecord:
    w, order = _explore(p)
    t = p.triangulation
    return ExplorationRecord(
        edge_order=t.edge_of[order].astype(np.int64),
        edge_orientations=order.astype(np.int64),
        walk=w,
        interface_times=ancestor_free_times(w, len(w) - 1),
    )


def phi_inverse(w: Walk) -> DichromaticBoundaryMap:
    """Rebuild the map of a member walk.

    Edge ``i`` of the result (half-edges ``2i`` and ``2i+1``) is the edge
    explored at time ``i``; half-edge ``2i`` is its exploration orientation.
    """
    if not is_member(w):
        raise NotAMember(f"{w!r} is not a member walk")
    twin, nxt, org, colors, status = phi_inverse_kernel(w.codes, w.match_of, w.ancestor_key)
    if status != 0:
        raise NotAMember(f"walk could not be glued (status {status})")
    t = combmap.build(twin, nxt, org, 0, colors)
    p = combmap.as_dichromatic(t)
    if (p.ell_L, p.ell_R) != w.start:
        raise InvalidInput("glued map has the wrong boundary split")
    return p


# ---------------------------------------------------------------------------
# percolation interface


@dataclass(frozen=True)
class Interface:
    """Percolation interface of a dichromatic map.

    ``half_edges[i]`` is the interface edge at step ``i`` oriented red to
    blue; ``process[i]`` the left and right boundary lengths of the piece
    still holding the target; ``split_lengths[i]`` the boundary length of
    the piece cut off when stepping from ``i`` to ``i+1`` (0 if none) and
    ``split_sides[i]`` is ``'L'``, ``'R'`` or ``''``.
    """

    half_edges: np.ndarray
    edges: np.ndarray
    process: np.ndarray
    split_lengths: np.ndarray
    split_sides: tuple

    @property
    def m(self) -> int:
        return int(self.edges.shape[0]) - 1


def _interface_with_colors(t, root: int, target: int, colors, boundary=None) -> Interface:
    colors = np.asarray(colors)
    b = t.boundary_from(root) if boundary is None else boundary
    verts = t.origin[b]
    k = int(np.nonzero(b == target)[0][0])
    # left stack: head of the target at the bottom, root tail on top
    L = [int(x) for x in verts[k + 1:]] + [int(verts[0])]
    # right stack: tail of the target at the bottom, root head on top
    R = [int(x) for x in verts[1:k + 1][::-1]]
    posL = {v: i for i, v in enumerate(L)}
    posR = {v: i for i, v in enumerate(R)}
    target_edge = int(t.edge_of[target])
    r = int(root)
    hes = [r]
    proc = [(len(L) - 1, len(R) - 1)]
    split_len = []
    sides = []
    nxt, twin, origin = t.next, t.twin, t.origin
    while int(t.edge_of[r]) != target_edge:
        h2 = int(nxt[r])
        h3 = int(nxt[twin[h2]])
        v = int(origin[h3])
        if colors[v] == RED:
            if v in posL:
                kv = posL[v]
                split_len.append(len(L) - kv)
                sides.append("L")
                for x in L[kv + 1:]:
                    del posL[x]
                del L[kv + 1:]
            else:
                posL[v] = len(L)
                L.append(v)
                split_len.append(0)
                sides.append("")
            r = h3
        else:
            if v in posR:
                kv = posR[v]
                split_len.append(len(R) - kv)
                sides.append("R")
                for x in R[kv + 1:]:
                    del posR[x]
                del R[kv + 1:]
            else:
                posR[v] = len(R)
                R.append(v)
                split_len.append(0)
                sides.append("")
            r = h2
        hes.append(r)
        proc.append((len(L) - 1, len(R) - 1))
        if len(hes) > t.n_edges:
            raise InvalidInput("interface does not reach the target")
    split_len.append(0)
    sides.append("")
    hes = np.array(hes, dtype=np.int64)
    return Interface(hes, t.edge_of[hes].astype(np.int64), np.array(proc, dtype=np.int64),
                     np.array(split_len, dtype=np.int64), tuple(sides))


def interface(p: DichromaticBoundaryMap) -> Interface:
    """Red-left, blue-right interface from the root to the target, traced on the map."""
    _check_dichromatic(p)
    t = p.triangulation
    return _interface_with_colors(t, t.root, p.target, t.colors)


def walk_interface(w: Walk):
    """Interface times and interface boundary-length process read off the walk."""
    T = ancestor_free_times(w, len(w) - 1)
    return T, w.positions()[T]


@dataclass(frozen=True)
class TargetedInterface:
    path: Interface
    tau: np.ndarray
    target_time: int
    exploration: ExplorationRecord
    split_walks: dict


def interface_with_target(t: Triangulation, e: int, ell_L: int, ell_R: int) -> TargetedInterface:
    """Interface of a monochromatic map rooted at ``e`` after imposing an ``(ell_L, ell_R)`` split.

    ``tau[i]`` is the exploration time of the ``i``-th interface edge, where the
    exploration is that of the map identified as dichromatic at ``e``.
    ``split_walks[i]`` is the walk segment on ``[tau[i]+1, tau[i+1]]`` whenever
    the two times are not consecutive.
    """
    if t.is_degenerate():
        if ell_L or ell_R:
            raise BadBoundarySplit("the single-edge map only admits the (0, 0) split")
    elif ell_L < 0 or ell_R < 0 or ell_L + ell_R + 2 != t.boundary_len:
        raise BadBoundarySplit(f"ell_L + ell_R + 2 must equal {t.boundary_len}")
    p = combmap.identify_monochromatic_as_dichromatic(t, e)
    rec = space_filling_exploration(p)
    tt = p.triangulation
    colors = combmap.dichromatic_coloring(tt, tt.root, ell_L, ell_R)
    b = tt.boundary
    tgt = int(b[ell_R + 1])
    path = _interface_with_colors(tt, tt.root, tgt, colors)
    inv = rec.time_of_edge()
    tau = inv[path.edges]
    w = rec.walk
    splits = {}
    for i in range(len(tau) - 1):
        if tau[i + 1] > tau[i] + 1:
            splits[i] = component_walk(w, int(tau[i]) + 1, int(tau[i + 1]))
    return TargetedInterface(path, tau.astype(np.int64), int(inv[tt.edge_of[tgt]]), rec, splits)


# ---------------------------------------------------------------------------
# unexplored components


@dataclass(frozen=True)
class UnexploredComponent:
    first: int
    last: int
    walk: Walk
    sigma: int | None


def unexplored_components_at(rec: ExplorationRecord, i: int) -> list[UnexploredComponent]:
    """2-connected components of the map minus the edges explored before time ``i``.

    Component ``j`` occupies exploration times ``[xi_{j-1}, xi_j - 1]`` where
    ``xi_0 = i`` and ``xi_1 < ... < xi_k`` are the ancestors of ``i``.
    ``sigma`` is the step matching the c-step ``xi_{j-1}`` (``None`` when that
    step is not a c-step or has no partner; the later partner when it has two).
    """
    w = rec.walk
    N = len(w)
    if not 0 <= i <= N - 1:
        raise IndexOutOfRange(f"time {i} outside [0, {N - 1}]")
    xs = [i] + [int(x) for x in cone_points(w, i)]
    out = []
    for j in range(1, len(xs)):
        a, b = xs[j - 1], xs[j]
        sigma = None
        if a >= 1 and w.codes[a - 1] == C_STEP:
            ma, mb = int(w.match_a[a]), int(w.match_b[a])
            sigma = max(ma, mb) or None
        out.append(UnexploredComponent(a, b - 1, component_walk(w, a, b), sigma))
    return out
