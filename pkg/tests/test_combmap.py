import json

import numpy as np
import pytest

from triperc import combmap
from triperc.combmap import BLUE, RED
from triperc.errors import (
    Disconnected,
    NonInvolutionTwin,
    NonSimpleBoundary,
    NonTriangularInnerFace,
    NotBoundaryEdge,
    NotMonochromatic,
    SelfLoop,
)
from triperc.sampler import sample_map, substream



def test_degenerate_map(degenerate):
    t = degenerate
    assert t.is_degenerate()
    assert t.boundary_len == 2
    assert t.n_inner == 0
    assert t.colors[t.origin[t.root]] == RED
    assert t.colors[t.head(t.root)] == BLUE


def test_single_triangle(triangle):
    assert triangle.boundary_len == 3
    assert triangle.n_inner == 0
    assert triangle.n_edges == 3


def test_two_gon_with_inner_vertex(abcc_map):
    t = abcc_map.triangulation
    assert t.boundary_len == 2
    assert t.n_inner == 1
    assert t.n_edges == 4
    assert t.n_inner_faces == 2


def test_build_rejects_broken_twin():
    with pytest.raises(NonInvolutionTwin):
        combmap.build([0, 1], [0, 1], [0, 1], 0, [RED, BLUE])


def test_build_rejects_self_loop():
    # one edge whose both halves leave vertex 0
    with pytest.raises(SelfLoop):
        combmap.build([1, 0], [1, 0], [0, 0], 0, [RED])


def test_build_rejects_disconnected_graph():
    twin = [1, 0, 3, 2]
    nxt = [0, 1, 2, 3]
    origin = [0, 1, 2, 3]
    with pytest.raises(Disconnected):
        combmap.build(twin, nxt, origin, 0, [RED, BLUE, RED, BLUE])


def test_build_rejects_square_inner_face():
    # plain 4-cycle: half-edge 2v runs v -> v+1, half-edge 2v+1 runs v+1 -> v
    twin, origin, nxt = [], [], []
    for v in range(4):
        twin += [2 * v + 1, 2 * v]
        origin += [v, (v + 1) % 4]
    for h in range(8):
        v = origin[h]
        out, back = 2 * v, 2 * ((v - 1) % 4) + 1
        nxt.append(back if h == out else out)
    with pytest.raises(NonTriangularInnerFace):
        combmap.build(twin, nxt, origin, 0, [RED] * 4)


def test_build_rejects_pinched_boundary():
    # two triangles sharing only vertex 0: the root face visits 0 twice
    with pytest.raises(NonSimpleBoundary):
        combmap.from_simple_faces([(0, 1, 2), (0, 3, 4)], [0, 1, 2, 0, 3, 4], [RED] * 5)


def test_euler_and_face_degrees_on_samples():
    for i in range(50):
        t = sample_map(2 + i % 7, substream(11, i))
        faces = t.n_inner_faces + 1
        assert t.n_vertices - t.n_edges + faces == 2
        assert 3 * t.n_inner_faces == 2 * t.n_edges - t.boundary_len
        if t.boundary_len >= 3:
            assert t.n_edges == 3 * t.n_inner + 2 * t.boundary_len - 3


def test_json_round_trip_is_exact(abcc_map):
    for t in (abcc_map.triangulation, sample_map(9, substream(3))):
        text = t.to_json()
        back = combmap.from_json(text)
        assert back == t
        assert back.to_json() == text
        assert set(json.loads(text)) == {"half_edges", "root", "colors"}


def test_two_connected_components_empty_removal(degenerate):
    assert combmap.two_connected_components(degenerate) == [degenerate]


def test_two_connected_components_of_abcc_minus_root(abcc_map):
    t = abcc_map.triangulation
    comps = combmap.two_connected_components(t, removed=[t.edge_of[t.root]])
    assert len(comps) == 1
    assert comps[0].n_edges == 3


def test_two_connected_components_of_triangle_minus_root(triangle):
    comps = combmap.two_connected_components(triangle, removed=[triangle.edge_of[triangle.root]])
    assert sorted(c.n_edges for c in comps) == [1, 1]


def _brute_blocks(t, removed):
    """Edges share a block iff some simple cycle runs through both (parallel edges kept distinct)."""
    alive = [e for e in range(t.n_edges) if e not in removed]
    ends = {e: tuple(int(x) for x in t.origin[t.edge_halves[e]]) for e in alive}

    def cycle_edges(e):
        # edges on some simple path between the ends of e avoiding e
        u, v = ends[e]
        found = set()

        def dfs(x, used, verts):
            if x == v:
                found.update(used)
                return
            for g in alive:
                if g in used or g == e or x not in ends[g]:
                    continue
                y = ends[g][0] if ends[g][1] == x else ends[g][1]
                if y in verts:
                    continue
                dfs(y, used | {g}, verts | {y})

        dfs(u, frozenset(), {u})
        return found

    parent = {e: e for e in alive}

    def find(e):
        while parent[e] != e:
            e = parent[e]
        return e

    for e in alive:
        for f in cycle_edges(e):
            parent[find(f)] = find(e)
    groups = {}
    for e in alive:
        groups.setdefault(find(e), set()).add(e)
    return sorted(sorted(g) for g in groups.values())


def test_two_connected_components_match_brute_force():
    checked = 0
    for i in range(40):
        t = sample_map(3 + i % 3, substream(21, i))
        if t.n_vertices > 7:
            continue
        # removing an inner edge would leave a quadrilateral, so only boundary edges qualify
        for e in sorted(set(int(x) for x in t.edge_of[t.boundary])):
            comps = combmap.two_connected_components(t, removed=[e])
            got = sorted(sorted(set(int(t.edge_of[h]) for h in c.provenance)) for c in comps)
            assert got == _brute_blocks(t, {e})
            for c in comps:
                combmap.build(c.twin, c.next, c.origin, c.root, c.colors)
            checked += 1
    assert checked > 0


def test_bfs_distances(degenerate, triangle, abcc_map):
    assert list(combmap.bfs_distances(degenerate, degenerate.origin[degenerate.root])) == [0, 1]
    for v in range(3):
        assert sorted(combmap.bfs_distances(triangle, v)) == [0, 1, 1]
    t = abcc_map.triangulation
    inner = int(np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())[0])
    d = combmap.bfs_distances(t, inner)
    assert all(d[v] == 1 for v in t.boundary_vertices())


def test_boundary_walk(degenerate, triangle, abcc_map):
    # the single edge is traced on both sides
    assert combmap.boundary_walk(degenerate) == [degenerate.root, degenerate.twin[degenerate.root]]
    b = combmap.boundary_walk(triangle)
    assert len(b) == 3 and b[0] == triangle.root
    # consecutive boundary half-edges chain head to tail
    for h, g in zip(b, b[1:] + b[:1]):
        assert triangle.head(h) == triangle.origin[g]
    assert len(combmap.boundary_walk(abcc_map.triangulation)) == 2


def test_reroot(triangle):
    b = combmap.boundary_walk(triangle)
    assert combmap.reroot(triangle, b[0]) == triangle
    twice = combmap.reroot(combmap.reroot(triangle, b[1]), b[2])
    assert twice == combmap.reroot(triangle, b[2])
    r = combmap.reroot(triangle, b[1])
    assert combmap.boundary_walk(r)[0] == b[1]
    assert np.array_equal(r.colors, triangle.colors)
    assert combmap.reroot(r, b[0]) == triangle
    with pytest.raises(NotBoundaryEdge):
        combmap.reroot(triangle, triangle.twin[b[0]])


def test_identify_rejects_dichromatic_degenerate(degenerate):
    with pytest.raises(NotMonochromatic):
        combmap.identify_monochromatic_as_dichromatic(degenerate, degenerate.root)


def test_identify_red_triangle():
    t = combmap.from_simple_faces([(0, 1, 2)], [0, 1, 2], [RED] * 3)
    p = combmap.identify_monochromatic_as_dichromatic(t, t.root)
    assert (p.ell_L, p.ell_R) == (1, 0)
    assert combmap.restore_monochromatic(p) == t


def test_identify_red_two_gon(abcc_map):
    t = combmap.restore_monochromatic(abcc_map, RED)
    assert combmap.is_monochromatic(t)
    p = combmap.identify_monochromatic_as_dichromatic(t, t.root)
    assert (p.ell_L, p.ell_R) == (0, 0)
    assert np.array_equal(combmap.restore_monochromatic(p, RED).colors, t.colors)


def test_identify_blue_boundary_swaps_roles():
    t = combmap.from_simple_faces([(0, 1, 2)], [0, 1, 2], [BLUE] * 3)
    p = combmap.identify_monochromatic_as_dichromatic(t, t.root)
    assert (p.ell_L, p.ell_R) == (0, 1)
    assert combmap.restore_monochromatic(p) == t


def test_canonical_form_ignores_labels(abcc_map):
    t = abcc_map.triangulation
    perm = np.random.default_rng(0).permutation(t.n_half_edges)
    inv = np.argsort(perm)
    vperm = np.random.default_rng(1).permutation(t.n_vertices)
    relabeled = combmap.build(
        perm[t.twin[inv]], perm[t.next[inv]], vperm[t.origin[inv]], perm[t.root], t.colors[np.argsort(vperm)]
    )
    assert combmap.canonical_form(relabeled) == combmap.canonical_form(t)
