import numpy as np
import pytest

from triperc import combmap
from triperc.combmap import BLUE, RED
from triperc.matebij import phi_inverse
from triperc.sampler import iter_walks
from triperc.nested import DI, MONO
from triperc.walkcore import Walk, ancestor_free_times

SMALL_N = 13


def small_walks(n_max=SMALL_N):
    """Every member walk with at most ``n_max`` steps, over all boundary splits."""
    out = []
    for lL in range(n_max // 2 + 1):
        for lR in range(n_max // 2 + 1):
            if 2 * lL + 2 * lR + 1 <= n_max:
                out.extend(iter_walks(lL, lR, n_max))
    return out


@pytest.fixture(scope="session")
def walks13():
    return small_walks()


@pytest.fixture
def degenerate():
    return combmap.degenerate()


@pytest.fixture
def triangle():
    # counterclockwise boundary 0 -> 1 -> 2, root 0 -> 1
    return combmap.from_simple_faces([(0, 1, 2)], [0, 1, 2], [RED, RED, BLUE])


@pytest.fixture
def abcc_map():
    return phi_inverse(Walk.from_word("abcc"))


@pytest.fixture
def bacc_map():
    return phi_inverse(Walk.from_word("bacc"))


def wheel(k, center_color=BLUE, rim_color=RED):
    """A ``k``-gon whose boundary vertices all join one inner vertex."""
    faces = [(i, (i + 1) % k, k) for i in range(k)]
    colors = [rim_color] * k + [center_color]
    return combmap.from_simple_faces(faces, list(range(k)), colors)


def with_inner_colors(t, blue_inner):
    colors = np.full(t.n_vertices, RED, dtype=np.int8)
    colors[list(blue_inner)] = BLUE
    colors[t.boundary_vertices()] = RED
    return t.with_colors(colors)


def tree_summary(tree):
    return {k: (v.type, v.boundary_len, v.times, tuple(v.children)) for k, v in tree.nodes.items()}


def _runs(mask, offset):
    """Maximal runs of True in ``mask`` as inclusive ``(first, last)`` pairs shifted by ``offset``."""
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0] - 1
    return [(int(a) + offset, int(b) + offset) for a, b in zip(starts, ends)]


def check_bubble_tree(tree):
    """Structural invariants of a bubble tree against its walk.

    The tree must be built without a width cap, otherwise children are missing.
    """
    w = tree.walk
    assert tree.node(()).times[2] == len(w) - 1
    for node in tree.nodes.values():
        assert node.S <= node.T_hat <= node.T
        # a mono bubble can also end at its target when nothing lies beyond it
        if node.type == DI:
            assert node.T_hat == node.T
        kids = [tree.nodes[c] for c in node.children]
        spans = sorted((k.S, k.T) for k in kids)
        for a, b in spans:
            assert node.S <= a <= b <= node.T
        for (_, b1), (a2, _) in zip(spans, spans[1:]):
            assert b1 < a2
        if node.type == DI:
            assert all(k.type == MONO for k in kids)
        # decreasing boundary length, ties by first visit
        order = [(-k.boundary_len, k.S) for k in kids]
        assert order == sorted(order)
        if node.S == node.T or not kids:
            continue
        mono = sorted((k.S, k.T) for k in kids if k.type == MONO)
        di = sorted((k.S, k.T) for k in kids if k.type == DI)
        if node.type == MONO:
            # mono children tile [S, T_hat] minus the ancestor-free set
            outside = np.ones(node.T_hat - node.S + 1, dtype=bool)
            free = ancestor_free_times(w, node.T_hat)
            outside[free[free >= node.S] - node.S] = False
            assert mono == _runs(outside, node.S)
            if node.T_hat < node.T:
                # di children tile [T_hat + 1, T]
                assert di[0][0] == node.T_hat + 1 and di[-1][1] == node.T
                for (_, b1), (a2, _) in zip(di, di[1:]):
                    assert a2 == b1 + 1


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
