import itertools

import numpy as np
import pytest

from triperc.errors import IndexOutOfRange, InvalidInput
from triperc.sampler import SamplerConfig, sample_walk_peeling, substream
from triperc.walkcore import (
    SCALE_B,
    SCALE_C,
    Walk,
    ancestor_free_times,
    cone_points,
    is_member,
    matching_step,
    precedes,
    rescale,
    rescale_at,
)


def W(word, start=(0, 0)):
    return Walk.from_word(word, start)


def test_text_round_trip():
    w = W("bcc", (1, 0))
    assert w.to_text() == "1 0\nbcc\n"
    assert Walk.from_text(w.to_text()) == w
    with pytest.raises(InvalidInput):
        Walk.from_word("abd")


def test_membership_examples():
    assert is_member(W("c"), 0, 0, 0)
    assert is_member(W("abcc"), 1, 0, 0)
    assert is_member(W("bacc"), 1, 0, 0)
    assert not is_member(W("acc", (1, 0)))
    assert is_member(W("bcc", (1, 0)), 0, 1, 0)


def test_length_four_members_from_origin():
    members = {"".join(p) for p in itertools.product("abc", repeat=4) if is_member(W("".join(p)))}
    assert members == {"abcc", "bacc"}


def test_only_member_from_one_zero_with_three_steps():
    members = {"".join(p) for p in itertools.product("abc", repeat=3) if is_member(W("".join(p), (1, 0)))}
    assert members == {"bcc"}


def test_member_rejects_wrong_parameters():
    assert not is_member(W("abcc"), 0, 0, 0)
    assert not is_member(W("abcc"), 1, 1, 0)


def test_matching_examples():
    w = W("abcc")
    assert matching_step(w, 1) == 3
    assert matching_step(w, 2) == 3
    assert matching_step(w, 3, "R") == 2
    assert matching_step(w, 3, "L") == 1
    assert matching_step(w, 4) is None
    v = W("bcc", (1, 0))
    assert matching_step(v, 2, "R") == 1
    assert matching_step(v, 2, "L") is None
    assert matching_step(W("c"), 1) is None
    with pytest.raises(IndexOutOfRange):
        matching_step(w, 5)


def _matching_by_definition(w, i):
    code = w.step(i)
    if code == 2:
        return None
    coord = w.L if code == 0 else w.R
    for m in range(i, len(w) + 1):
        if coord[m] == coord[i - 1]:
            return m
    return None


def test_matching_stack_agrees_with_definition():
    rng = np.random.default_rng(4)
    for _ in range(300):
        w = Walk((int(rng.integers(0, 4)), int(rng.integers(0, 4))), rng.integers(0, 3, int(rng.integers(1, 40))))
        for i in range(1, len(w) + 1):
            if w.step(i) != 2:
                assert matching_step(w, i) == _matching_by_definition(w, i)
            else:
                for coord in ("L", "R"):
                    j = matching_step(w, i, coord)
                    if j is not None:
                        assert _matching_by_definition(w, j) == i


def _ancestor_free_by_definition(w, t):
    return [i for i in range(t + 1) if not any(precedes(w, j, i) for j in range(i, t + 1))]


def test_ancestor_free_times_agree_with_definition():
    rng = np.random.default_rng(8)
    for _ in range(200):
        w = Walk((int(rng.integers(0, 3)), int(rng.integers(0, 3))), rng.integers(0, 3, int(rng.integers(1, 30))))
        for t in range(len(w) + 1):
            assert list(ancestor_free_times(w, t)) == _ancestor_free_by_definition(w, t)


def test_ancestor_free_examples():
    assert list(ancestor_free_times(W("c"), 0)) == [0]
    assert list(ancestor_free_times(W("abcc"), 0)) == [0]
    assert list(ancestor_free_times(W("abcc"), 3)) == _ancestor_free_by_definition(W("abcc"), 3)


def test_cone_points():
    assert list(cone_points(W("c"), 0)) == [1]
    assert list(cone_points(W("abcc"), 0)) == [4]
    assert list(cone_points(W("abcc"), 1)) == [4]
    rng = np.random.default_rng(2)
    for _ in range(100):
        w = Walk((0, 0), rng.integers(0, 3, 25))
        i = int(rng.integers(0, 25))
        assert list(cone_points(w, i)) == [j for j in range(i + 1, 26) if precedes(w, j, i)]


def test_boundary_counts_and_step_balance(walks13):
    for w in walks13:
        lL, lR = w.start
        a, b, c = w.counts()
        assert a - c == -1 - lL and b - c == -1 - lR
        no_a = sum(1 for i in range(1, len(w)) if w.step(i) == 2 and matching_step(w, i, "L") is None)
        no_b = sum(1 for i in range(1, len(w)) if w.step(i) == 2 and matching_step(w, i, "R") is None)
        assert (no_a, no_b) == (lL, lR)
        assert 0 in ancestor_free_times(w, len(w) - 1)
        if w.start == (0, 0):
            assert len(w) % 3 == 1


def test_rescale_examples():
    w = W("bcc", (1, 0))
    times, values = rescale(w, 4.0)
    assert times.shape[0] == len(w) + 1
    assert np.allclose(np.diff(times), 1 / (SCALE_B * 4.0))
    assert np.allclose(values[0], np.array([1, 0]) / (SCALE_C * 2.0))
    assert np.allclose(values[-1], np.array([-1, -1]) / (SCALE_C * 2.0))
    assert np.allclose(rescale_at(w, 4.0, times), values)
    with pytest.raises(InvalidInput):
        rescale(w, 0)


def test_sampled_walks_are_members():
    cfg = SamplerConfig((3, 2))
    for i in range(20):
        w = sample_walk_peeling(cfg, substream(1, i))
        assert is_member(w)
